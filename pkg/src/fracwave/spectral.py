"""Periodic grid, unitary discrete Fourier transform, and Sobolev machinery.

The transform normalization is chosen so the discrete Parseval identity

    sum_j |f(x_j)|^2 dx  =  sum_k |c_k|^2 (pi/L)

holds, with sample points x_j = -L + j*dx on [-L, L) and frequencies
xi_k = pi*k/L for k = -N/2 .. N/2-1.  Discrete L2 and H^r norms then
converge to their continuum counterparts, which is what every downstream
check compares against.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import ParameterError, StructuralError

SQRT_2PI = float(np.sqrt(2.0 * np.pi))


@dataclass(eq=False)
class Grid:
    """Uniform periodic grid on [-L, L) paired with its discrete frequency ladder.

    N must be even; by default it must also be a power of two (pass
    ``power_of_two=False`` to relax).  The mode k = -N/2 is the single
    unpaired frequency and participates in every multiplier.
    """

    half_length: float
    num_points: int
    power_of_two: bool = True

    def __post_init__(self):
        L, N = self.half_length, self.num_points
        if not (np.isfinite(L) and L > 0):
            raise ParameterError(f"half_length must be positive, got {L}")
        if N <= 0 or N % 2 != 0:
            raise ParameterError(f"num_points must be even and positive, got {N}")
        if self.power_of_two and (N & (N - 1)) != 0:
            raise ParameterError(
                f"num_points must be a power of two (got {N}); "
                "pass power_of_two=False to allow any even N"
            )

    @property
    def dx(self) -> float:
        return 2.0 * self.half_length / self.num_points

    @property
    def dxi(self) -> float:
        """Spacing pi/L of the frequency ladder (the dual quadrature weight)."""
        return np.pi / self.half_length

    @cached_property
    def x(self) -> np.ndarray:
        return -self.half_length + self.dx * np.arange(self.num_points)

    @cached_property
    def k(self) -> np.ndarray:
        return np.arange(-self.num_points // 2, self.num_points // 2)

    @cached_property
    def xi(self) -> np.ndarray:
        return np.pi * self.k / self.half_length

    @property
    def xi_max(self) -> float:
        """Largest frequency magnitude on the grid."""
        return np.pi * (self.num_points // 2) / self.half_length

    @cached_property
    def mode_signs(self) -> np.ndarray:
        # (-1)^k phase from referencing samples to x = -L instead of 0.
        return np.where(self.k % 2 == 0, 1.0, -1.0)


@dataclass(eq=False)
class Field:
    """Complex samples of a function at the grid points."""

    grid: Grid
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.shape != (self.grid.num_points,):
            raise StructuralError(
                f"field has {self.samples.shape} samples, grid expects "
                f"({self.grid.num_points},)"
            )


@dataclass(eq=False)
class Spectrum:
    """Complex coefficients indexed by the grid frequencies xi_k."""

    grid: Grid
    coefficients: np.ndarray

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=complex)
        if self.coefficients.shape != (self.grid.num_points,):
            raise StructuralError(
                f"spectrum has {self.coefficients.shape} coefficients, grid expects "
                f"({self.grid.num_points},)"
            )


def forward(f: Field) -> Spectrum:
    """Discrete analogue of (2*pi)^{-1/2} * integral f(x) exp(-i x xi) dx."""
    g = f.grid
    coeffs = (g.dx / SQRT_2PI) * g.mode_signs * np.fft.fftshift(np.fft.fft(f.samples))
    return Spectrum(g, coeffs)


def inverse(spec: Spectrum) -> Field:
    """Inverse of :func:`forward`; round-trips to machine precision."""
    g = spec.grid
    twisted = np.fft.ifftshift(spec.coefficients * g.mode_signs)
    samples = (g.dxi / SQRT_2PI) * g.num_points * np.fft.ifft(twisted)
    return Field(g, samples)


def field_l2(f: Field) -> float:
    """Discrete L2 norm (sum |f_j|^2 dx)^{1/2}."""
    return float(np.sqrt(np.sum(np.abs(f.samples) ** 2) * f.grid.dx))


def spectrum_l2(spec: Spectrum) -> float:
    """Dual-side discrete L2 norm (sum |c_k|^2 pi/L)^{1/2}."""
    return float(np.sqrt(np.sum(np.abs(spec.coefficients) ** 2) * spec.grid.dxi))


def apply_bessel_multiplier(spec: Spectrum, power: float) -> Spectrum:
    """Multiply coefficient k by (xi_k^2 + 1)^{power/2}.

    power = s applies the fractional operator of order s, power = -s its
    inverse; the multiplier is strictly positive for every real power.
    """
    w = (spec.grid.xi**2 + 1.0) ** (power / 2.0)
    return Spectrum(spec.grid, spec.coefficients * w)


def _band_mask(grid: Grid, bands: Iterable[Sequence[float]]) -> np.ndarray:
    mask = np.zeros(grid.num_points, dtype=bool)
    for band in bands:
        if len(band) != 2:
            raise StructuralError(f"band must be a (lo, hi) pair, got {band!r}")
        lo, hi = float(band[0]), float(band[1])
        if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
            raise StructuralError(f"malformed band [{lo}, {hi}]")
        mask |= (grid.xi >= lo) & (grid.xi <= hi)
    return mask


def band_project(spec: Spectrum, bands: Iterable[Sequence[float]]) -> Spectrum:
    """Zero every coefficient whose frequency lies outside the closed bands.

    Idempotent and self-adjoint in the discrete inner product (it is a 0/1
    diagonal in the coefficient basis).  An empty band list gives zero.
    """
    mask = _band_mask(spec.grid, bands)
    return Spectrum(spec.grid, np.where(mask, spec.coefficients, 0.0))


def sobolev_norm(f: Field, r: float) -> float:
    """H^r norm ( sum (xi_k^2+1)^r |c_k|^2 pi/L )^{1/2}; r = 0 is discrete L2."""
    spec = forward(f)
    w = (f.grid.xi**2 + 1.0) ** r
    return float(np.sqrt(np.sum(w * np.abs(spec.coefficients) ** 2) * f.grid.dxi))


def synthesis_matrix(grid: Grid) -> np.ndarray:
    """N x N matrix mapping coefficient vectors to sample vectors.

    Column k is the inverse transform of the unit coefficient at xi_k.
    """
    phase = np.exp(1j * np.outer(grid.x, grid.xi))
    return (grid.dxi / SQRT_2PI) * phase


def multiplier_in_mode_basis(
    grid: Grid,
    spatial_weights: np.ndarray,
    mode_indices: np.ndarray | None = None,
) -> np.ndarray:
    """Matrix of pointwise multiplication by ``spatial_weights`` in the mode basis.

    Equals (1/N) E^H diag(w) E with E_{jk} = exp(i x_j xi_k); Hermitian for
    real weights, and the identity when the weights are identically one.
    ``mode_indices`` restricts to a frequency subset (rows and columns).
    """
    w = np.asarray(spatial_weights, dtype=float)
    if w.shape != (grid.num_points,):
        raise StructuralError(
            f"weights have shape {w.shape}, grid expects ({grid.num_points},)"
        )
    xi = grid.xi if mode_indices is None else grid.xi[mode_indices]
    phase = np.exp(1j * np.outer(grid.x, xi))
    return (phase.conj().T * w) @ phase / grid.num_points
