"""Discretized generator, resolvent norms, and best observability constants.

The generator acts on block vectors (u1-coefficients, u2-coefficients) of
length 2N.  The energy geometry is encoded by the weight vector
((xi_k^2+1)^{s/2}, ..., 1, ...): conjugating with the square-root weight
turns weighted operator norms and adjoints into plain spectral ones, so
everything reduces to standard dense decompositions.

Best constants are smallest eigenvalues of explicit Hermitian forms; the
observation term is the matrix of indicator multiplication expressed in
the mode basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from .damping import DampingProfile
from .errors import NumericalError, ParameterError, ResourceError, StructuralError
from .scans import ScanResult, fit_loglog_slope
from .spectral import Grid, multiplier_in_mode_basis

DENSE_BUDGET = 1024

SINGULAR_CUTOFF = 1e-14


@dataclass(eq=False)
class GeneratorMatrix:
    """Dense matrix of the damped generator in the block mode basis.

    ``matrix`` is the plain-basis operator; ``weights`` holds the diagonal
    of the energy inner product (first block (xi^2+1)^{s/2}, second block 1).
    """

    grid: Grid
    s: float
    matrix: np.ndarray
    weights: np.ndarray
    damping_descriptor: dict

    @cached_property
    def hat(self) -> np.ndarray:
        """W^{1/2} A W^{-1/2}: the operator seen by the plain 2-norm."""
        root = np.sqrt(self.weights)
        return (self.matrix * (root[:, None] / root[None, :]))

    @property
    def omega(self) -> np.ndarray:
        """Mode frequencies (xi_k^2+1)^{s/4} of the undamped ladder."""
        return np.sqrt(self.weights[: self.grid.num_points])

    @property
    def omega_max(self) -> float:
        return float(np.max(self.omega))


def _check_budget(grid: Grid, budget: int) -> None:
    if grid.num_points > budget:
        raise ResourceError(
            f"grid has {grid.num_points} points, dense budget allows {budget}"
        )


def _mode_mask(grid: Grid, indices) -> np.ndarray:
    """Normalize an index set of grid points to a boolean mask."""
    arr = np.asarray(indices)
    if arr.dtype == bool:
        if arr.shape != (grid.num_points,):
            raise StructuralError("boolean index set does not match the grid")
        return arr
    mask = np.zeros(grid.num_points, dtype=bool)
    if arr.size:
        mask[arr.astype(int)] = True
    return mask


def assemble_generator(
    gamma: DampingProfile, s: float, grid: Grid, budget: int = DENSE_BUDGET
) -> GeneratorMatrix:
    """Block matrix (u1, u2) -> (u2, -D^s u1 - gamma u2) on the mode basis.

    With gamma = 0 the conjugated matrix is exactly skew-Hermitian; for
    gamma >= 0 its Hermitian part is negative semidefinite, matching the
    dissipation identity Re<A U, U> = -||sqrt(gamma) u2||^2.
    """
    if s <= 0:
        raise ParameterError(f"fractional order s must be positive, got {s}")
    _check_budget(grid, budget)
    if gamma.grid.num_points != grid.num_points or (
        gamma.grid.half_length != grid.half_length
    ):
        raise StructuralError("damping profile grid does not match the target grid")
    n = grid.num_points
    m = (grid.xi**2 + 1.0) ** (s / 2.0)
    gamma_block = multiplier_in_mode_basis(grid, gamma.samples)
    a = np.zeros((2 * n, 2 * n), dtype=complex)
    a[:n, n:] = np.eye(n)
    a[n:, :n] = -np.diag(m)
    a[n:, n:] = -gamma_block
    weights = np.concatenate([m, np.ones(n)])
    return GeneratorMatrix(grid, s, a, weights, dict(gamma.descriptor))


def resolvent_norm_at(gen: GeneratorMatrix, lam: float) -> float:
    """Operator norm of (A - i lam)^{-1} in the energy geometry.

    Computed as 1/sigma_min of the weight-conjugated shifted matrix;
    returns inf when the smallest singular value is below the relative
    cutoff (an eigenvalue sits on the scan line).
    """
    shifted = gen.hat - 1j * lam * np.eye(gen.hat.shape[0])
    try:
        sv = scipy.linalg.svdvals(shifted)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalError(f"singular value computation failed at lambda={lam}") from exc
    if sv[-1] < SINGULAR_CUTOFF * sv[0]:
        return float("inf")
    return float(1.0 / sv[-1])


def default_scan_band(gen: GeneratorMatrix, num: int = 48) -> np.ndarray:
    """lambda grid covering [0, omega_max/2], the honestly resolved band."""
    return np.linspace(0.0, gen.omega_max / 2.0, num)


def resolvent_scan(gen: GeneratorMatrix, lam_values: np.ndarray) -> ScanResult:
    """Resolvent norms along i*lambda with the fitted growth exponent.

    The exponent is the slope of log(norm) against log(1 + lambda).  Any
    infinite value aborts: the scan line hit an eigenvalue.
    """
    lams = np.asarray(lam_values, dtype=float)
    if lams.ndim != 1 or lams.size < 2 or np.any(np.diff(lams) <= 0):
        raise ParameterError("lambda values must be strictly increasing")
    values = np.array([resolvent_norm_at(gen, lam) for lam in lams])
    bad = lams[~np.isfinite(values)]
    if bad.size:
        raise NumericalError(
            f"in-band eigenvalue: resolvent diverges at lambda={bad.tolist()}"
        )
    slope, _, resid = fit_loglog_slope(1.0 + lams, values)
    return ScanResult(
        parameters=lams,
        values=values,
        exponent=slope,
        residual=resid,
        meta={"s": gen.s, "damping": gen.damping_descriptor, "num_points": gen.grid.num_points},
    )


def _smallest_eigenvalue(form: np.ndarray) -> float:
    try:
        vals = scipy.linalg.eigh(form, eigvals_only=True, subset_by_index=(0, 0))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalError("eigenvalue computation failed") from exc
    return float(max(vals[0], 0.0))


def scalar_resolvent_constant(
    omega_set,
    s: float,
    lam: float,
    grid: Grid,
    budget: int = DENSE_BUDGET,
) -> float:
    """Best c with c||f||^2 <= (1+lam)^{2/s-2} ||(D^s - lam) f||^2 + ||f||^2_{L2(Omega)}.

    Smallest eigenvalue of the Hermitian form; Omega is a set of grid
    points (boolean mask or integer indices).
    """
    if s <= 0:
        raise ParameterError(f"fractional order s must be positive, got {s}")
    if lam < 0:
        raise ParameterError(f"lambda must be nonnegative, got {lam}")
    _check_budget(grid, budget)
    mask = _mode_mask(grid, omega_set)
    m = (grid.xi**2 + 1.0) ** (s / 2.0)
    form = multiplier_in_mode_basis(grid, mask.astype(float))
    diag = (1.0 + lam) ** (2.0 / s - 2.0) * np.abs(m - lam) ** 2
    form[np.diag_indices_from(form)] += diag
    return _smallest_eigenvalue(form)


def wave_observability_constant(
    omega_set,
    s: float,
    lam: float,
    grid: Grid,
    budget: int = DENSE_BUDGET,
) -> float:
    """Best c in the undamped-wave observability inequality at frequency lam.

    c ||U||^2_{H^{s/2} x L2} <= (|lam|+1)^{4/s-2} ||(A0 - i lam) U||^2
                                 + ||u2||^2_{L2(Omega)}
    computed on the 2N-dimensional block space in the weighted geometry.
    """
    if s <= 0:
        raise ParameterError(f"fractional order s must be positive, got {s}")
    _check_budget(grid, budget)
    mask = _mode_mask(grid, omega_set)
    n = grid.num_points
    omega = (grid.xi**2 + 1.0) ** (s / 4.0)
    b0 = np.zeros((2 * n, 2 * n), dtype=complex)
    b0[:n, n:] = np.diag(omega)
    b0[n:, :n] = -np.diag(omega)
    shifted = b0 - 1j * lam * np.eye(2 * n)
    form = (np.abs(lam) + 1.0) ** (4.0 / s - 2.0) * (shifted.conj().T @ shifted)
    form[n:, n:] += multiplier_in_mode_basis(grid, mask.astype(float))
    return _smallest_eigenvalue(form)
