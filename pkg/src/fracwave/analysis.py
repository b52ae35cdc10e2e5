"""Numerical probes of the self-contained inequalities behind the decay rates.

Everything here is a deterministic computation on explicit continuous
functions or on the truncated mode space: infima of ratio functions over
gridded regions, smallest eigenvalues of concentration forms, and the
frequency-interval bookkeeping that separates the polynomial regime from
the exponential one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .damping import DampingProfile
from .errors import DegenerateInputError, ParameterError, StructuralError
from .scans import ScanResult, fit_loglog_slope
from .spectral import (
    Field,
    Grid,
    band_project,
    forward,
    inverse,
    multiplier_in_mode_basis,
)


@dataclass(frozen=True)
class IntervalPair:
    """Symmetric pair of closed intervals [lo, hi] and [-hi, -lo], 0 <= lo <= hi.

    A degenerate pair (empty frequency set) is stored as lo = hi = 0.
    """

    lo: float
    hi: float

    def __post_init__(self):
        if not (0 <= self.lo <= self.hi):
            raise StructuralError(f"need 0 <= lo <= hi, got [{self.lo}, {self.hi}]")

    @property
    def positive(self) -> tuple[float, float]:
        return (self.lo, self.hi)

    @property
    def negative(self) -> tuple[float, float]:
        return (-self.hi, -self.lo)

    @property
    def length(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class InfimumResult:
    value: float
    tau: float
    lam: float


def lemma1_infimum(
    s: float,
    tau_max: float = 50.0,
    lam_max: float = 200.0,
    resolution: int = 4000,
) -> InfimumResult:
    """Infimum of |tau^s - lam| / (1+lam)^{1-1/s} over |tau - lam^{1/s}| > 1.

    For fixed lam the ratio is monotone in the distance of tau from
    lam^{1/s} on either side, so the infimum over the region sits on the
    boundary tau = lam^{1/s} +- 1; the search grids lam and evaluates both
    boundary branches exactly.  ``tau_max`` caps the searched region.
    """
    if s <= 0:
        raise ParameterError(f"s must be positive, got {s}")
    if resolution < 2:
        raise ParameterError("resolution must be at least 2")
    lam = np.linspace(0.0, lam_max, resolution)
    weight = (1.0 + lam) ** (1.0 - 1.0 / s)
    root = lam ** (1.0 / s)

    best_val = np.inf
    best_tau = np.nan
    best_lam = np.nan

    tau_plus = root + 1.0
    ok = tau_plus <= tau_max
    if np.any(ok):
        vals = (tau_plus[ok] ** s - lam[ok]) / weight[ok]
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val = float(vals[i])
            best_tau = float(tau_plus[ok][i])
            best_lam = float(lam[ok][i])

    tau_minus = root - 1.0
    ok = tau_minus >= 0.0
    if np.any(ok):
        vals = (lam[ok] - tau_minus[ok] ** s) / weight[ok]
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val = float(vals[i])
            best_tau = float(tau_minus[ok][i])
            best_lam = float(lam[ok][i])

    return InfimumResult(best_val, best_tau, best_lam)


def power_difference_constant(s: float, resolution: int = 4000) -> float:
    """Best d with d * max(x,y)^{s-1} |x-y| <= |x^s - y^s| on the half line.

    The ratio is homogeneous of degree zero, so x = 1 and y in [0, 1) is
    exhaustive; the grid is refined geometrically toward y = 1 where the
    ratio tends to s for s < 1.
    """
    if s <= 0:
        raise ParameterError(f"s must be positive, got {s}")
    if resolution < 10:
        raise ParameterError("resolution must be at least 10")
    y_uniform = np.linspace(0.0, 1.0 - 1.0 / resolution, resolution)
    y_close = 1.0 - np.geomspace(1.0 / resolution, 1e-9, resolution // 10)
    y = np.concatenate([y_uniform, y_close])
    ratio = (1.0 - y**s) / (1.0 - y)
    return float(np.min(ratio))


def ls_constant(sample_set, bands, grid: Grid) -> float:
    """Best c with ||f||_{L2(E)} >= c ||f|| for spectra supported in the bands.

    Square root of the smallest eigenvalue of the concentration form
    P_B M_E P_B on the band-limited subspace: the extremal band-limited
    function is an eigenvector, so the value is exact on the truncated
    space.  Raises when no grid frequency lies in the bands.
    """
    mask_e = _point_mask(grid, sample_set)
    band_idx = _band_indices(grid, bands)
    if band_idx.size == 0:
        raise DegenerateInputError("no grid frequency lies in the given bands")
    form = multiplier_in_mode_basis(grid, mask_e.astype(float), mode_indices=band_idx)
    vals = scipy.linalg.eigh(form, eigvals_only=True, subset_by_index=(0, 0))
    return float(np.sqrt(min(max(vals[0], 0.0), 1.0)))


def _point_mask(grid: Grid, sample_set) -> np.ndarray:
    arr = np.asarray(sample_set)
    if arr.dtype == bool:
        if arr.shape != (grid.num_points,):
            raise StructuralError("boolean sample set does not match the grid")
        return arr
    mask = np.zeros(grid.num_points, dtype=bool)
    if arr.size:
        mask[arr.astype(int)] = True
    return mask


def _band_indices(grid: Grid, bands) -> np.ndarray:
    mask = np.zeros(grid.num_points, dtype=bool)
    for band in bands:
        lo, hi = float(band[0]), float(band[1])
        if lo > hi:
            raise StructuralError(f"malformed band [{lo}, {hi}]")
        mask |= (grid.xi >= lo) & (grid.xi <= hi)
    return np.nonzero(mask)[0]


def a_lambda_intervals(lam: float, s: float, width: float) -> IntervalPair:
    """Frequencies where (xi^2+1)^{s/4} is within ``width`` of lam.

    Positive branch [sqrt((lam-K)^{4/s} - 1), sqrt((lam+K)^{4/s} - 1)] with
    square roots clamped at zero; empty (zero length) when lam + K <= 1.
    """
    if width <= 0:
        raise ParameterError(f"width must be positive, got {width}")
    if lam < 0:
        raise ParameterError(f"lambda must be nonnegative, got {lam}")
    upper_base = max(lam + width, 0.0)
    lower_base = max(lam - width, 0.0)
    hi = np.sqrt(max(upper_base ** (4.0 / s) - 1.0, 0.0))
    lo = np.sqrt(max(lower_base ** (4.0 / s) - 1.0, 0.0))
    if hi <= 0.0:
        return IntervalPair(0.0, 0.0)
    return IntervalPair(float(lo), float(hi))


def interval_growth_classification(
    s: float, width: float, lam_values: np.ndarray
) -> tuple[str, ScanResult]:
    """Classify the lambda growth of the interval lengths: divergent or bounded.

    Divergent when the log-log slope of length against lambda exceeds 0.1;
    the expected slope is 2/s - 1 (positive exactly when s < 2).  The
    lambda values must be increasing and span at least two decades.
    """
    lams = np.asarray(lam_values, dtype=float)
    if lams.ndim != 1 or lams.size < 3 or np.any(np.diff(lams) <= 0):
        raise ParameterError("lambda values must be strictly increasing")
    positive = lams[lams > 0]
    if positive.size == 0 or positive.max() / positive.min() < 99.0:
        raise ParameterError("lambda values must span at least two decades")
    lengths = np.array([a_lambda_intervals(l, s, width).length for l in lams])
    ok = (lams > 0) & (lengths > 0)
    if np.count_nonzero(ok) < 3:
        raise ParameterError("not enough nondegenerate intervals to classify")
    slope, _, resid = fit_loglog_slope(lams[ok], lengths[ok])
    label = "divergent" if slope > 0.1 else "bounded"
    scan = ScanResult(
        parameters=lams,
        values=lengths,
        exponent=slope,
        residual=resid,
        meta={"s": s, "width": width, "classification": label},
    )
    return label, scan


def vanishing_damping_ratio(
    gamma: DampingProfile,
    radii: np.ndarray,
    envelope: dict | None = None,
) -> ScanResult:
    """||gamma g_R|| / ||g_R|| for band truncations g_R of f = 1_{gamma=0} phi.

    phi is a positive envelope (default a centered Gaussian).  Because
    gamma f = 0 pointwise, the ratio is controlled by the truncation error
    and must fall toward zero as R sweeps up through the resolved band,
    contradicting any uniform lower bound c||u|| <= ||gamma u||.
    """
    zero_mask = gamma.samples == 0.0
    if not np.any(zero_mask):
        raise ParameterError("profile has an empty zero set; nothing vanishes")
    rs = np.asarray(radii, dtype=float)
    if rs.ndim != 1 or rs.size < 2 or np.any(np.diff(rs) <= 0):
        raise ParameterError("radii must be strictly increasing")
    grid = gamma.grid
    envelope = dict(envelope or {})
    kind = envelope.pop("kind", "gaussian")
    if kind != "gaussian":
        raise ParameterError(f"unknown envelope kind {kind!r}")
    center = float(envelope.pop("center", 0.0))
    width = float(envelope.pop("width", grid.half_length / 8))
    if width <= 0:
        raise ParameterError(f"envelope width must be positive, got {width}")
    phi = np.exp(-0.5 * ((grid.x - center) / width) ** 2)
    f_hat = forward(Field(grid, zero_mask * phi))

    ratios = np.empty(rs.size)
    for i, r in enumerate(rs):
        g = inverse(band_project(f_hat, [(-r, r)]))
        g_norm = np.sqrt(np.sum(np.abs(g.samples) ** 2) * grid.dx)
        if g_norm == 0.0:
            ratios[i] = 0.0
            continue
        damped = np.sqrt(np.sum(np.abs(gamma.samples * g.samples) ** 2) * grid.dx)
        ratios[i] = damped / g_norm
    return ScanResult(
        parameters=rs,
        values=ratios,
        exponent=float("nan"),
        residual=float("nan"),
        meta={
            "damping": dict(gamma.descriptor),
            "envelope": {"kind": kind, "center": center, "width": width},
        },
    )


def sinc_translate_average(
    gamma: DampingProfile,
    freq: float,
    center: float,
    radius: float,
    modulation: float = 0.0,
) -> tuple[float, float]:
    """Split ||gamma f_a||^2 at the window edge, f_a(x) = sin(D(x-a))/(D(x-a)).

    Returns (inside, outside): the integral of |gamma f_a|^2 over the
    periodic window [a-R, a+R] and over its complement.  Displacements
    wrap periodically, so grid-aligned translations of the center leave
    inside + outside invariant.  A nonzero ``modulation`` multiplies the
    test function by exp(i mu (x-a)), shifting its spectral support away
    from the origin; the two integrals cannot see it.
    """
    if freq <= 0:
        raise ParameterError(f"frequency must be positive, got {freq}")
    grid = gamma.grid
    if not (0 < radius <= grid.half_length):
        raise ParameterError(
            f"radius must lie in (0, {grid.half_length}], got {radius}"
        )
    d = np.mod(grid.x - center + grid.half_length, 2 * grid.half_length) - grid.half_length
    f = np.sinc(freq * d / np.pi) * np.exp(1j * modulation * d)
    weighted = np.abs(gamma.samples * f) ** 2 * grid.dx
    inside_mask = np.abs(d) <= radius
    inside = float(np.sum(weighted[inside_mask]))
    outside = float(np.sum(weighted[~inside_mask]))
    return inside, outside
