"""Decay-model fitting and classification of energy traces."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateFitError, ParameterError
from ..simulator import EnergyTrace

ENERGY_FLOOR_FACTOR = 1e3 * np.finfo(float).eps
CLASS_MARGIN = 0.1
STALL_FRACTION = 0.99


@dataclass(frozen=True)
class DecayFit:
    """Fitted decay model on a window of a trace.

    For ``model == "exponential"`` the fit is E(t) ~ C * E(0) * exp(-rate t);
    for ``model == "polynomial"`` it is E(t) ~ C * E(0) * (1+t)^{-rate}.
    ``residual`` is the RMS of log-space residuals; ``alt_residual`` holds
    the competing model's residual when a classification computed both.
    """

    model: str
    C: float
    rate: float
    window: tuple[float, float]
    residual: float
    alt_residual: float | None = None


@dataclass(frozen=True)
class Classification:
    label: str
    window: tuple[float, float]
    exponential: DecayFit | None = None
    polynomial: DecayFit | None = None


def default_window(trace: EnergyTrace) -> tuple[float, float]:
    """[0.1 T, t*]: skip the transient, stop before the terminal ladder tail.

    t* is the earlier of 0.9 T and the first time the trace falls below
    1e3 * eps * E(0).
    """
    t_end = float(trace.times[-1])
    e0 = float(trace.energies[0])
    t_star = 0.9 * t_end
    below = trace.times[trace.energies < ENERGY_FLOOR_FACTOR * e0]
    if below.size:
        t_star = min(t_star, float(below[0]))
    return (0.1 * t_end, t_star)


def _window_data(
    trace: EnergyTrace, window: tuple[float, float]
) -> tuple[np.ndarray, np.ndarray]:
    t0, t1 = window
    if not (t0 < t1):
        raise ParameterError(f"fit window [{t0}, {t1}] is empty")
    mask = (trace.times >= t0) & (trace.times <= t1)
    times = trace.times[mask]
    energies = trace.energies[mask]
    if times.size < 10:
        raise DegenerateFitError(
            f"only {times.size} samples in window [{t0}, {t1}]; need at least 10"
        )
    if np.any(energies <= 0):
        raise DegenerateFitError("window contains nonpositive energies")
    return times, energies


def _line_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid**2)))


def fit_exponential(trace: EnergyTrace, window: tuple[float, float]) -> DecayFit:
    """Least-squares line on (t, log E); rate is the negated slope."""
    times, energies = _window_data(trace, window)
    slope, intercept, resid = _line_fit(times, np.log(energies))
    e0 = float(trace.energies[0])
    return DecayFit(
        model="exponential",
        C=float(np.exp(intercept) / e0),
        rate=-slope,
        window=tuple(window),
        residual=resid,
    )


def fit_polynomial(trace: EnergyTrace, window: tuple[float, float]) -> DecayFit:
    """Least-squares line on (log(1+t), log E); rate is the negated slope."""
    times, energies = _window_data(trace, window)
    slope, intercept, resid = _line_fit(np.log1p(times), np.log(energies))
    e0 = float(trace.energies[0])
    return DecayFit(
        model="polynomial",
        C=float(np.exp(intercept) / e0),
        rate=-slope,
        window=tuple(window),
        residual=resid,
    )


def classify_decay(
    trace: EnergyTrace, window: tuple[float, float] | None = None
) -> Classification:
    """Fit both models on the window and pick the lower log-residual.

    The winner must beat the competitor by a 10% margin; inside the margin
    the smaller residual still wins.  Returns "none" when the trace has not
    decayed by more than 1% at the window end.
    """
    if trace.times.size < 2:
        raise ParameterError("trace is too short to classify")
    win = default_window(trace) if window is None else window
    t1 = win[1]
    end_idx = int(np.searchsorted(trace.times, t1, side="right")) - 1
    end_idx = max(end_idx, 0)
    e0 = float(trace.energies[0])
    if e0 <= 0:
        raise DegenerateFitError("initial energy is nonpositive")
    if trace.energies[end_idx] / e0 > STALL_FRACTION:
        return Classification(label="none", window=tuple(win))
    exp_fit = fit_exponential(trace, win)
    poly_fit = fit_polynomial(trace, win)
    exp_fit = DecayFit(**{**exp_fit.__dict__, "alt_residual": poly_fit.residual})
    poly_fit = DecayFit(**{**poly_fit.__dict__, "alt_residual": exp_fit.residual})
    if exp_fit.residual <= (1.0 - CLASS_MARGIN) * poly_fit.residual:
        label = "exponential"
    elif poly_fit.residual <= (1.0 - CLASS_MARGIN) * exp_fit.residual:
        label = "polynomial"
    else:
        label = "exponential" if exp_fit.residual <= poly_fit.residual else "polynomial"
    return Classification(
        label=label, window=tuple(win), exponential=exp_fit, polynomial=poly_fit
    )
