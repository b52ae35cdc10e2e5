"""Parameter-sweep results and the shared log-log slope fit."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import StructuralError


@dataclass(eq=False)
class ScanResult:
    """(parameter, value) table with a fitted power-law exponent.

    ``exponent`` is the least-squares slope of log(value) against
    log(abscissa), where the abscissa is whatever transform of the
    parameter the producing scan documents (for resolvent scans 1+lambda,
    for interval growth lambda itself).  ``residual`` is the RMS of the
    log-space fit residuals.
    """

    parameters: np.ndarray
    values: np.ndarray
    exponent: float
    residual: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.parameters = np.asarray(self.parameters, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.parameters.shape != self.values.shape:
            raise StructuralError("parameters and values must have equal length")


def fit_loglog_slope(abscissa: np.ndarray, values: np.ndarray) -> tuple[float, float, float]:
    """Least-squares line through (log x, log y); returns (slope, intercept, rms).

    Requires strictly positive finite inputs.
    """
    x = np.asarray(abscissa, dtype=float)
    y = np.asarray(values, dtype=float)
    if x.shape != y.shape or x.size < 2:
        raise StructuralError("need at least two matched points for a slope fit")
    if np.any(~np.isfinite(x)) or np.any(~np.isfinite(y)) or np.any(x <= 0) or np.any(y <= 0):
        raise StructuralError("log-log fit needs positive finite data")
    lx = np.log(x)
    ly = np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid**2)))


def write_scan_csv(scan: ScanResult, path: str | Path, header: tuple[str, str] = ("param", "value")) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(header))
        for p, v in zip(scan.parameters, scan.values):
            writer.writerow([f"{p:.17g}", f"{v:.17g}"])
