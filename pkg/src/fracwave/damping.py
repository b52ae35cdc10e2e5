"""Damping profiles and the two density conditions they must satisfy.

A profile is a nonnegative sampled coefficient gamma on the periodic grid.
The two checkers measure, over all periodically wrapped windows of radius R,

* the infimum of the window integral of gamma, and
* the infimum of the measure of the level set {gamma >= eps} in the window.

Positivity of the first is the decay-equivalent condition; positivity of
the second is relative density of the level set.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParameterError, StructuralError
from .spectral import Grid

PROFILE_KINDS = ("constant", "periodic_bumps", "random_dense", "gap", "compact_support")


@dataclass(eq=False)
class DampingProfile:
    grid: Grid
    samples: np.ndarray
    descriptor: dict
    sup_norm: float

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.shape != (self.grid.num_points,):
            raise StructuralError("damping samples do not match the grid")
        if np.any(self.samples < 0):
            raise ParameterError("damping samples must be nonnegative")
        self.sup_norm = float(np.max(self.samples))


def _require_level(params: dict) -> float:
    level = float(params.get("level", 1.0))
    if level < 0:
        raise ParameterError(f"level must be nonnegative, got {level}")
    return level


def make_profile(kind: str, params: dict, grid: Grid) -> DampingProfile:
    """Build a catalog profile; deterministic given params (and seed).

    Kinds and their parameters:

    * constant: level
    * periodic_bumps: period, duty in (0, 1], level (pattern laid out from
      x = -L; exactly periodic on the torus when period divides 2L)
    * random_dense: cell_width, bump_fraction in (0, 1], level, seed (one
      bump per cell, so every window of radius >= cell width meets the
      support)
    * gap: zero_interval [a, b] inside [-L, L), level elsewhere
    * compact_support: support [a, b], level inside, zero elsewhere
    """
    x = grid.x
    L = grid.half_length
    params = dict(params)
    if kind == "constant":
        level = _require_level(params)
        samples = np.full(grid.num_points, level)
    elif kind == "periodic_bumps":
        level = _require_level(params)
        period = float(params.get("period", 2.0))
        duty = float(params.get("duty", 0.5))
        if period <= 0:
            raise ParameterError(f"period must be positive, got {period}")
        if not (0 < duty <= 1):
            raise ParameterError(f"duty must lie in (0, 1], got {duty}")
        phase = np.mod(x + L, period)
        samples = np.where(phase < duty * period, level, 0.0)
    elif kind == "random_dense":
        level = _require_level(params)
        cell_width = float(params.get("cell_width", L / 8))
        frac = float(params.get("bump_fraction", 0.3))
        seed = int(params.get("seed", 0))
        if cell_width <= 0 or cell_width > 2 * L:
            raise ParameterError(f"cell_width must lie in (0, 2L], got {cell_width}")
        if not (0 < frac <= 1):
            raise ParameterError(f"bump_fraction must lie in (0, 1], got {frac}")
        n_cells = max(1, int(round(2 * L / cell_width)))
        cell = 2 * L / n_cells
        rng = np.random.default_rng(seed)
        samples = np.zeros(grid.num_points)
        bump = frac * cell
        for i in range(n_cells):
            start = -L + i * cell + rng.uniform(0.0, cell - bump)
            samples[(x >= start) & (x < start + bump)] = level
        params["cell_width"] = cell
        params["seed"] = seed
    elif kind == "gap":
        level = _require_level(params)
        a, b = (float(v) for v in params.get("zero_interval", (-1.0, 1.0)))
        if not (-L <= a < b < L):
            raise ParameterError(f"zero_interval [{a}, {b}] must sit inside [-L, L)")
        samples = np.where((x >= a) & (x <= b), 0.0, level)
    elif kind == "compact_support":
        level = _require_level(params)
        a, b = (float(v) for v in params.get("support", (-1.0, 1.0)))
        if not (-L <= a < b < L):
            raise ParameterError(f"support [{a}, {b}] must sit inside [-L, L)")
        samples = np.where((x >= a) & (x <= b), level, 0.0)
    else:
        raise ParameterError(f"unknown profile kind {kind!r}")
    descriptor = {"kind": kind, **params}
    return DampingProfile(grid, samples, descriptor, float(np.max(samples)))


def profile_from_descriptor(descriptor: dict, grid: Grid) -> DampingProfile:
    d = dict(descriptor)
    kind = d.pop("kind", None)
    if kind is None:
        raise ParameterError("descriptor is missing 'kind'")
    return make_profile(kind, d, grid)


def _window_size(grid: Grid, radius: float) -> int:
    if not (0 < radius <= grid.half_length):
        raise ParameterError(
            f"window radius must lie in (0, {grid.half_length}], got {radius}"
        )
    m = int(np.floor(radius / grid.dx + 1e-12))
    return min(2 * m + 1, grid.num_points)


def _min_window_sum(values: np.ndarray, width: int) -> float:
    """Minimum over circular windows of ``width`` consecutive entries."""
    n = len(values)
    padded = np.concatenate([values, values[: width - 1]])
    cums = np.concatenate([[0.0], np.cumsum(padded)])
    sums = cums[width : width + n] - cums[:n]
    return float(np.min(sums))


def window_average_infimum(profile: DampingProfile, radius: float) -> float:
    """Infimum over window centers of the integral of gamma on [a-R, a+R].

    Windows wrap periodically and centers range over the grid points.  The
    result is zero exactly when some window contains only zero samples.
    """
    width = _window_size(profile.grid, radius)
    return _min_window_sum(profile.samples, width) * profile.grid.dx


def level_set_density(profile: DampingProfile, eps: float, radius: float) -> float:
    """Infimum over centers of the measure of {gamma >= eps} in [a-R, a+R]."""
    if eps <= 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    width = _window_size(profile.grid, radius)
    indicator = (profile.samples >= eps).astype(float)
    return _min_window_sum(indicator, width) * profile.grid.dx


def write_profile_csv(profile: DampingProfile, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "gamma"])
        for x, g in zip(profile.grid.x, profile.samples):
            writer.writerow([f"{x:.17g}", f"{g:.17g}"])


def write_profile_descriptor(profile: DampingProfile, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(profile.descriptor, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_profile_descriptor(path: str | Path, grid: Grid) -> DampingProfile:
    with open(path) as fh:
        return profile_from_descriptor(json.load(fh), grid)
