"""Experiment configuration: one JSON document, strictly validated."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from ..damping import make_profile
from ..errors import ConfigError, ParameterError
from ..simulator import INITIAL_KINDS
from ..spectral import Grid

KNOWN_TASKS = (
    "simulate",
    "resolvent_scan",
    "damping_check",
    "ls_constant",
    "lemma",
    "intervals",
    "theorem2",
)

_TOP_KEYS = {
    "grid",
    "s",
    "s_list",
    "damping",
    "damping_list",
    "initial",
    "seed",
    "time",
    "fit_window",
    "out_dir",
    "tasks",
    "workers",
}
_GRID_KEYS = {"half_length", "num_points", "power_of_two"}
_TIME_KEYS = {"final_time", "dt", "sample_every"}
_WINDOW_KEYS = {"policy", "t0", "t1"}


@dataclass
class ExperimentConfig:
    grid: dict
    s_list: list[float]
    damping_list: list[dict]
    initial: dict
    seed: int = 0
    time: dict = field(default_factory=lambda: {"final_time": 40.0, "dt": 0.02, "sample_every": 10})
    fit_window: dict = field(default_factory=lambda: {"policy": "default"})
    out_dir: str | None = None
    tasks: list[str] = field(default_factory=lambda: ["simulate"])
    workers: int = 1

    def to_dict(self) -> dict:
        return {
            "grid": dict(self.grid),
            "s_list": list(self.s_list),
            "damping_list": [dict(d) for d in self.damping_list],
            "initial": dict(self.initial),
            "seed": self.seed,
            "time": dict(self.time),
            "fit_window": dict(self.fit_window),
            "out_dir": self.out_dir,
            "tasks": list(self.tasks),
            "workers": self.workers,
        }

    def sha256(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    def build_grid(self) -> Grid:
        g = dict(self.grid)
        return Grid(
            half_length=float(g["half_length"]),
            num_points=int(g["num_points"]),
            power_of_two=bool(g.get("power_of_two", True)),
        )

    def explicit_window(self) -> tuple[float, float] | None:
        if "t0" in self.fit_window and "t1" in self.fit_window:
            return (float(self.fit_window["t0"]), float(self.fit_window["t1"]))
        return None


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Build a config from a JSON-shaped dict, rejecting unknown keys."""
    problems: list[str] = []
    unknown = set(raw) - _TOP_KEYS
    for key in sorted(unknown):
        problems.append(f"unknown key '{key}'")
    if problems:
        raise ConfigError("; ".join(problems), fields=sorted(unknown))

    grid = dict(raw.get("grid", {"half_length": 16.0, "num_points": 256}))
    s_list = list(raw.get("s_list", []))
    if "s" in raw:
        s_list = [raw["s"]] + s_list
    if not s_list:
        s_list = []
    damping_list = [dict(d) for d in raw.get("damping_list", [])]
    if "damping" in raw:
        damping_list = [dict(raw["damping"])] + damping_list
    if not damping_list:
        damping_list = [{"kind": "constant", "level": 1.0}]
    cfg = ExperimentConfig(
        grid=grid,
        s_list=[float(s) for s in s_list],
        damping_list=damping_list,
        initial=dict(raw.get("initial", {"kind": "gaussian"})),
        seed=int(raw.get("seed", 0)),
        time=dict(raw.get("time", {"final_time": 40.0, "dt": 0.02, "sample_every": 10})),
        fit_window=dict(raw.get("fit_window", {"policy": "default"})),
        out_dir=raw.get("out_dir"),
        tasks=list(raw.get("tasks", ["simulate"])),
        workers=int(raw.get("workers", 1)),
    )
    validate(cfg)
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    with open(path) as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ConfigError("config must be a single JSON object")
    return config_from_dict(raw)


def validate(cfg: ExperimentConfig) -> None:
    """Collect every invalid field and raise once, naming all of them."""
    problems: list[str] = []
    fields: list[str] = []

    def bad(name: str, why: str) -> None:
        fields.append(name)
        problems.append(f"{name}: {why}")

    for key in set(cfg.grid) - _GRID_KEYS:
        bad(f"grid.{key}", "unknown key")
    grid = None
    try:
        grid = cfg.build_grid()
    except (ParameterError, KeyError, TypeError, ValueError) as exc:
        bad("grid", str(exc))

    if not cfg.s_list:
        bad("s_list", "must contain at least one fractional order")
    for i, s in enumerate(cfg.s_list):
        if not s > 0:
            bad(f"s_list[{i}]", f"must be positive, got {s}")

    if not cfg.damping_list:
        bad("damping_list", "must contain at least one damping descriptor")
    if grid is not None:
        for i, desc in enumerate(cfg.damping_list):
            d = dict(desc)
            kind = d.pop("kind", None)
            if kind is None:
                bad(f"damping_list[{i}]", "missing 'kind'")
                continue
            try:
                make_profile(kind, d, grid)
            except (ParameterError, TypeError, ValueError) as exc:
                bad(f"damping_list[{i}]", str(exc))

    if cfg.initial.get("kind") not in INITIAL_KINDS:
        bad("initial.kind", f"must be one of {INITIAL_KINDS}")

    for key in set(cfg.time) - _TIME_KEYS:
        bad(f"time.{key}", "unknown key")
    if float(cfg.time.get("final_time", 0.0)) <= 0:
        bad("time.final_time", "must be positive")
    if float(cfg.time.get("dt", 0.0)) <= 0:
        bad("time.dt", "must be positive")
    if int(cfg.time.get("sample_every", 1)) < 1:
        bad("time.sample_every", "must be >= 1")

    for key in set(cfg.fit_window) - _WINDOW_KEYS:
        bad(f"fit_window.{key}", "unknown key")
    policy = cfg.fit_window.get("policy", "default")
    if policy not in ("default", "explicit"):
        bad("fit_window.policy", f"must be 'default' or 'explicit', got {policy!r}")
    has_t0, has_t1 = "t0" in cfg.fit_window, "t1" in cfg.fit_window
    if policy == "explicit" and not (has_t0 and has_t1):
        bad("fit_window", "explicit policy needs both t0 and t1")
    if has_t0 != has_t1:
        bad("fit_window", "t0 and t1 must be given together")
    if has_t0 and has_t1:
        try:
            t0, t1 = float(cfg.fit_window["t0"]), float(cfg.fit_window["t1"])
            if not t0 < t1:
                bad("fit_window", f"needs t0 < t1, got [{t0}, {t1}]")
        except (TypeError, ValueError):
            bad("fit_window", "t0 and t1 must be numeric")

    for i, task in enumerate(cfg.tasks):
        if task not in KNOWN_TASKS:
            bad(f"tasks[{i}]", f"unknown task {task!r}; known: {KNOWN_TASKS}")
    if cfg.workers < 1:
        bad("workers", "must be >= 1")

    if problems:
        raise ConfigError("invalid config: " + "; ".join(problems), fields=fields)
