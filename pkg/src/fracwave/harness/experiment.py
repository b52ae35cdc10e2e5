"""Experiment orchestration: sweeps, report bundles, manifests.

A run executes the configured tasks for every (s, damping) pair, writes
delimited tables plus SVG figures into the output directory, and records
everything in ``manifest.json``.  Sub-run failures are caught and marked;
the bundle is only "ok" when every sub-run succeeded.  Reruns with the
same config are byte-identical on the delimited outputs; a manifest from
a different config blocks accidental overwrites.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import analysis, damping, resolvent, simulator
from ..errors import ConfigError
from ..spectral import Grid
from .config import ExperimentConfig
from .fitting import classify_decay
from . import plots

__version__ = "0.1.0"


@dataclass
class ReportBundle:
    out_dir: Path
    report: dict
    manifest: dict
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _atomic_write_text(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=path.suffix)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _table_text(header: tuple[str, ...], rows, fmt: str) -> str:
    if fmt == "json":
        payload = {"columns": list(header), "rows": [list(r) for r in rows]}
        return json.dumps(payload, indent=2) + "\n"
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in row))
    return "\n".join(lines) + "\n"


class _Bundle:
    """Accumulates outputs, hashes, and sub-run statuses for one experiment."""

    def __init__(self, out_dir: Path, fmt: str):
        self.out_dir = out_dir
        self.fmt = fmt
        self.outputs: list[dict] = []
        self.runs: list[dict] = []
        self.failures: list[dict] = []

    def table_path(self, stem: str) -> Path:
        ext = ".json" if self.fmt == "json" else ".csv"
        return self.out_dir / f"{stem}{ext}"

    def write_table(self, stem: str, header: tuple[str, ...], rows) -> Path:
        path = self.table_path(stem)
        text = _table_text(header, rows, self.fmt)
        _atomic_write_text(path, text)
        self.register(path)
        return path

    def write_json(self, name: str, payload: dict) -> Path:
        path = self.out_dir / name
        _atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
        self.register(path)
        return path

    def register(self, path: Path) -> None:
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        self.outputs.append({"path": path.name, "sha256": digest})

    def mark(self, task: str, key: str, error: Exception | None = None) -> None:
        entry = {"task": task, "key": key, "status": "ok" if error is None else "failed"}
        if error is not None:
            entry["error"] = f"{type(error).__name__}: {error}"
            self.failures.append(entry)
        self.runs.append(entry)


def _slug(value: float) -> str:
    return f"{value:g}".replace(".", "p").replace("-", "m")


def _simulate_member(member: dict) -> dict:
    """One sweep member: build, integrate, fit.  Top level for picklability.

    Takes only the pieces it needs so one bad damping descriptor cannot
    poison the other members of a sweep.
    """
    grid = Grid(
        half_length=float(member["grid"]["half_length"]),
        num_points=int(member["grid"]["num_points"]),
        power_of_two=bool(member["grid"].get("power_of_two", True)),
    )
    s = float(member["s"])
    di = int(member["damping_index"])
    profile = damping.profile_from_descriptor(member["damping"], grid)
    initial_desc = dict(member["initial"])
    kind = initial_desc.pop("kind")
    if kind == "random_band":
        initial_desc.setdefault("s", s)
        base_seed = int(initial_desc.get("seed", 0))
        initial_desc["seed"] = [int(member["seed"]), di, base_seed]
    state = simulator.make_initial(kind, initial_desc, grid)
    trace = simulator.simulate(
        state,
        profile,
        s,
        final_time=float(member["time"]["final_time"]),
        dt=float(member["time"]["dt"]),
        sample_every=int(member["time"].get("sample_every", 1)),
    )
    cls = classify_decay(trace, member.get("window"))
    fits = {}
    for name, f in (("exponential", cls.exponential), ("polynomial", cls.polynomial)):
        if f is not None:
            fits[name] = {"C": f.C, "rate": f.rate, "residual": f.residual}
    return {
        "s": s,
        "damping_index": di,
        "times": trace.times,
        "energies": trace.energies,
        "norm_pair": list(trace.initial_norm_pair),
        "damping_descriptor": trace.damping_descriptor,
        "meta": trace.meta,
        "classification": cls.label,
        "window": list(cls.window),
        "fits": fits,
    }


def _run_simulate(cfg: ExperimentConfig, bundle: _Bundle, report: dict) -> None:
    keys = [
        (si, di) for di in range(len(cfg.damping_list)) for si in range(len(cfg.s_list))
    ]
    members = {
        (si, di): {
            "grid": dict(cfg.grid),
            "s": cfg.s_list[si],
            "damping": dict(cfg.damping_list[di]),
            "damping_index": di,
            "initial": dict(cfg.initial),
            "time": dict(cfg.time),
            "seed": cfg.seed,
            "window": cfg.explicit_window(),
        }
        for (si, di) in keys
    }
    results: dict[tuple[int, int], dict] = {}
    errors: dict[tuple[int, int], Exception] = {}
    if cfg.workers > 1 and len(keys) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = {key: pool.submit(_simulate_member, members[key]) for key in keys}
            for key, fut in futures.items():
                try:
                    results[key] = fut.result()
                except Exception as exc:  # noqa: BLE001 - recorded in the manifest
                    errors[key] = exc
    else:
        for key in keys:
            try:
                results[key] = _simulate_member(members[key])
            except Exception as exc:  # noqa: BLE001 - recorded in the manifest
                errors[key] = exc

    sim_report = []
    for di in range(len(cfg.damping_list)):
        overlay = []
        labels = []
        for si in range(len(cfg.s_list)):
            key = (si, di)
            name = f"trace_s{_slug(cfg.s_list[si])}_d{di}"
            if key in errors:
                bundle.mark("simulate", name, errors[key])
                continue
            res = results[key]
            rows = list(zip(res["times"].tolist(), res["energies"].tolist()))
            bundle.write_table(name, ("t", "E"), rows)
            sidecar = {
                "s": res["s"],
                "damping": res["damping_descriptor"],
                "initial_norm_pair": res["norm_pair"],
                **res["meta"],
            }
            bundle.write_json(f"{name}.meta.json", sidecar)
            bundle.mark("simulate", name)
            trace = simulator.EnergyTrace(
                s=res["s"],
                times=res["times"],
                energies=res["energies"],
                initial_norm_pair=tuple(res["norm_pair"]),
                damping_descriptor=res["damping_descriptor"],
            )
            overlay.append(trace)
            labels.append(f"s={cfg.s_list[si]:g}")
            sim_report.append(
                {
                    "s": res["s"],
                    "damping": res["damping_descriptor"],
                    "trace": bundle.table_path(name).name,
                    "classification": res["classification"],
                    "window": res["window"],
                    "fits": res["fits"],
                    "initial_norm_pair": res["norm_pair"],
                }
            )
        if overlay:
            svg = bundle.out_dir / f"energy_overlay_d{di}.svg"
            plots.plot_energy_overlay(overlay, labels, svg)
            bundle.register(svg)
    report["simulate"] = sim_report


def _run_resolvent_scan(
    cfg: ExperimentConfig, bundle: _Bundle, report: dict, options: dict
) -> None:
    grid = cfg.build_grid()
    num = int(options.get("num_lambdas", 41))
    num_constants = int(options.get("num_constant_lambdas", 9))
    entries = []
    for di, desc in enumerate(cfg.damping_list):
        for s in cfg.s_list:
            name = f"resolvent_s{_slug(s)}_d{di}"
            try:
                profile = damping.profile_from_descriptor(desc, grid)
                gen = resolvent.assemble_generator(profile, s, grid)
                lams = resolvent.default_scan_band(gen, num)
                scan = resolvent.resolvent_scan(gen, lams)
                eps = max(profile.sup_norm / 10.0, 1e-12)
                omega_set = profile.samples >= eps
                const_lams = np.linspace(0.0, gen.omega_max / 2.0, num_constants)
                constants = [
                    resolvent.scalar_resolvent_constant(omega_set, s, lam, grid)
                    for lam in const_lams
                ]
            except Exception as exc:  # noqa: BLE001 - recorded in the manifest
                bundle.mark("resolvent_scan", name, exc)
                continue
            rows = list(zip(scan.parameters.tolist(), scan.values.tolist()))
            bundle.write_table(name, ("lambda", "resolvent_norm"), rows)
            bundle.write_table(
                f"scalar_constant_s{_slug(s)}_d{di}",
                ("lambda", "c"),
                list(zip(const_lams.tolist(), constants)),
            )
            bundle.write_json(
                f"{name}.meta.json",
                {
                    "s": s,
                    "damping": desc,
                    "half_length": grid.half_length,
                    "num_points": grid.num_points,
                    "exponent": scan.exponent,
                    "residual": scan.residual,
                    "observation_epsilon": eps,
                },
            )
            svg = bundle.out_dir / f"{name}.svg"
            plots.plot_loglog_scan(
                scan.parameters,
                scan.values,
                svg,
                xlabel="1 + lambda",
                ylabel="resolvent norm",
                title=f"s={s:g}",
                shift_param=1.0,
            )
            bundle.register(svg)
            bundle.mark("resolvent_scan", name)
            entries.append(
                {
                    "s": s,
                    "damping": desc,
                    "exponent": scan.exponent,
                    "residual": scan.residual,
                    "min_scalar_constant": float(np.min(constants)),
                    "table": bundle.table_path(name).name,
                }
            )
    report["resolvent_scan"] = entries


def _run_damping_check(
    cfg: ExperimentConfig, bundle: _Bundle, report: dict, options: dict
) -> None:
    grid = cfg.build_grid()
    num = int(options.get("num_radii", 12))
    entries = []
    for di, desc in enumerate(cfg.damping_list):
        name = f"damping_check_d{di}"
        try:
            profile = damping.profile_from_descriptor(desc, grid)
            radii = np.linspace(4 * grid.dx, grid.half_length / 2, num)
            eps = float(options.get("epsilon", max(profile.sup_norm / 10.0, 1e-12)))
            averages = [damping.window_average_infimum(profile, r) for r in radii]
            densities = [damping.level_set_density(profile, eps, r) for r in radii]
        except Exception as exc:  # noqa: BLE001
            bundle.mark("damping_check", name, exc)
            continue
        bundle.write_table(
            f"{name}_window_average", ("param", "value"), list(zip(radii.tolist(), averages))
        )
        bundle.write_table(
            f"{name}_level_density", ("param", "value"), list(zip(radii.tolist(), densities))
        )
        svg = bundle.out_dir / f"{name}.svg"
        plots.plot_curve(radii, averages, svg, "R", "inf window integral", title=desc["kind"])
        bundle.register(svg)
        bundle.mark("damping_check", name)
        entries.append(
            {
                "damping": desc,
                "epsilon": eps,
                "window_average_at_max_R": averages[-1],
                "level_density_at_max_R": densities[-1],
                "satisfies_window_condition": averages[-1] > 0,
            }
        )
    report["damping_check"] = entries


def _run_ls_constant(
    cfg: ExperimentConfig, bundle: _Bundle, report: dict, options: dict
) -> None:
    grid = cfg.build_grid()
    center = float(options.get("band_center", grid.xi_max / 4))
    half = float(options.get("band_half_width", 2.0))
    bands = [(-center - half, -center + half), (center - half, center + half)]
    entries = []
    for di, desc in enumerate(cfg.damping_list):
        name = f"ls_constant_d{di}"
        try:
            profile = damping.profile_from_descriptor(desc, grid)
            eps = float(options.get("epsilon", max(profile.sup_norm / 10.0, 1e-12)))
            mask = profile.samples >= eps
            c = analysis.ls_constant(mask, bands, grid)
        except Exception as exc:  # noqa: BLE001
            bundle.mark("ls_constant", name, exc)
            continue
        bundle.mark("ls_constant", name)
        entries.append(
            {
                "damping": desc,
                "epsilon": eps,
                "bands": [list(b) for b in bands],
                "sampling_constant": c,
            }
        )
    report["ls_constant"] = entries


def _run_lemma(cfg: ExperimentConfig, bundle: _Bundle, report: dict, options: dict) -> None:
    resolution = int(options.get("resolution", 4000))
    entries = []
    for s in cfg.s_list:
        name = f"lemma_s{_slug(s)}"
        try:
            inf = analysis.lemma1_infimum(s, resolution=resolution)
            d_s = analysis.power_difference_constant(s, resolution=resolution)
        except Exception as exc:  # noqa: BLE001
            bundle.mark("lemma", name, exc)
            continue
        bundle.mark("lemma", name)
        entries.append(
            {
                "s": s,
                "infimum": inf.value,
                "achieved_at": {"tau": inf.tau, "lambda": inf.lam},
                "power_difference_constant": d_s,
            }
        )
    report["lemma"] = entries


def _run_intervals(
    cfg: ExperimentConfig, bundle: _Bundle, report: dict, options: dict
) -> None:
    width = float(options.get("width", 0.5))
    lam_min = float(options.get("lam_min", 1.0))
    lam_max = float(options.get("lam_max", 1000.0))
    num = int(options.get("num_lambdas", 40))
    lams = np.geomspace(lam_min, lam_max, num)
    entries = []
    for s in cfg.s_list:
        name = f"intervals_s{_slug(s)}"
        try:
            label, scan = analysis.interval_growth_classification(s, width, lams)
        except Exception as exc:  # noqa: BLE001
            bundle.mark("intervals", name, exc)
            continue
        rows = list(zip(scan.parameters.tolist(), scan.values.tolist()))
        bundle.write_table(name, ("param", "value"), rows)
        svg = bundle.out_dir / f"{name}.svg"
        plots.plot_loglog_scan(
            scan.parameters, np.maximum(scan.values, 1e-300), svg,
            xlabel="lambda", ylabel="interval length", title=f"s={s:g} ({label})",
        )
        bundle.register(svg)
        bundle.mark("intervals", name)
        entries.append(
            {"s": s, "width": width, "classification": label, "slope": scan.exponent}
        )
    report["intervals"] = entries


def _run_theorem2(
    cfg: ExperimentConfig, bundle: _Bundle, report: dict, options: dict
) -> None:
    _run_intervals(cfg, bundle, report, options)
    grid = cfg.build_grid()
    num = int(options.get("num_radii", 16))
    entries = []
    for di, desc in enumerate(cfg.damping_list):
        name = f"gr_ratio_d{di}"
        try:
            profile = damping.profile_from_descriptor(desc, grid)
            radii = np.linspace(grid.xi_max / num, grid.xi_max, num)
            scan = analysis.vanishing_damping_ratio(
                profile, radii, options.get("envelope")
            )
        except Exception as exc:  # noqa: BLE001
            bundle.mark("theorem2", name, exc)
            continue
        rows = list(zip(scan.parameters.tolist(), scan.values.tolist()))
        bundle.write_table(name, ("param", "value"), rows)
        svg = bundle.out_dir / f"{name}.svg"
        plots.plot_curve(
            scan.parameters, scan.values, svg, "R", "||gamma g_R|| / ||g_R||",
            title=desc["kind"], logy=False,
        )
        bundle.register(svg)
        bundle.mark("theorem2", name)
        entries.append(
            {"damping": desc, "final_ratio": scan.values[-1], "max_ratio": float(np.max(scan.values))}
        )
    report["gr_ratio"] = entries


_TASK_RUNNERS = {
    "resolvent_scan": _run_resolvent_scan,
    "damping_check": _run_damping_check,
    "ls_constant": _run_ls_constant,
    "lemma": _run_lemma,
    "intervals": _run_intervals,
    "theorem2": _run_theorem2,
}


def run_experiment(
    cfg: ExperimentConfig,
    out_dir: str | Path,
    tasks: list[str] | None = None,
    task_options: dict | None = None,
    fmt: str = "csv",
    force: bool = False,
) -> ReportBundle:
    """Execute the configured tasks and write the report bundle.

    Deterministic given the config (CSV tables are byte-identical across
    reruns).  Raises ConfigError when the output directory already holds a
    manifest for a different config, unless ``force`` is set.
    """
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be 'csv' or 'json', got {fmt!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest_path = out / "manifest.json"
    if manifest_path.exists() and not force:
        try:
            previous = json.loads(manifest_path.read_text())
        except json.JSONDecodeError:
            previous = {}
        if previous.get("config_sha256") not in (None, cfg.sha256()):
            raise ConfigError(
                f"{out} holds results for a different config "
                "(config_sha256 mismatch); pass force=True / --force to overwrite"
            )

    bundle = _Bundle(out, fmt)
    report: dict = {}
    active = list(tasks) if tasks is not None else list(cfg.tasks)
    options = dict(task_options or {})

    for task in active:
        if task == "simulate":
            _run_simulate(cfg, bundle, report)
        elif task in _TASK_RUNNERS:
            _TASK_RUNNERS[task](cfg, bundle, report, options.get(task, options))
        else:
            raise ConfigError(f"unknown task {task!r}")

    bundle.write_json("report.json", report)
    import scipy

    manifest = {
        "package_version": __version__,
        "numpy_version": np.__version__,
        "scipy_version": scipy.__version__,
        "config": cfg.to_dict(),
        "config_sha256": cfg.sha256(),
        "tasks": active,
        "format": fmt,
        "outputs": sorted(bundle.outputs, key=lambda o: o["path"]),
        "runs": bundle.runs,
        "exit_status": 0 if not bundle.failures else 1,
    }
    _atomic_write_text(manifest_path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return ReportBundle(out, report, manifest, bundle.failures)


def fit_decay_file(
    trace_path: str | Path,
    out_dir: str | Path,
    window: tuple[float, float] | None = None,
    fmt: str = "csv",
) -> ReportBundle:
    """Fit both decay models to an existing trace CSV and report the winner."""
    trace = simulator.read_trace_csv(trace_path)
    cls = classify_decay(trace, window)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    bundle = _Bundle(out, fmt)
    payload = {
        "trace": str(trace_path),
        "classification": cls.label,
        "window": list(cls.window),
        "fits": {},
    }
    for name, f in (("exponential", cls.exponential), ("polynomial", cls.polynomial)):
        if f is not None:
            payload["fits"][name] = {"C": f.C, "rate": f.rate, "residual": f.residual}
    bundle.write_json("report.json", payload)
    svg = out / "fit_decay.svg"
    plots.plot_energy_overlay([trace], [Path(trace_path).stem], svg, title="Fitted trace")
    bundle.register(svg)
    bundle.mark("fit_decay", Path(trace_path).stem)
    manifest = {
        "package_version": __version__,
        "outputs": sorted(bundle.outputs, key=lambda o: o["path"]),
        "runs": bundle.runs,
        "exit_status": 0,
    }
    _atomic_write_text(out / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return ReportBundle(out, payload, manifest, bundle.failures)
