import json

import pytest

from fracwave import ConfigError
from fracwave.harness import config_from_dict, load_config, run_experiment
from fracwave.harness.cli import main

SWEEP_CONFIG = {
    "grid": {"half_length": 8.0, "num_points": 128},
    "s_list": [1.0, 1.5, 2.0, 3.0],
    "damping": {
        "kind": "random_dense",
        "cell_width": 2.0,
        "bump_fraction": 0.4,
        "level": 1.0,
        "seed": 7,
    },
    "initial": {"kind": "random_band", "band": [0.0, 12.0], "seed": 5},
    "seed": 11,
    "time": {"final_time": 20.0, "dt": 0.02, "sample_every": 20},
}


class TestConfig:
    def test_unknown_top_level_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown key 'spam'"):
            config_from_dict({**SWEEP_CONFIG, "spam": 1})

    def test_empty_s_list_names_the_field(self):
        raw = dict(SWEEP_CONFIG)
        raw.pop("s_list", None)
        raw["s_list"] = []
        with pytest.raises(ConfigError) as err:
            config_from_dict(raw)
        assert "s_list" in err.value.fields

    def test_all_offending_fields_collected(self):
        raw = dict(SWEEP_CONFIG)
        raw["s_list"] = [-1.0]
        raw["time"] = {"final_time": -5.0, "dt": 0.0, "sample_every": 1}
        raw["damping"] = {"kind": "constant", "level": -2.0}
        with pytest.raises(ConfigError) as err:
            config_from_dict(raw)
        fields = err.value.fields
        assert "s_list[0]" in fields
        assert "time.final_time" in fields
        assert "time.dt" in fields
        assert "damping_list[0]" in fields

    def test_single_s_and_damping_promoted_to_lists(self):
        cfg = config_from_dict({**SWEEP_CONFIG, "s": 0.5})
        assert cfg.s_list[0] == 0.5
        assert len(cfg.damping_list) == 1

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps(SWEEP_CONFIG))
        cfg = load_config(path)
        assert cfg.s_list == [1.0, 1.5, 2.0, 3.0]


class TestRunExperiment:
    def test_sweep_writes_traces_report_and_figure(self, tmp_path):
        cfg = config_from_dict(SWEEP_CONFIG)
        bundle = run_experiment(cfg, tmp_path)
        assert bundle.ok
        traces = sorted(tmp_path.glob("trace_*.csv"))
        assert len(traces) == 4
        assert (tmp_path / "energy_overlay_d0.svg").exists()
        report = json.loads((tmp_path / "report.json").read_text())
        assert len(report["simulate"]) == 4
        for entry in report["simulate"]:
            assert entry["classification"] in ("exponential", "polynomial", "none")
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["exit_status"] == 0
        recorded = {o["path"] for o in manifest["outputs"]}
        assert "trace_s1_d0.csv" in recorded

    def test_rerun_is_byte_identical_on_tables(self, tmp_path):
        cfg = config_from_dict(SWEEP_CONFIG)
        run_experiment(cfg, tmp_path / "a")
        run_experiment(cfg, tmp_path / "b")
        for left in sorted((tmp_path / "a").glob("*.csv")):
            right = tmp_path / "b" / left.name
            assert left.read_bytes() == right.read_bytes()

    def test_rerun_same_directory_is_idempotent(self, tmp_path):
        cfg = config_from_dict(SWEEP_CONFIG)
        first = run_experiment(cfg, tmp_path)
        second = run_experiment(cfg, tmp_path)
        assert first.manifest["config_sha256"] == second.manifest["config_sha256"]

    def test_manifest_guards_against_foreign_overwrite(self, tmp_path):
        cfg = config_from_dict(SWEEP_CONFIG)
        run_experiment(cfg, tmp_path)
        other = config_from_dict({**SWEEP_CONFIG, "seed": 999})
        with pytest.raises(ConfigError, match="different config"):
            run_experiment(other, tmp_path)
        run_experiment(other, tmp_path, force=True)

    def test_failures_are_marked_and_partial_results_kept(self, tmp_path):
        # second damping profile cannot build on this grid: its zero
        # interval lies outside the domain
        raw = dict(SWEEP_CONFIG)
        raw.pop("damping")
        raw["s_list"] = [1.0]
        # validation would reject the second profile, so sneak it in after
        cfg = config_from_dict({**raw, "damping_list": [{"kind": "constant", "level": 1.0}]})
        cfg.damping_list.append({"kind": "gap", "zero_interval": [-40.0, -30.0], "level": 1.0})
        bundle = run_experiment(cfg, tmp_path)
        assert not bundle.ok
        assert (tmp_path / "trace_s1_d0.csv").exists()
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        statuses = {r["key"]: r["status"] for r in manifest["runs"]}
        assert statuses["trace_s1_d0"] == "ok"
        assert statuses["trace_s1_d1"] == "failed"
        assert manifest["exit_status"] == 1

    def test_parallel_workers_match_serial(self, tmp_path):
        cfg = config_from_dict(SWEEP_CONFIG)
        run_experiment(cfg, tmp_path / "serial")
        cfg2 = config_from_dict({**SWEEP_CONFIG, "workers": 2})
        run_experiment(cfg2, tmp_path / "parallel")
        for left in sorted((tmp_path / "serial").glob("*.csv")):
            right = tmp_path / "parallel" / left.name
            assert left.read_bytes() == right.read_bytes()

    def test_explicit_fit_window_flows_through(self, tmp_path):
        cfg = config_from_dict(
            {**SWEEP_CONFIG, "s_list": [1.0], "fit_window": {"t0": 5.0, "t1": 15.0}}
        )
        bundle = run_experiment(cfg, tmp_path)
        assert bundle.report["simulate"][0]["window"] == [5.0, 15.0]

    def test_json_format_tables(self, tmp_path):
        cfg = config_from_dict({**SWEEP_CONFIG, "s_list": [1.0]})
        run_experiment(cfg, tmp_path, fmt="json")
        table = json.loads((tmp_path / "trace_s1_d0.json").read_text())
        assert table["columns"] == ["t", "E"]
        assert len(table["rows"]) > 10


class TestCli:
    def test_sweep_subcommand(self, tmp_path):
        cfg_path = tmp_path / "config.json"
        cfg_path.write_text(json.dumps(SWEEP_CONFIG))
        out = tmp_path / "out"
        rc = main(["sweep", "--config", str(cfg_path), "--out", str(out)])
        assert rc == 0
        assert len(list(out.glob("trace_*.csv"))) == 4

    def test_simulate_runs_single_member(self, tmp_path):
        cfg_path = tmp_path / "config.json"
        cfg_path.write_text(json.dumps(SWEEP_CONFIG))
        out = tmp_path / "out"
        rc = main(["simulate", "--config", str(cfg_path), "--out", str(out)])
        assert rc == 0
        assert len(list(out.glob("trace_*.csv"))) == 1

    def test_fit_decay_on_written_trace(self, tmp_path):
        cfg_path = tmp_path / "config.json"
        cfg_path.write_text(json.dumps(SWEEP_CONFIG))
        out = tmp_path / "out"
        main(["simulate", "--config", str(cfg_path), "--out", str(out)])
        trace = next(out.glob("trace_*.csv"))
        fit_out = tmp_path / "fit"
        rc = main(["fit-decay", "--trace", str(trace), "--out", str(fit_out)])
        assert rc == 0
        report = json.loads((fit_out / "report.json").read_text())
        assert report["classification"] in ("exponential", "polynomial", "none")

    def test_config_error_returns_exit_code_two(self, tmp_path):
        cfg_path = tmp_path / "config.json"
        cfg_path.write_text(json.dumps({**SWEEP_CONFIG, "s_list": []}))
        rc = main(["sweep", "--config", str(cfg_path), "--out", str(tmp_path / "o")])
        assert rc == 2

    def test_analysis_subcommands_produce_reports(self, tmp_path):
        cfg_path = tmp_path / "config.json"
        cfg_path.write_text(json.dumps(SWEEP_CONFIG))
        for cmd, key in (
            ("lemma-verify", "lemma"),
            ("intervals", "intervals"),
            ("check-damping", "damping_check"),
            ("ls-constant", "ls_constant"),
            ("theorem2-demo", "gr_ratio"),
        ):
            out = tmp_path / cmd
            rc = main([cmd, "--config", str(cfg_path), "--out", str(out)])
            assert rc == 0, cmd
            report = json.loads((out / "report.json").read_text())
            assert key in report

    def test_resolvent_scan_subcommand(self, tmp_path):
        small = dict(SWEEP_CONFIG)
        small["s_list"] = [1.0]
        cfg_path = tmp_path / "config.json"
        cfg_path.write_text(json.dumps(small))
        out = tmp_path / "out"
        rc = main([
            "resolvent-scan", "--config", str(cfg_path), "--out", str(out),
            "--num-lambdas", "8",
        ])
        assert rc == 0
        table = (out / "resolvent_s1_d0.csv").read_text().splitlines()
        assert table[0] == "lambda,resolvent_norm"
        assert len(table) == 9
        constants = (out / "scalar_constant_s1_d0.csv").read_text().splitlines()
        assert constants[0] == "lambda,c"
        assert all(float(line.split(",")[1]) > 0 for line in constants[1:])
        sidecar = json.loads((out / "resolvent_s1_d0.meta.json").read_text())
        assert sidecar["s"] == 1.0
