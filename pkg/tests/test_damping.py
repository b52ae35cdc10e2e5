import json

import numpy as np
import pytest

from fracwave import (
    Grid,
    ParameterError,
    level_set_density,
    make_profile,
    profile_from_descriptor,
    window_average_infimum,
)
from fracwave.damping import (
    read_profile_descriptor,
    write_profile_csv,
    write_profile_descriptor,
)

# 2L = 32 is a multiple of the bump period used below, so the periodic
# catalog profiles are exactly periodic on the torus.
GRID = Grid(16.0, 512)


def catalog():
    return [
        make_profile("constant", {"level": 1.0}, GRID),
        make_profile("periodic_bumps", {"period": 2.0, "duty": 0.5, "level": 1.0}, GRID),
        make_profile(
            "random_dense",
            {"cell_width": 2.0, "bump_fraction": 0.4, "level": 1.0, "seed": 5},
            GRID,
        ),
        make_profile("gap", {"zero_interval": (-2.0, 2.0), "level": 1.0}, GRID),
        make_profile("compact_support", {"support": (-3.0, 3.0), "level": 1.0}, GRID),
    ]


class TestMakeProfile:
    def test_constant(self):
        p = make_profile("constant", {"level": 1.0}, GRID)
        assert np.all(p.samples == 1.0)
        assert p.sup_norm == 1.0

    def test_gap_zero_inside_level_outside(self):
        p = make_profile("gap", {"zero_interval": (-1.0, 1.0), "level": 1.0}, GRID)
        assert p.samples[np.argmin(np.abs(GRID.x))] == 0.0
        assert p.samples[np.argmin(np.abs(GRID.x - GRID.half_length / 2))] == 1.0

    def test_periodic_bumps_duty_fraction(self):
        p = make_profile("periodic_bumps", {"period": 2.0, "duty": 0.5, "level": 1.0}, GRID)
        frac = np.mean(p.samples > 0)
        assert abs(frac - 0.5) <= 1.0 / GRID.num_points

    def test_random_dense_is_deterministic(self):
        params = {"cell_width": 2.0, "bump_fraction": 0.4, "level": 1.0, "seed": 9}
        a = make_profile("random_dense", params, GRID)
        b = make_profile("random_dense", params, GRID)
        np.testing.assert_array_equal(a.samples, b.samples)

    def test_random_dense_has_bump_in_every_cell(self):
        p = make_profile(
            "random_dense",
            {"cell_width": 2.0, "bump_fraction": 0.3, "level": 1.0, "seed": 1},
            GRID,
        )
        cells = GRID.num_points // 16
        per_cell = p.samples.reshape(16, cells)
        assert np.all(per_cell.max(axis=1) > 0)

    @pytest.mark.parametrize(
        "kind, params",
        [
            ("constant", {"level": -1.0}),
            ("periodic_bumps", {"period": 2.0, "duty": 0.0, "level": 1.0}),
            ("periodic_bumps", {"period": 2.0, "duty": 1.5, "level": 1.0}),
            ("periodic_bumps", {"period": -1.0, "duty": 0.5, "level": 1.0}),
            ("random_dense", {"cell_width": -1.0, "level": 1.0}),
            ("gap", {"zero_interval": (20.0, 30.0), "level": 1.0}),
            ("nonsense", {}),
        ],
    )
    def test_bad_params_rejected(self, kind, params):
        with pytest.raises(ParameterError):
            make_profile(kind, params, GRID)


class TestWindowAverage:
    def test_constant_profile_full_window(self):
        p = make_profile("constant", {"level": 1.0}, GRID)
        value = window_average_infimum(p, 1.0)
        assert abs(value - 2.0) <= GRID.dx + 1e-12

    def test_compact_support_vanishes_for_small_windows(self):
        p = make_profile("compact_support", {"support": (-2.0, 2.0), "level": 1.0}, GRID)
        assert window_average_infimum(p, 1.0) == 0.0

    def test_periodic_bumps_every_window_holds_one_unit(self):
        p = make_profile("periodic_bumps", {"period": 2.0, "duty": 0.5, "level": 1.0}, GRID)
        value = window_average_infimum(p, 1.0)
        assert abs(value - 1.0) <= 2 * GRID.dx

    def test_radius_out_of_range(self):
        p = make_profile("constant", {"level": 1.0}, GRID)
        with pytest.raises(ParameterError):
            window_average_infimum(p, 0.0)
        with pytest.raises(ParameterError):
            window_average_infimum(p, GRID.half_length * 2)


class TestLevelSetDensity:
    def test_constant_full_measure(self):
        p = make_profile("constant", {"level": 1.0}, GRID)
        value = level_set_density(p, 0.5, 1.0)
        assert abs(value - 2.0) <= GRID.dx + 1e-12

    def test_threshold_above_sup_is_empty(self):
        p = make_profile("constant", {"level": 1.0}, GRID)
        assert level_set_density(p, 1.5, 2.0) == 0.0

    def test_gap_longer_than_window_gives_zero(self):
        p = make_profile("gap", {"zero_interval": (-3.0, 3.0), "level": 1.0}, GRID)
        assert level_set_density(p, 0.5, 1.5) == 0.0


class TestDensityInequalities:
    @pytest.mark.parametrize("radius", [1.0, 2.0, 4.0])
    def test_two_sided_link_across_catalog(self, radius):
        # window integral <= sup * level measure + 2 R eps, and
        # eps * level measure <= window integral, both up to 2 dx sup
        for p in catalog():
            sup = p.sup_norm
            for eps in (sup / 10, sup / 4, sup / 2):
                avg = window_average_infimum(p, radius)
                dens = level_set_density(p, eps, radius)
                slack = 2 * GRID.dx * sup
                assert avg <= sup * dens + 2 * radius * eps + slack
                assert eps * dens <= avg + slack

    def test_monotone_in_radius(self):
        radii = [0.5, 1.0, 2.0, 4.0, 8.0]
        for p in catalog():
            avgs = [window_average_infimum(p, r) for r in radii]
            assert all(a <= b + 1e-12 for a, b in zip(avgs, avgs[1:]))
            dens = [level_set_density(p, p.sup_norm / 10, r) for r in radii]
            assert all(a <= b + 1e-12 for a, b in zip(dens, dens[1:]))


class TestSerialization:
    def test_csv_round_trip_values(self, tmp_path):
        p = make_profile("periodic_bumps", {"period": 2.0, "duty": 0.5, "level": 1.0}, GRID)
        path = tmp_path / "gamma.csv"
        write_profile_csv(p, path)
        rows = path.read_text().strip().splitlines()
        assert rows[0] == "x,gamma"
        assert len(rows) == GRID.num_points + 1
        x0, g0 = rows[1].split(",")
        assert float(x0) == GRID.x[0]
        assert float(g0) == p.samples[0]

    def test_descriptor_reconstruction(self, tmp_path):
        p = make_profile(
            "random_dense",
            {"cell_width": 2.0, "bump_fraction": 0.4, "level": 1.0, "seed": 5},
            GRID,
        )
        path = tmp_path / "gamma.json"
        write_profile_descriptor(p, path)
        q = read_profile_descriptor(path, GRID)
        np.testing.assert_array_equal(p.samples, q.samples)
        assert json.loads(path.read_text())["kind"] == "random_dense"

    def test_descriptor_requires_kind(self):
        with pytest.raises(ParameterError):
            profile_from_descriptor({"level": 1.0}, GRID)
