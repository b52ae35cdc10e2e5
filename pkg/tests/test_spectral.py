import numpy as np
import pytest

from fracwave import (
    Field,
    Grid,
    ParameterError,
    Spectrum,
    StructuralError,
    apply_bessel_multiplier,
    band_project,
    forward,
    inverse,
    sobolev_norm,
)
from fracwave.spectral import field_l2, multiplier_in_mode_basis, spectrum_l2


def random_field(grid, seed):
    rng = np.random.default_rng(seed)
    samples = rng.standard_normal(grid.num_points) + 1j * rng.standard_normal(
        grid.num_points
    )
    return Field(grid, samples)


@pytest.fixture
def grid():
    return Grid(np.pi, 64)


class TestGrid:
    def test_frequency_ladder(self, grid):
        assert grid.xi.shape == (64,)
        assert grid.xi[0] == -32.0
        assert grid.xi[-1] == 31.0
        assert grid.dx * grid.num_points == 2 * grid.half_length

    def test_rejects_odd_or_nonpositive(self):
        with pytest.raises(ParameterError):
            Grid(1.0, 63, power_of_two=False)
        with pytest.raises(ParameterError):
            Grid(-1.0, 64)
        with pytest.raises(ParameterError):
            Grid(1.0, 0)

    def test_power_of_two_default(self):
        with pytest.raises(ParameterError):
            Grid(1.0, 96)
        g = Grid(1.0, 96, power_of_two=False)
        assert g.num_points == 96

    def test_length_mismatch_is_structural(self, grid):
        with pytest.raises(StructuralError):
            Field(grid, np.zeros(32))
        with pytest.raises(StructuralError):
            Spectrum(grid, np.zeros(65))


class TestTransform:
    def test_constant_field_concentrates_at_zero(self, grid):
        spec = forward(Field(grid, np.ones(grid.num_points)))
        at_zero = spec.coefficients[np.argmin(np.abs(grid.xi))]
        rest = np.abs(spec.coefficients[grid.xi != 0])
        assert abs(at_zero) > 1.0
        assert np.max(rest) <= 1e-12 * abs(at_zero)

    def test_round_trip_identity(self, grid):
        f = random_field(grid, 1)
        back = inverse(forward(f))
        assert np.max(np.abs(back.samples - f.samples)) <= 1e-12 * np.max(
            np.abs(f.samples)
        )

    def test_parseval_on_seeded_fields(self, grid):
        for seed in range(100):
            f = random_field(grid, seed)
            a = field_l2(f)
            b = spectrum_l2(forward(f))
            assert abs(a - b) <= 1e-12 * a

    def test_single_mode_coefficient(self, grid):
        # e^{i xi0 x} with amplitude A lands on one ladder rung with weight
        # A * 2L / sqrt(2 pi)
        amp = 0.7 - 0.2j
        f = Field(grid, amp * np.exp(1j * 3 * grid.x))
        spec = forward(f)
        k = np.argmin(np.abs(grid.xi - 3))
        expected = amp * 2 * grid.half_length / np.sqrt(2 * np.pi)
        assert abs(spec.coefficients[k] - expected) <= 1e-12 * abs(expected)


class TestBesselMultiplier:
    def test_power_zero_is_identity(self, grid):
        spec = forward(random_field(grid, 2))
        out = apply_bessel_multiplier(spec, 0.0)
        np.testing.assert_array_equal(out.coefficients, spec.coefficients)

    def test_single_mode_power_two_scales_by_ten(self, grid):
        # (3^2 + 1)^{2/2} = 10
        coeffs = np.zeros(grid.num_points, dtype=complex)
        k = np.argmin(np.abs(grid.xi - 3))
        coeffs[k] = 1.0
        out = apply_bessel_multiplier(Spectrum(grid, coeffs), 2.0)
        assert out.coefficients[k] == pytest.approx(10.0, abs=1e-12)

    def test_inverse_power_round_trip(self, grid):
        spec = forward(random_field(grid, 3))
        out = apply_bessel_multiplier(apply_bessel_multiplier(spec, 1.3), -1.3)
        err = np.max(np.abs(out.coefficients - spec.coefficients))
        assert err <= 1e-12 * np.max(np.abs(spec.coefficients))

    def test_powers_compose_additively(self, grid):
        spec = forward(random_field(grid, 4))
        a = apply_bessel_multiplier(apply_bessel_multiplier(spec, 0.7), 1.8)
        b = apply_bessel_multiplier(spec, 2.5)
        err = np.max(np.abs(a.coefficients - b.coefficients))
        assert err <= 1e-12 * np.max(np.abs(b.coefficients))


class TestBandProject:
    def test_full_band_is_identity(self, grid):
        spec = forward(random_field(grid, 5))
        out = band_project(spec, [(-grid.xi_max, grid.xi_max)])
        np.testing.assert_array_equal(out.coefficients, spec.coefficients)

    def test_empty_band_list_gives_zero(self, grid):
        spec = forward(random_field(grid, 6))
        out = band_project(spec, [])
        assert np.all(out.coefficients == 0)

    def test_idempotent_exactly(self, grid):
        spec = forward(random_field(grid, 7))
        bands = [(-5.0, -2.0), (1.0, 9.5)]
        once = band_project(spec, bands)
        twice = band_project(once, bands)
        np.testing.assert_array_equal(once.coefficients, twice.coefficients)

    def test_self_adjoint_in_discrete_inner_product(self, grid):
        f = forward(random_field(grid, 8))
        g = forward(random_field(grid, 9))
        bands = [(-4.0, 6.0)]
        pf = band_project(f, bands)
        pg = band_project(g, bands)
        lhs = np.vdot(pf.coefficients, g.coefficients)
        rhs = np.vdot(f.coefficients, pg.coefficients)
        assert abs(lhs - rhs) <= 1e-12 * abs(lhs)

    def test_malformed_interval_rejected(self, grid):
        spec = forward(random_field(grid, 10))
        with pytest.raises(StructuralError):
            band_project(spec, [(2.0, 1.0)])


class TestSobolevNorm:
    def test_r_zero_is_l2(self, grid):
        f = random_field(grid, 11)
        assert sobolev_norm(f, 0.0) == pytest.approx(field_l2(f), rel=1e-12)

    def test_single_mode_closed_form(self, grid):
        # norm of A e^{i xi0 x} in H^r is (xi0^2+1)^{r/2} A sqrt(2L)
        amp = 1.3
        f = Field(grid, amp * np.exp(1j * 5 * grid.x))
        for r in (0.0, 0.5, 1.0, 2.0):
            expected = (5.0**2 + 1) ** (r / 2) * amp * np.sqrt(2 * grid.half_length)
            assert sobolev_norm(f, r) == pytest.approx(expected, rel=1e-12)

    def test_nondecreasing_in_r(self, grid):
        f = random_field(grid, 12)
        norms = [sobolev_norm(f, r) for r in (-1.0, 0.0, 0.5, 1.0, 2.0)]
        assert all(a <= b * (1 + 1e-12) for a, b in zip(norms, norms[1:]))

    def test_half_order_norm_equals_l2_of_half_operator(self, grid):
        # || u ||_{H^{s/2}} = || D^{s/2} u ||_{L2}
        f = random_field(grid, 13)
        for s in (0.5, 1.0, 2.0, 3.0):
            direct = sobolev_norm(f, s / 2)
            applied = spectrum_l2(apply_bessel_multiplier(forward(f), s / 2))
            assert direct == pytest.approx(applied, rel=1e-12)


class TestModeBasisMultiplier:
    def test_unit_weights_give_identity(self, grid):
        m = multiplier_in_mode_basis(grid, np.ones(grid.num_points))
        assert np.max(np.abs(m - np.eye(grid.num_points))) <= 1e-12

    def test_hermitian_for_real_weights(self, grid):
        rng = np.random.default_rng(14)
        m = multiplier_in_mode_basis(grid, rng.uniform(0, 2, grid.num_points))
        assert np.max(np.abs(m - m.conj().T)) <= 1e-12

    def test_matches_transform_round_trip(self, grid):
        # multiplication in sample space conjugated back to coefficients
        rng = np.random.default_rng(15)
        w = rng.uniform(0, 1, grid.num_points)
        m = multiplier_in_mode_basis(grid, w)
        spec = forward(random_field(grid, 16))
        via_matrix = m @ spec.coefficients
        multiplied = Field(grid, w * inverse(spec).samples)
        via_transform = forward(multiplied).coefficients
        assert np.max(np.abs(via_matrix - via_transform)) <= 1e-10 * np.max(
            np.abs(via_transform)
        )
