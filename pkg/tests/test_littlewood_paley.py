import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_trig
from paralog.grid import GridFunction, GridSpec, read_pgf
from paralog.littlewood_paley import (besov_norm, build_filter_bank, decompose,
                                      export_decomposition, lp_block, partition_residual,
                                      reconstruct, smooth_step, square_function, theta)

TWO_PI = 2 * math.pi


@pytest.fixture(scope="module")
def spec():
    # integer angular frequencies in x, rho(xi, 0) = |xi|
    return GridSpec.box(64, 16, (0, TWO_PI), (0, TWO_PI))


@pytest.fixture(scope="module")
def inh(spec):
    return build_filter_bank(spec, "inhomogeneous")


@pytest.fixture(scope="module")
def hom(spec):
    return build_filter_bank(spec, "homogeneous")


def _mode(spec, k):
    X, T = spec.mesh()
    return GridFunction(spec, np.cos(k * X) + 0 * T)


class TestProfile:
    def test_theta_plateaus(self):
        assert theta(0.0) == 1.0 and theta(1.0) == 1.0
        assert theta(2.0) == 0.0 and theta(7.0) == 0.0
        assert 0.0 < theta(1.5) < 1.0

    @given(st.floats(-2, 3))
    def test_step_symmetry(self, u):
        assert smooth_step(u) + smooth_step(1 - u) == pytest.approx(1.0, abs=1e-15)


class TestFilterBank:
    @pytest.mark.parametrize("mode", ["homogeneous", "inhomogeneous"])
    def test_partition_of_unity(self, spec, mode):
        inside, _ = partition_residual(build_filter_bank(spec, mode))
        assert inside <= 1e-10

    def test_large_anisotropic_box(self):
        bank = build_filter_bank(GridSpec.box(128, 64, (-4, 4), (-16, 16)), "homogeneous")
        assert partition_residual(bank)[0] <= 1e-10

    def test_origin(self, inh):
        assert inh.multiplier(0)[0, 0] == 1.0
        assert all(inh.multiplier(j)[0, 0] == 0.0 for j in inh.levels if j > 0)

    def test_annulus_support(self, hom):
        for j in hom.levels:
            m = hom.multiplier(j)
            outside = (hom.rho < 2.0 ** (j - 1)) | (hom.rho > 2.0 ** (j + 1))
            assert np.all(m[outside] == 0.0)
            assert np.all((m >= 0) & (m <= 1))

    def test_level_zero_profile(self, inh):
        m0 = inh.multiplier(0)
        assert np.all(m0[inh.rho <= 1] == 1.0) and np.all(m0[inh.rho >= 2] == 0.0)

    def test_needs_periodic_grid(self, unit_closed):
        with pytest.raises(ValueError):
            build_filter_bank(unit_closed)

    def test_unknown_level(self, inh):
        with pytest.raises(ValueError):
            inh.multiplier(99)


class TestBlocks:
    def test_zero(self, spec, inh):
        assert np.all(lp_block(GridFunction(spec, np.zeros(spec.shape)), inh, 2).values == 0)

    def test_single_mode_is_scaled(self, spec, hom):
        f = _mode(spec, 5)
        for j in hom.levels:
            scale = float(theta(5 / 2.0 ** j) - theta(5 / 2.0 ** (j - 1)))
            b = lp_block(f, hom, j).values
            assert np.max(np.abs(b - scale * f.values)) < 1e-12
        assert np.max(np.abs(lp_block(f, hom, 5).values)) < 1e-13

    def test_constant(self, spec, inh):
        f = GridFunction(spec, np.full(spec.shape, 2.5))
        d = decompose(f, inh).as_dict()
        assert np.allclose(d[0].values, 2.5, atol=1e-14)
        assert all(np.max(np.abs(d[j].values)) < 1e-14 for j in inh.levels if j > 0)

    def test_spectral_support(self, spec, hom, rng):
        f = random_trig(spec, rng, modes=6, kmax=12)
        for j, b in decompose(f, hom).blocks:
            e = np.abs(np.fft.rfftn(b.values)) ** 2
            out = (hom.rho < 2.0 ** (j - 1)) | (hom.rho > 2.0 ** (j + 1))
            assert e[out].sum() <= 1e-10 * max(e.sum(), 1e-300)

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(-5, 5), st.floats(-5, 5))
    def test_linearity(self, seed, a, c):
        spec = GridSpec.box(32, 16, (0, TWO_PI), (0, TWO_PI))
        bank = build_filter_bank(spec, "homogeneous")
        rng = np.random.default_rng(seed)
        u, v = rng.standard_normal((2, 32, 16))
        lhs = lp_block(GridFunction(spec, a * u + c * v), bank, 3).values
        rhs = a * lp_block(GridFunction(spec, u), bank, 3).values + \
            c * lp_block(GridFunction(spec, v), bank, 3).values
        assert np.max(np.abs(lhs - rhs)) <= 1e-12 * max(1.0, np.max(np.abs(rhs)))


class TestReconstruction:
    def test_inhomogeneous(self, spec, inh, rng):
        f = random_trig(spec, rng, modes=6, kmax=10)
        rec = reconstruct(decompose(f, inh)).values
        assert np.max(np.abs(rec - f.values)) <= 1e-8 * np.max(np.abs(f.values))

    def test_homogeneous_mean_zero(self, spec, hom, rng):
        f = random_trig(spec, rng, modes=6, kmax=10)
        g = f.values - f.values.mean()
        rec = reconstruct(decompose(GridFunction(spec, g), hom)).values
        assert np.max(np.abs(rec - g)) <= 1e-8 * np.max(np.abs(g))

    def test_homogeneous_loses_constants(self, spec, hom):
        rec = reconstruct(decompose(GridFunction(spec, np.full(spec.shape, 3.0)), hom))
        assert np.max(np.abs(rec.values)) < 1e-13

    def test_empty(self, spec, inh):
        with pytest.raises(ValueError):
            reconstruct(decompose(_mode(spec, 1), inh, levels=[]))


class TestBesov:
    def test_constant_and_zero(self, spec, inh):
        assert besov_norm(GridFunction(spec, np.full(spec.shape, -4.0)), inh, 0.5).value == \
            pytest.approx(4.0, rel=1e-13)
        assert besov_norm(GridFunction(spec, np.zeros(spec.shape)), inh, 0.5).value == 0.0

    def test_arg_max_tracks_frequency(self, spec, inh):
        levels = [besov_norm(_mode(spec, 2 ** k), inh, 0.5).level for k in range(1, 5)]
        assert levels == [1, 2, 3, 4]

    def test_needs_inhomogeneous(self, spec, hom):
        with pytest.raises(ValueError):
            besov_norm(_mode(spec, 3), hom, 0.5)


class TestSquareFunction:
    def test_single_level(self, spec, hom, rng):
        f = random_trig(spec, rng, kmax=8)
        s = square_function(f, hom, [2]).values
        assert np.array_equal(s, np.abs(lp_block(f, hom, 2).values))

    def test_zero(self, spec, hom):
        assert np.all(square_function(GridFunction(spec, np.zeros(spec.shape)), hom,
                                      [1, 2]).values == 0)

    def test_disjoint_modes(self, spec, hom):
        f = GridFunction(spec, _mode(spec, 2).values + _mode(spec, 16).values)
        s = square_function(f, hom, [1, 4]).values
        b1, b4 = lp_block(f, hom, 1).values, lp_block(f, hom, 4).values
        assert np.max(np.abs(s - np.hypot(b1, b4))) < 1e-13

    def test_weights(self, spec, hom):
        f = _mode(spec, 8)
        s = square_function(f, hom, [3], weight_exponent=-0.5).values
        assert np.max(np.abs(s - 2 ** -1.5 * np.abs(f.values))) < 1e-13

    def test_empty(self, spec, hom):
        with pytest.raises(ValueError):
            square_function(_mode(spec, 2), hom, [])


def test_export(tmp_path, spec, inh, rng):
    f = random_trig(spec, rng, kmax=8)
    export_decomposition(decompose(f, inh), tmp_path, inh, f)
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["levels"] == list(inh.levels) and man["mode"] == "inhomogeneous"
    assert man["partition_residual"] <= 1e-10 and man["reconstruction_error"] < 1e-12
    b2 = read_pgf(tmp_path / "block_j2.pgf")
    assert np.array_equal(b2.values, lp_block(f, inh, 2).values)
