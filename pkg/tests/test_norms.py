import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_trig
from paralog.grid import GridFunction, GridSpec
from paralog.norms import (HolderProfile, bmo_cylinders, bmo_norm, holder_norm,
                           holder_seminorm_t, holder_seminorm_x, log_plus, lp_norm, norm_report,
                           sup_norm)
from paralog.oracles import bmo_oracle, holder_oracle


def _f(spec, fn):
    X, T = spec.mesh()
    return GridFunction(spec, fn(X, T) + 0.0 * X)


class TestSup:
    def test_constant(self, unit_periodic):
        assert sup_norm(_f(unit_periodic, lambda x, t: -3.0)) == 3.0

    def test_sine_peak(self):
        spec = GridSpec.box(64, 4)
        assert abs(sup_norm(_f(spec, lambda x, t: np.sin(2 * np.pi * x))) - 1.0) < 5e-3

    def test_single_node_region(self, unit_closed):
        f = _f(unit_closed, lambda x, t: x + 2 * t)
        assert sup_norm(f, ((0.5, 0.5), (0.25, 0.25))) == pytest.approx(1.0)

    def test_empty_region(self, unit_closed):
        with pytest.raises(ValueError):
            sup_norm(_f(unit_closed, lambda x, t: x), ((0.51, 0.52), (0.0, 1.0)))


class TestHolder:
    def test_constant_is_zero(self, unit_closed):
        f = _f(unit_closed, lambda x, t: 4.0)
        assert holder_seminorm_x(f, 0.4) == 0.0 and holder_seminorm_t(f, 0.4) == 0.0

    @pytest.mark.parametrize("gamma", [0.1, 0.5, 0.9])
    def test_linear_in_x(self, unit_closed, gamma):
        assert holder_seminorm_x(_f(unit_closed, lambda x, t: x), gamma) == pytest.approx(1.0,
                                                                                       abs=1e-12)

    def test_linear_in_t(self, unit_closed):
        f = _f(unit_closed, lambda x, t: t)
        assert holder_seminorm_t(f, 0.5) == pytest.approx(1.0, abs=1e-12)
        assert holder_seminorm_x(f, 0.5) == 0.0

    def test_norm_examples(self, unit_closed):
        assert holder_norm(_f(unit_closed, lambda x, t: 0.0), 0.5).total == 0.0
        assert holder_norm(_f(unit_closed, lambda x, t: 5.0), 0.5).total == 5.0
        assert holder_norm(_f(unit_closed, lambda x, t: x), 0.5).total == pytest.approx(2.0)

    def test_gamma_range(self, unit_closed):
        f = _f(unit_closed, lambda x, t: x)
        for bad in (0.0, 1.0, -0.2):
            with pytest.raises(ValueError):
                holder_norm(f, bad)

    def test_profile_matches_direct_scans(self, rng):
        spec = GridSpec.box(128, 128, (0, 2), (0, 4))
        f = random_trig(spec, rng, kmax=6)
        prof = HolderProfile(f)
        for g in (0.2, 0.5, 0.8):
            rep = prof.norm(g)
            assert rep.semi_x == holder_seminorm_x(f, g)
            assert rep.semi_t == holder_seminorm_t(f, g)

    @pytest.mark.parametrize("periodic", [True, False])
    @pytest.mark.parametrize("gamma", [0.25, 0.5, 0.75])
    def test_equals_pair_oracle(self, rng, periodic, gamma):
        spec = GridSpec(1, (32, 32), ((0, 1), (0, 2)), periodic) if periodic else \
            GridSpec(1, (32, 29), ((0, 1), (0, 2)), periodic)
        f = GridFunction(spec, rng.standard_normal(spec.shape))
        assert holder_seminorm_x(f, gamma) == holder_oracle(f, gamma, "x")
        assert holder_seminorm_t(f, gamma) == holder_oracle(f, gamma, "t")

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0.05, 0.95), st.floats(-10, 10))
    def test_homogeneity(self, seed, gamma, c):
        spec = GridSpec.box(16, 16)
        v = np.random.default_rng(seed).standard_normal(spec.shape)
        a = holder_norm(GridFunction(spec, v), gamma)
        b = holder_norm(GridFunction(spec, c * v), gamma)
        assert b.semi_x == pytest.approx(abs(c) * a.semi_x, rel=1e-12, abs=1e-300)
        assert b.semi_t == pytest.approx(abs(c) * a.semi_t, rel=1e-12, abs=1e-300)

    def test_two_space_dimensions(self):
        spec = GridSpec(2, (8, 8, 8), ((0, 1), (0, 1), (0, 1)), periodic=False)
        X, Y, T = spec.mesh()
        assert holder_seminorm_x(GridFunction(spec, X + 0 * Y + 0 * T), 0.5) == \
            pytest.approx(1.0, rel=1e-12)
        # the diagonal pair of corners gives 2 / sqrt(2)^(1/2)
        f = GridFunction(spec, X + Y + 0 * T)
        assert holder_seminorm_x(f, 0.5) == pytest.approx(2 ** 0.75, rel=1e-12)


class TestBMO:
    def test_constant(self, unit_periodic):
        assert bmo_norm(_f(unit_periodic, lambda x, t: 7.0)).value == 0.0

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(-100, 100))
    def test_translation_invariance(self, seed, c):
        spec = GridSpec.box(16, 16)
        v = np.random.default_rng(seed).standard_normal(spec.shape)
        a = bmo_norm(GridFunction(spec, v)).value
        b = bmo_norm(GridFunction(spec, v + c)).value
        assert b == pytest.approx(a, rel=1e-9, abs=1e-12)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_bounded_by_twice_sup(self, seed):
        spec = GridSpec.box(16, 16)
        f = GridFunction(spec, np.random.default_rng(seed).standard_normal(spec.shape))
        assert bmo_norm(f).value <= 2 * sup_norm(f)

    @pytest.mark.parametrize("periodic", [True, False])
    def test_equals_exhaustive_oracle(self, rng, periodic):
        spec = GridSpec(1, (32, 32), ((0, 1), (0, 0.25)), periodic)
        f = random_trig(spec, rng) if periodic else GridFunction(spec, rng.standard_normal((32, 32)))
        got, want = bmo_norm(f).value, bmo_oracle(f)
        assert abs(got - want) <= 1e-12 * max(1.0, want)

    def test_cylinder_family_is_dyadic(self):
        spec = GridSpec.box(256, 256, (0, 4), (0, 16))
        cyls = bmo_cylinders(spec)
        radii = [c.radius for c in cyls]
        assert radii[0] == 2 * spec.h_x
        assert all(b == 2 * a for a, b in zip(radii, radii[1:]))
        assert all(c.stride_x == max(1, c.half_width_x // 2) for c in cyls)
        assert all(2 * c.half_width_t + 1 <= 256 for c in cyls)

    def test_too_small(self):
        spec = GridSpec(1, (4, 4), ((0, 1), (0, 1e-6)), periodic=True)
        with pytest.raises(ValueError):
            bmo_norm(GridFunction(spec, np.zeros((4, 4))))


class TestLp:
    def test_constant_l1(self):
        spec = GridSpec(1, (17, 9), ((0, 1), (0, 1)), periodic=False)
        assert lp_norm(GridFunction(spec, np.ones(spec.shape)), 1) == pytest.approx(1.0, abs=1e-12)

    def test_sine_l2(self):
        spec = GridSpec.box(64, 4)
        f = _f(spec, lambda x, t: np.sin(2 * np.pi * x))
        assert abs(lp_norm(f, 2) - math.sqrt(0.5)) < 1e-10

    def test_scaling(self, rng, unit_periodic):
        f = random_trig(unit_periodic, rng)
        g = GridFunction(unit_periodic, -3 * f.values)
        for p in (1, 2):
            assert lp_norm(g, p) == pytest.approx(3 * lp_norm(f, p), rel=1e-13)

    def test_bad_p(self, unit_periodic):
        with pytest.raises(ValueError):
            lp_norm(_f(unit_periodic, lambda x, t: x), 3)


class TestLogPlus:
    def test_examples(self):
        assert log_plus(0.0) == 1.0
        assert log_plus(math.e ** 2 - math.e) == pytest.approx(2.0, rel=1e-15)

    @given(st.floats(0, 1e300), st.floats(0, 1e300))
    def test_monotone(self, a, b):
        lo, hi = sorted((a, b))
        assert 1.0 <= log_plus(lo) <= log_plus(hi)

    def test_negative(self):
        with pytest.raises(ValueError):
            log_plus(-1e-3)


def test_norm_report_json(unit_periodic, rng):
    import json

    rep = norm_report(random_trig(unit_periodic, rng), 0.5)
    d = json.loads(rep.to_json())
    assert set(d) >= {"l_inf", "l1", "l2", "semi_x", "semi_t", "holder", "bmo", "besov"}
    assert d["holder"] == pytest.approx(d["l_inf"] + d["semi_x"] + d["semi_t"])
