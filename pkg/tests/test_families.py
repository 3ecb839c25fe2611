import math

import numpy as np
import pytest

from paralog.extension import ExtensionLayout, omega_spec
from paralog.families import (FAMILY_KINDS, GridIncompatible, FamilySpec, generate_domain_family, generate_family,
                              generate_member, is_band_limited, member_seed, spatial_shells,
                              x_exponent)
from paralog.grid import GridSpec, spectral_derivative_x


@pytest.fixture(scope="module")
def box():
    return GridSpec.box(256, 256, (-4, 4), (-16, 16))


def test_member_seeds_are_distinct_and_stable():
    seeds = [member_seed(20240601, i) for i in range(200)]
    assert len(set(seeds)) == 200
    assert all(0 <= s < 2 ** 64 for s in seeds)
    assert seeds[7] == member_seed(20240601, 7)
    assert member_seed(1, 0) != member_seed(2, 0)


@pytest.mark.parametrize("kind", FAMILY_KINDS)
def test_determinism_and_checks(box, kind):
    fs = FamilySpec(kind, 3, 99)
    a, b = generate_family(fs, box), generate_family(fs, box)
    for m, n in zip(a, b):
        assert m.seed == n.seed
        assert m.g.values.tobytes() == n.g.values.tobytes()
        assert np.all(np.isfinite(m.f.values)) and is_band_limited(m.g)


@pytest.mark.parametrize("kind", [k for k in FAMILY_KINDS if k != "bump"])
def test_f_is_the_x_derivative(box, kind):
    m = generate_member(FamilySpec(kind, 1, 5), box, 0)
    d = spectral_derivative_x(m.g).values
    assert np.max(np.abs(d - m.f.values)) <= 1e-9 * max(1.0, np.max(np.abs(m.f.values)))


def test_single_mode_trig(box):
    fs = FamilySpec("trig-random", 1, 3, params={"modes": 1, "kstep": 1})
    m = generate_member(fs, box, 0)
    rng = np.random.default_rng(m.seed)
    ph, ps = rng.uniform(0, 2 * math.pi, size=2)
    X, T = box.mesh()
    om = 2 * math.pi / 8
    X, T = box.mesh()
    want = np.sin(om * X + ph) / om * np.cos(2 * math.pi / 32 * T + ps)
    assert np.max(np.abs(m.g.values - want)) < 1e-14


def test_holdout_is_disjoint(box):
    main = generate_family(FamilySpec("trig-random", 4, 1), box)
    hold = generate_family(FamilySpec("trig-random", 4, 1, start=4), box)
    assert not {m.seed for m in main} & {m.seed for m in hold}
    assert [m.index for m in hold] == [4, 5, 6, 7]


def test_lacunary_three_shells(box):
    m = generate_member(FamilySpec("lacunary", 1, 0, params={"depth": 3}), box, 0)
    base = int(math.floor(math.log2(2 * math.pi / 8)))
    assert spatial_shells(m.f) == [base + 1, base + 2, base + 3]


def test_bump_vanishes_on_boundary_ring(box):
    for m in generate_family(FamilySpec("bump", 5, 8), box):
        v = m.f.values
        for ring in (v[0], v[-1], v[:, 0], v[:, -1]):
            assert np.all(ring == 0.0)
        assert np.max(np.abs(v)) > 0


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
def test_holder_rough_exponent(alpha):
    spec = GridSpec.box(512, 128, (-4, 4), (-16, 16))
    fs = FamilySpec("holder-rough", 3, 17, params={"roughness": alpha})
    for m in generate_family(fs, spec):
        assert abs(x_exponent(m.f) - alpha) <= 0.1


def test_not_band_limited_is_rejected():
    spec = GridSpec.box(16, 16)
    X, T = spec.mesh()
    from paralog.grid import GridFunction
    assert not is_band_limited(GridFunction(spec, np.cos(2 * math.pi * 7 * X) + 0 * T))


def test_heat_noise_band_limited_on_coarse_grids():
    spec = GridSpec.box(64, 64, (-4, 4), (-16, 16))
    for m in generate_family(FamilySpec("heat-smoothed-noise", 4, 2), spec):
        assert is_band_limited(m.g)


def test_compact_bump_needs_a_fine_grid():
    with pytest.raises(GridIncompatible):
        generate_member(FamilySpec("bump", 1, 0), GridSpec.box(128, 128, (-4, 4), (-16, 16)), 0)


def test_rejects_bad_specs(box, unit_closed):
    with pytest.raises(ValueError):
        FamilySpec("nope")
    with pytest.raises(ValueError):
        FamilySpec("bump", 0)
    with pytest.raises(ValueError):
        generate_member(FamilySpec(), unit_closed, 0)


def test_domain_family():
    spec = omega_spec(ExtensionLayout(1.0), 32, 32)
    a = generate_domain_family(spec, 5, 4)
    b = generate_domain_family(spec, 3, 4, start=2)
    assert [s for s, _ in a[2:]] == [s for s, _ in b]
    assert all(np.array_equal(f.values, g.values) for (_, f), (_, g) in zip(a[2:], b))
    with pytest.raises(ValueError):
        generate_domain_family(GridSpec.box(8, 8), 1, 0)
