import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from paralog.extension import (ExtensionLayout, build_psi, contraction_violations, extend,
                               holder_transfer_check, nesting_gaps, omega_spec, omega_tilde_spec,
                               reflect, reflect_preimage, seam_jumps, write_extension,
                               zone_separation)
from paralog.families import generate_domain_family
from paralog.grid import GridFunction, read_pgf
from paralog.norms import sup_norm


@pytest.fixture(params=[1.0, 2.0, 0.5])
def layout(request):
    return ExtensionLayout(request.param)


def _on_omega(layout, fn, m=16, k=16):
    spec = omega_spec(layout, m, k)
    X, T = spec.mesh()
    return GridFunction(spec, fn(X, T) + 0.0 * X)


def _value_at(g, point):
    idx = tuple(int(round((c - lo) / h)) for c, (lo, _), h in zip(point, g.spec.domain,
                                                                   g.spec.spacing))
    assert np.allclose(g.spec.node(idx), point, atol=1e-12)
    return g.values[idx]


class TestLayout:
    def test_boxes(self):
        lay = ExtensionLayout(2.0)
        assert lay.omega == ((0.0, 1.0), (0.0, 2.0))
        assert lay.z1 == ((-0.25, 1.25), (-0.5, 2.5))
        assert lay.z2 == ((-0.75, 1.75), (-1.5, 3.5))
        assert lay.omega_tilde == ((-1.0, 2.0), (-2.0, 4.0))
        assert lay.nested()

    def test_nesting_gaps(self):
        gaps = nesting_gaps(ExtensionLayout(2.0))
        assert gaps == {"omega->z1": (0.25, 0.5), "z1->z2": (0.5, 1.0),
                        "z2->omega_tilde": (0.25, 0.5)}

    def test_zone_separation(self, layout):
        m = 16
        target = omega_tilde_spec(layout, m, m)
        sep = zone_separation(layout, target)
        assert sep[0][0] >= 0.25 and sep[1][0] >= layout.T / 4 - 1e-15
        assert sep[0][1] >= 0.25 - 1e-12 and sep[1][1] >= layout.T / 4 - 1e-12

    def test_rejects_bad_horizon(self):
        with pytest.raises(ValueError):
            ExtensionLayout(0.0)


class TestReflect:
    def test_space_example(self, layout):
        ft = reflect(_on_omega(layout, lambda x, t: x), layout)
        for t in (0.0, 0.5 * layout.T, layout.T):
            assert _value_at(ft, (-0.25, t)) == pytest.approx(0.25, abs=1e-15)
            assert _value_at(ft, (1.75, t)) == pytest.approx(0.25, abs=1e-15)

    def test_time_example(self, layout):
        ft = reflect(_on_omega(layout, lambda x, t: t, k=20), layout)
        got = _value_at(ft, (0.5, 1.9 * layout.T))
        assert got == pytest.approx(0.1 * layout.T, abs=1e-14)

    def test_constant(self, layout):
        ft = reflect(_on_omega(layout, lambda x, t: 3.0), layout)
        assert ft.spec.shape == (49, 49) and np.all(ft.values == 3.0)

    def test_preimage_consistency(self, rng):
        lay = ExtensionLayout(1.0)
        spec = omega_spec(lay, 8, 8)
        f = GridFunction(spec, rng.standard_normal(spec.shape))
        ft = reflect(f, lay)
        for idx in np.ndindex(ft.spec.shape):
            z = ft.spec.node(idx)
            assert ft.values[idx] == _value_at(f, reflect_preimage(z, lay))

    def test_preimage_examples(self):
        lay = ExtensionLayout(1.0)
        assert reflect_preimage((0.3, 0.4), lay) == (0.3, 0.4)
        assert reflect_preimage((-0.25, 0.5), lay) == (0.25, 0.5)
        with pytest.raises(ValueError):
            reflect_preimage((2.5, 0.5), lay)

    @given(st.floats(-1, 2), st.floats(-1, 2), st.floats(0, 1))
    def test_preimage_contracts(self, x, y, t):
        lay = ExtensionLayout(1.0)
        a, b = reflect_preimage((x, t), lay), reflect_preimage((y, t), lay)
        assert abs(a[0] - b[0]) <= abs(x - y) + 1e-12
        assert 0 <= a[0] <= 1 and 0 <= a[1] <= 1

    @pytest.mark.parametrize("m", [4, 16, 31])
    def test_index_contraction(self, m):
        assert contraction_violations(m) == 0

    def test_misaligned_grid(self, unit_periodic):
        with pytest.raises(ValueError):
            reflect(GridFunction(unit_periodic, np.zeros(unit_periodic.shape)),
                    ExtensionLayout(1.0))

    def test_seams(self, rng):
        lay = ExtensionLayout(1.0)
        f = generate_domain_family(omega_spec(lay, 32, 32), 1, 7)[0][1]
        for seam, interior in seam_jumps(f, lay).values():
            assert seam <= interior


class TestPsi:
    def test_plateau_and_support(self, layout):
        spec = omega_tilde_spec(layout, 32, 32)
        psi = build_psi(layout, spec).values
        z1 = spec.region_mask(layout.z1)
        z2_open = spec.region_mask(layout.z2, open_box=True)
        assert np.all(psi.values[z1] == 1.0)
        assert np.all(psi.values[~z2_open] == 0.0)
        assert np.all((psi.values >= 0) & (psi.values <= 1))
        mid = psi.values[spec.region_mask(((-0.5, -0.5), (0.5 * layout.T, 0.5 * layout.T)))]
        assert np.all((mid > 0) & (mid < 1))

    def test_seminorms_finite(self, layout):
        psi = build_psi(layout, omega_tilde_spec(layout, 32, 32))
        sx, st_ = psi.seminorms(0.5)
        assert 0 < sx < np.inf and 0 < st_ < np.inf

    def test_unresolved(self, layout):
        with pytest.raises(ValueError):
            build_psi(layout, omega_tilde_spec(layout, 1, 1))


class TestExtend:
    def test_restriction_is_exact(self, layout, rng):
        spec = omega_spec(layout, 16, 16)
        f = GridFunction(spec, rng.standard_normal(spec.shape))
        ext = extend(f, layout)
        # the Omega_T nodes sit at offset (2m, 2k) in the default target box
        assert np.array_equal(ext.values[32:49, 32:49], f.values)

    def test_zero_outside_outer_zone(self, layout, rng):
        spec = omega_spec(layout, 16, 16)
        ext = extend(GridFunction(spec, rng.standard_normal(spec.shape)), layout)
        assert np.all(ext.values[~ext.spec.region_mask(layout.z2, open_box=True)] == 0.0)

    def test_sup_bound(self, layout, rng):
        spec = omega_spec(layout, 16, 16)
        f = GridFunction(spec, rng.standard_normal(spec.shape))
        assert sup_norm(extend(f, layout)) == sup_norm(f)
        assert sup_norm(extend(_on_omega(layout, lambda x, t: 1.0), layout)) == 1.0

    def test_transfer_constant(self, layout):
        rep = holder_transfer_check(_on_omega(layout, lambda x, t: 2.0), 0.5, layout)
        assert rep.norm_in == 2.0
        assert rep.norm_out <= 2.0 * (1 + rep.psi_semi_x + rep.psi_semi_t) + 1e-12
        assert rep.ratio >= 1.0

    def test_transfer_zero(self, layout):
        rep = holder_transfer_check(_on_omega(layout, lambda x, t: 0.0), 0.5, layout)
        assert rep.norm_in == 0.0 and rep.norm_out == 0.0 and rep.ratio == 1.0

    def test_transfer_family_bracket(self):
        lay = ExtensionLayout(1.0)
        fam = generate_domain_family(omega_spec(lay, 32, 32), 20, 11)
        ratios = [holder_transfer_check(f, 0.5, lay).ratio for _, f in fam]
        assert all(np.isfinite(ratios)) and max(ratios) < 10 * min(ratios)

    def test_sidecar(self, tmp_path):
        import json

        lay = ExtensionLayout(1.0)
        f = _on_omega(lay, lambda x, t: np.cos(np.pi * x) * np.cos(np.pi * t))
        write_extension(tmp_path / "e.pgf", f, lay, 0.5)
        ext = read_pgf(tmp_path / "e.pgf")
        side = json.loads((tmp_path / "e.json").read_text())
        assert np.array_equal(ext.values, extend(f, lay).values)
        assert side["z1"] == [list(b) for b in lay.z1] and side["psi_semi_x"] > 0
