"""The invariant suite behind ``paralog selftest``.

Each check returns a :class:`Check` with the measured residuals next to the
tolerance it was held to. The 512 x 512 family work (reconstruction, split
bound, component ratios, constant stability) is computed once and shared.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .config import ExperimentConfig
from .experiments import map_ordered, theorem1_data, theorem2_data
from .extension import (ExtensionLayout, build_psi, contraction_violations, default_target,
                        extend, nesting_gaps, omega_spec, omega_tilde_spec,
                        seam_jumps, zone_separation)
from .families import generate_domain_family
from .grid import GridFunction, GridSpec
from .inequality import SplitAnalysis, get_bank, paper_constants, sharpness_probe
from .littlewood_paley import (besov_from_blocks, build_filter_bank, decompose,
                               partition_residual)
from .norms import bmo_norm, holder_seminorm_t, holder_seminorm_x
from .oracles import bmo_oracle, holder_oracle

__all__ = ["Check", "SelfTest", "run_selftest", "GAMMAS"]

GAMMAS = (0.3, 0.5, 0.7)

TOL_PARTITION = 1e-10
PARTITION_SECONDS = 5.0
TOL_RECONSTRUCT = 1e-8
TOL_BMO_ORACLE = 1e-12      # summation order differs from the oracle
TOL_SPLIT = 1e-9
TOL_CONSTANTS = 1e-12
TOL_BESOV = 1e-6
TOL_BRACKET = 0.10
TOL_STABLE = 0.05
TOL_SHARP_BAND = 3.0


@dataclass
class Check:
    criterion: int
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        vals = ", ".join(f"{k}={_fmt(v)}" for k, v in self.measured.items())
        return f"[{status}] {self.criterion}. {self.name} ({self.seconds:.1f}s): {vals}"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.4g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def _finite(*xs) -> bool:
    return all(math.isfinite(x) for x in xs)


class SelfTest:
    """Criteria 1-9 on the configured grid and family.

    Parameters
    ----------
    cfg : ExperimentConfig
        Grid, master seed and family size (50 members per family by default).
    """

    def __init__(self, cfg: ExperimentConfig | None = None):
        self.cfg = cfg or ExperimentConfig()
        self._main = None
        self._holdout = None

    # shared family work ----------------------------------------------

    def main_family(self) -> list:
        if self._main is None:
            self._main = theorem1_data(self.cfg, 0, self.cfg.seeds)
        return self._main

    def holdout_family(self) -> list:
        if self._holdout is None:
            self._holdout = theorem1_data(self.cfg, self.cfg.seeds, self.cfg.seeds)
        return self._holdout

    def _member_blocks(self):
        spec = self.cfg.grid()
        inh = get_bank(spec, "inhomogeneous")
        hom = get_bank(spec, "homogeneous")
        gamma = self.cfg.gamma

        def one(d):
            dec = decompose(d.f, inh)
            an = SplitAnalysis(d.f, d.g, gamma, hom, with_norms=False)
            return dec, an

        return map_ordered(one, self.main_family())

    # criteria --------------------------------------------------------

    def check_partition(self) -> Check:
        t0 = time.perf_counter()
        worst, sizes = 0.0, []
        for size in (128, 256, 512):
            spec = GridSpec.box(size, size, (self.cfg.x_min, self.cfg.x_max),
                                (self.cfg.t_min, self.cfg.t_max))
            for mode in ("inhomogeneous", "homogeneous"):
                inside, _ = partition_residual(build_filter_bank(spec, mode))
                worst = max(worst, inside)
            sizes.append(size)
        secs = time.perf_counter() - t0
        return Check(1, "filter-bank partition of unity", worst <= TOL_PARTITION
                     and secs <= PARTITION_SECONDS,
                     {"max_residual": worst, "grids": sizes, "runtime_s": secs})

    def check_reconstruction(self, blocks) -> Check:
        worst_inh = worst_hom = 0.0
        for d, (dec, an) in zip(self.main_family(), blocks):
            f = d.f.values
            scale = float(np.max(np.abs(f))) or 1.0
            inh = sum(b.values for _, b in dec.blocks)
            hom = sum(an.blocks.values())
            worst_inh = max(worst_inh, float(np.max(np.abs(inh - f))) / scale)
            centred = f - f.mean()
            worst_hom = max(worst_hom, float(np.max(np.abs(hom - centred))) / scale)
        ok = worst_inh <= TOL_RECONSTRUCT and worst_hom <= TOL_RECONSTRUCT
        return Check(2, "block reconstruction", ok,
                     {"functions": len(blocks), "inhomogeneous_rel": worst_inh,
                      "homogeneous_rel": worst_hom})

    def check_oracles(self, count: int = 25) -> Check:
        rng = np.random.default_rng(self.cfg.seed)
        grids = (GridSpec.box(32, 32, (0.0, 1.0), (0.0, 1.0)),
                 GridSpec(1, (32, 32), ((0.0, 1.0), (0.0, 1.0)), periodic=False))
        holder_mismatch = 0
        bmo_worst = 0.0
        for i in range(count):
            spec = grids[i % 2]
            f = GridFunction(spec, rng.standard_normal(spec.shape))
            for g in GAMMAS:
                holder_mismatch += holder_seminorm_x(f, g) != holder_oracle(f, g, "x")
                holder_mismatch += holder_seminorm_t(f, g) != holder_oracle(f, g, "t")
            fast, slow = bmo_norm(f).value, bmo_oracle(f)
            bmo_worst = max(bmo_worst, abs(fast - slow) / max(slow, 1e-300))
        return Check(3, "norm oracles", holder_mismatch == 0 and bmo_worst <= TOL_BMO_ORACLE,
                     {"functions": count, "holder_mismatches": int(holder_mismatch),
                      "bmo_max_rel_diff": bmo_worst})

    def check_split(self, blocks) -> Check:
        worst, failures, rows = -math.inf, 0, 0
        for _, an in blocks:
            for est in an.table(self.cfg.N_range):
                rows += 1
                slack = (est.lhs - est.bound - est.truncated) / max(1.0, est.lhs)
                worst = max(worst, slack)
                failures += not est.holds(TOL_SPLIT)
        return Check(4, "split-bound validity", failures == 0,
                     {"pairs": len(blocks), "rows": rows, "failures": failures,
                      "max_rel_excess": worst})

    def check_components(self, blocks) -> Check:
        gamma = self.cfg.gamma
        ratios, besov_excess, finite = [], -math.inf, True
        for d, (dec, an) in zip(self.main_family(), blocks):
            hol = d.profile.norm(gamma).total
            besov = besov_from_blocks(dec, gamma).value
            for est in an.table(self.cfg.N_range):
                r = (est.A1 / d.g_sup, est.A2 / d.bmo, est.A3 / hol)
                finite &= _finite(*r)
                besov_excess = max(besov_excess, (est.A3 - besov) / besov)
            ratios.append(besov / hol)
        half = len(ratios) // 2
        brackets = [max(max(rs), 1.0 / min(rs)) for rs in (ratios[:half], ratios[half:])]
        drift = abs(brackets[0] / brackets[1] - 1.0)
        ok = finite and besov_excess <= TOL_BESOV and drift <= TOL_BRACKET
        return Check(6, "component estimates", ok,
                     {"finite": finite, "A3_over_besov_excess": besov_excess,
                      "c_star": brackets, "bracket_drift": drift})

    def check_constants(self) -> Check:
        c, cp = paper_constants(0.5)
        c_direct = (1.0 / (2.0 ** (2 * 0.5) - 1.0)) ** 0.5
        cp_direct = 2.0 ** -0.5 / (1.0 - 2.0 ** -0.5)
        err = max(abs(c - c_direct), abs(cp - cp_direct), abs(c - 1.0),
                  abs(cp - (1.0 + math.sqrt(2.0))))
        return Check(5, "closed-form constants", err <= TOL_CONSTANTS,
                     {"c_gamma": c, "c_gamma_prime": cp, "max_abs_err": err})

    def check_extension(self, per_T: int = 8) -> Check:
        exact = psi_ok = seams_ok = True
        contraction = 0
        min_gap_x, min_gap_t = math.inf, math.inf
        m = self.cfg.omega_intervals
        contraction += contraction_violations(m)
        for T in (0.5, 1.0, 2.0):
            layout = ExtensionLayout(T, 1)
            spec = omega_spec(layout, m, m)
            target = default_target(layout, m, m)
            tilde = omega_tilde_spec(layout, m, m)
            psi = build_psi(layout, tilde).values
            in_z1 = tilde.region_mask(layout.z1)
            out_z2 = ~tilde.region_mask(layout.z2, open_box=True)
            psi_ok &= bool(np.all(psi.values[in_z1] == 1.0) and np.all(psi.values[out_z2] == 0.0))
            for sd, f in generate_domain_family(spec, per_T, self.cfg.seed):
                ext = extend(f, layout, target)
                exact &= bool(np.array_equal(ext.values[_restriction(target, spec)], f.values))
                for seam, interior in seam_jumps(f, layout).values():
                    seams_ok &= seam <= interior
            for pair, (gx, gt) in nesting_gaps(layout).items():
                min_gap_x = min(min_gap_x, gx)
                min_gap_t = min(min_gap_t, gt / T)
            for k, (gap, node_gap) in zone_separation(layout, target).items():
                lim = 0.25 if k == 0 else T / 4
                exact &= node_gap is None or node_gap >= lim - 1e-12
        geo = min_gap_x >= 0.25 and min_gap_t >= 0.25
        ok = exact and psi_ok and seams_ok and contraction == 0 and geo
        return Check(7, "extension correctness", ok,
                     {"restriction_exact": exact, "psi_plateau_support": psi_ok,
                      "seams": seams_ok, "contraction_violations": contraction,
                      "min_gap_x": min_gap_x, "min_gap_t_over_T": min_gap_t})

    def check_stability(self) -> Check:
        drifts, holds = {}, True
        main, hold = self.main_family(), self.holdout_family()
        for g in GAMMAS:
            a = [d.report(g, split=False) for d in main]
            b = [d.report(g, split=False) for d in hold]
            drifts[f"thm1_g{g}"], ok = _stable(a, b)
            holds &= ok
        cfg = self.cfg
        dom_a = theorem2_data(cfg, 0, cfg.seeds)
        dom_b = theorem2_data(cfg, cfg.seeds, cfg.seeds)
        for g in GAMMAS:
            a = [d.report(g, cfg.T) for d in dom_a]
            b = [d.report(g, cfg.T) for d in dom_b]
            drifts[f"thm2_g{g}"], ok = _stable(a, b)
            holds &= ok
        ok = holds and all(v <= TOL_STABLE for v in drifts.values())
        return Check(8, "implied-constant stability", ok,
                     {**drifts, "holdout_within_slack": holds})

    def check_sharpness(self) -> Check:
        rows = sharpness_probe(range(2, 7), self.cfg.grid(), self.cfg.gamma)
        growth = [r.inf_over_bmo for r in rows]
        ratio = [r.ratio for r in rows]
        increasing = all(b > a for a, b in zip(growth, growth[1:]))
        band = max(ratio) / min(ratio)
        return Check(9, "lacunary sharpness probe", increasing and band <= TOL_SHARP_BAND,
                     {"inf_over_bmo": growth, "ratio": ratio, "band": band})

    # driver ----------------------------------------------------------

    def run(self, log=None) -> list:
        out = []

        def timed(fn, *a):
            t0 = time.perf_counter()
            chk = fn(*a)
            chk.seconds = time.perf_counter() - t0
            out.append(chk)
            if log is not None:
                log(chk.line())
            return chk

        timed(self.check_partition)
        t0 = time.perf_counter()
        blocks = self._member_blocks()
        if log is not None:
            log(f"[info] shared family work: {len(blocks)} members "
                f"({time.perf_counter() - t0:.1f}s)")
        timed(self.check_reconstruction, blocks)
        timed(self.check_oracles)
        timed(self.check_split, blocks)
        timed(self.check_constants)
        timed(self.check_components, blocks)
        timed(self.check_extension)
        timed(self.check_stability)
        timed(self.check_sharpness)
        out.sort(key=lambda c: c.criterion)
        return out


def _restriction(target: GridSpec, spec: GridSpec):
    sl = []
    for k in range(spec.ndim):
        o = int(round((spec.domain[k][0] - target.domain[k][0]) / target.spacing[k]))
        sl.append(slice(o, o + spec.shape[k]))
    return tuple(sl)


def _stable(a: list, b: list) -> tuple:
    ca = max(r.implied_C for r in a)
    cb = max(r.implied_C for r in b)
    drift = abs(ca / cb - 1.0)
    holds = all(r.lhs <= (1 + TOL_STABLE) * ca * r.rhs_factor for r in b)
    return drift, holds


def run_selftest(cfg: ExperimentConfig | None = None, log=None) -> list:
    return SelfTest(cfg).run(log)
