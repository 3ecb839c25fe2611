"""Symmetric extension of functions on ``Omega_T = (0,1)^n x (0,T)``.

``f`` is reflected evenly across ``x_i = 0`` and ``x_i = 1`` and then across
``t = 0`` and ``t = T``, giving ``f~`` on ``(-1,2)^n x (-T,2T)``. A smooth
plateau cutoff ``Psi`` (1 on ``Z1``, 0 off ``Z2``) localises it, and ``Psi f~``
is zero-padded into a periodic box for the full-space machinery.

Grids are closed (endpoints are nodes) and the extended grid has exactly
three times as many intervals per axis, so reflection is a pure index
permutation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grid import GridFunction, GridSpec, write_pgf
from .littlewood_paley import smooth_step
from .norms import holder_norm

__all__ = [
    "ExtensionLayout",
    "CutoffPsi",
    "TransferReport",
    "omega_spec",
    "omega_tilde_spec",
    "default_target",
    "fold_index",
    "reflect",
    "reflect_preimage",
    "plateau",
    "build_psi",
    "extend",
    "holder_transfer_check",
    "seam_jumps",
    "contraction_violations",
    "zone_separation",
    "nesting_gaps",
    "write_extension",
]


@dataclass(frozen=True)
class ExtensionLayout:
    T: float = 1.0
    n: int = 1

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"time horizon must be positive, got {self.T}")
        if self.n not in (1, 2):
            raise ValueError("only one or two spatial dimensions are supported")

    def _box(self, xs, ts):
        return tuple([xs] * self.n) + (ts,)

    @property
    def omega(self):
        return self._box((0.0, 1.0), (0.0, self.T))

    @property
    def omega_tilde(self):
        return self._box((-1.0, 2.0), (-self.T, 2.0 * self.T))

    @property
    def z1(self):
        T = self.T
        return self._box((-0.25, 1.25), (-T / 4, 5 * T / 4))

    @property
    def z2(self):
        T = self.T
        return self._box((-0.75, 1.75), (-3 * T / 4, 7 * T / 4))

    def nested(self) -> bool:
        boxes = [self.omega, self.z1, self.z2, self.omega_tilde]
        return all(outer[k][0] < inner[k][0] and inner[k][1] < outer[k][1]
                   for inner, outer in zip(boxes, boxes[1:])
                   for k in range(self.n + 1))


def omega_spec(layout: ExtensionLayout, m: int, k: int) -> GridSpec:
    """Closed grid on Omega_T with `m` space and `k` time intervals."""
    return GridSpec(layout.n, (m + 1,) * layout.n + (k + 1,), layout.omega, periodic=False)


def omega_tilde_spec(layout: ExtensionLayout, m: int, k: int) -> GridSpec:
    return GridSpec(layout.n, (3 * m + 1,) * layout.n + (3 * k + 1,), layout.omega_tilde,
                    periodic=False)


def default_target(layout: ExtensionLayout, m: int, k: int) -> GridSpec:
    """Periodic box ``[-2, 2)^n x [-2T, 2T)`` with the Omega_T spacing."""
    T = layout.T
    return GridSpec(layout.n, (4 * m,) * layout.n + (4 * k,),
                    ((-2.0, 2.0),) * layout.n + ((-2.0 * T, 2.0 * T),), periodic=True)


def _intervals(spec: GridSpec, layout: ExtensionLayout) -> tuple:
    if spec.periodic or spec.n != layout.n:
        raise ValueError("expected a closed grid on Omega_T")
    for got, want in zip(spec.domain, layout.omega):
        if not np.allclose(got, want, rtol=0, atol=1e-12):
            raise ValueError(f"grid domain {spec.domain} is not Omega_T {layout.omega}")
    return tuple(s - 1 for s in spec.shape)


def fold_index(p: np.ndarray, m: int) -> np.ndarray:
    """Reflect integer positions ``p`` in ``[-m, 2m]`` back into ``[0, m]``."""
    p = np.asarray(p)
    out = np.where(p < 0, -p, p)
    return np.where(out > m, 2 * m - out, out)


def reflect(f: GridFunction, layout: ExtensionLayout) -> GridFunction:
    """Even reflection of `f` from Omega_T onto the closed Omega~_T grid."""
    ints = _intervals(f.spec, layout)
    vals = f.values
    # spatial axes first, then time, as in the two-step construction
    for axis, m in enumerate(ints):
        idx = fold_index(np.arange(-m, 2 * m + 1), m)
        vals = np.take(vals, idx, axis=axis)
    spec = omega_tilde_spec(layout, ints[0], ints[-1])
    return GridFunction(spec, vals, f"reflect({f.label})")


def reflect_preimage(z, layout: ExtensionLayout) -> tuple:
    """Point of closed Omega_T whose value ``f~`` copies at `z`."""
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (layout.n + 1,):
        raise ValueError(f"expected a point with {layout.n + 1} coordinates")
    out = []
    for c, (lo, hi) in zip(z, layout.omega_tilde):
        if not lo - 1e-12 <= c <= hi + 1e-12:
            raise ValueError(f"point {tuple(z)} outside Omega~_T")
    for k, c in enumerate(z):
        top = layout.omega[k][1]
        c = -c if c < 0 else c
        c = 2 * top - c if c > top else c
        out.append(float(c))
    return tuple(out)


def plateau(x, inner: tuple, outer: tuple):
    """1-D bump: 1 on the closed `inner` interval, 0 outside open `outer`."""
    x = np.asarray(x, dtype=np.float64)
    left = smooth_step((x - outer[0]) / (inner[0] - outer[0]))
    right = smooth_step((outer[1] - x) / (outer[1] - inner[1]))
    return left * right


@dataclass(frozen=True)
class CutoffPsi:
    layout: ExtensionLayout
    values: GridFunction

    def seminorms(self, gamma: float) -> tuple:
        rep = holder_norm(self.values, gamma)
        return rep.semi_x, rep.semi_t


def build_psi(layout: ExtensionLayout, spec: GridSpec) -> CutoffPsi:
    """Tensor-product cutoff sampled on `spec`."""
    for k, ((lo, hi), (zlo, zhi)) in enumerate(zip(spec.domain, layout.z2)):
        if lo > zlo or hi < zhi:
            raise ValueError(f"grid axis {k} does not cover the outer zone")
        band = (layout.z1[k][0] - zlo)
        if band < 2 * spec.spacing[k]:
            raise ValueError(f"transition band on axis {k} is not resolved")
    vals = np.ones(spec.shape)
    for k in range(spec.ndim):
        prof = plateau(spec.axis(k), layout.z1[k], layout.z2[k])
        shp = [1] * spec.ndim
        shp[k] = spec.shape[k]
        vals = vals * prof.reshape(shp)
    return CutoffPsi(layout, GridFunction(spec, vals, "psi"))


def _offsets(src: GridSpec, dst: GridSpec) -> list:
    offs = []
    for k in range(src.ndim):
        if not np.isclose(src.spacing[k], dst.spacing[k], rtol=1e-12, atol=0):
            raise ValueError(f"target spacing differs on axis {k}")
        o = (src.domain[k][0] - dst.domain[k][0]) / dst.spacing[k]
        if abs(o - round(o)) > 1e-9:
            raise ValueError(f"target nodes not aligned on axis {k}")
        offs.append(int(round(o)))
    return offs


def extend(f: GridFunction, layout: ExtensionLayout, target: GridSpec | None = None) -> GridFunction:
    """``Psi f~`` zero-padded into the periodic `target` box."""
    ints = _intervals(f.spec, layout)
    if target is None:
        target = default_target(layout, ints[0], ints[-1])
    ftil = reflect(f, layout)
    psi = build_psi(layout, ftil.spec)
    prod = psi.values.values * ftil.values
    offs = _offsets(ftil.spec, target)
    out = np.zeros(target.shape)
    src_sl, dst_sl = [], []
    for k, o in enumerate(offs):
        lo = max(0, -o)
        hi = min(ftil.spec.shape[k], target.shape[k] - o)
        if hi <= lo:
            raise ValueError("target box misses the extension")
        src_sl.append(slice(lo, hi))
        dst_sl.append(slice(lo + o, hi + o))
    dropped = np.ones(prod.shape, dtype=bool)
    dropped[tuple(src_sl)] = False
    if np.any(prod[dropped] != 0.0):
        raise ValueError("target box cuts through the support of Psi f~")
    out[tuple(dst_sl)] = prod[tuple(src_sl)]
    return GridFunction(target, out, f"ext({f.label})")


@dataclass(frozen=True)
class TransferReport:
    norm_in: float
    norm_out: float
    ratio: float
    psi_semi_x: float
    psi_semi_t: float


def holder_transfer_check(f: GridFunction, gamma: float, layout: ExtensionLayout,
                          target: GridSpec | None = None) -> TransferReport:
    """Hölder norm of ``Psi f~`` on the big box against that of ``f``."""
    ext = extend(f, layout, target)
    n_in = holder_norm(f, gamma).total
    n_out = holder_norm(ext, gamma).total
    ratio = 1.0 if n_in == 0.0 else n_out / n_in
    psi = build_psi(layout, omega_tilde_spec(layout, f.spec.shape[0] - 1, f.spec.shape[-1] - 1))
    sx, st = psi.seminorms(gamma)
    return TransferReport(n_in, n_out, ratio, sx, st)


def seam_jumps(f: GridFunction, layout: ExtensionLayout) -> dict:
    """Per axis: largest jump of ``f~`` across the seams vs the largest
    nearest-neighbour difference of ``f`` itself."""
    ints = _intervals(f.spec, layout)
    ftil = reflect(f, layout).values
    out = {}
    for axis, m in enumerate(ints):
        d = np.abs(np.diff(ftil, axis=axis))
        # seams at positions m (p = 0) and 2m (p = m) of the extended axis
        seam = np.take(d, [m - 1, m, 2 * m - 1, 2 * m], axis=axis)
        interior = np.abs(np.diff(f.values, axis=axis))
        out[axis] = (float(seam.max()), float(interior.max()))
    return out


def contraction_violations(m: int) -> int:
    """Count same-time index pairs with ``|p - p'| < |fold(p) - fold(p')|``."""
    p = np.arange(-m, 2 * m + 1)
    fp = fold_index(p, m)
    lhs = np.abs(p[:, None] - p[None, :])
    rhs = np.abs(fp[:, None] - fp[None, :])
    return int(np.count_nonzero(lhs < rhs))


def zone_separation(layout: ExtensionLayout, target: GridSpec | None = None) -> dict:
    """Distance from Z2 to the complement of Omega~_T, per axis.

    Returns the exact box gap and, when `target` is given, the smallest
    same-line node distance between nodes inside Z2 and nodes outside
    Omega~_T.
    """
    out = {}
    for k in range(layout.n + 1):
        (zlo, zhi), (olo, ohi) = layout.z2[k], layout.omega_tilde[k]
        gap = min(zlo - olo, ohi - zhi)
        node_gap = None
        if target is not None:
            ax = target.axis(k)
            inside = ax[(ax > zlo) & (ax < zhi)]
            outside = ax[(ax <= olo) | (ax >= ohi)]
            if inside.size and outside.size:
                node_gap = float(np.min(np.abs(inside[:, None] - outside[None, :])))
        out[k] = (gap, node_gap)
    return out


def nesting_gaps(layout: ExtensionLayout) -> dict:
    """Per-axis gap between each box and the complement of the next one out:
    ``Omega_T -> Z1``, ``Z1 -> Z2`` and ``Z2 -> Omega~_T``."""
    boxes = {"omega": layout.omega, "z1": layout.z1, "z2": layout.z2,
             "omega_tilde": layout.omega_tilde}
    names = list(boxes)
    out = {}
    for inner, outer in zip(names, names[1:]):
        out[f"{inner}->{outer}"] = tuple(
            min(boxes[inner][k][0] - boxes[outer][k][0], boxes[outer][k][1] - boxes[inner][k][1])
            for k in range(layout.n + 1))
    return out


def write_extension(path, f: GridFunction, layout: ExtensionLayout, gamma: float,
                    target: GridSpec | None = None) -> GridFunction:
    """Write the extension as PGF with a JSON sidecar next to it."""
    ext = extend(f, layout, target)
    path = Path(path)
    write_pgf(path, ext)
    psi = build_psi(layout, reflect(f, layout).spec)
    sx, st = psi.seminorms(gamma)
    sidecar = {
        "T": layout.T,
        "omega": layout.omega,
        "omega_tilde": layout.omega_tilde,
        "z1": layout.z1,
        "z2": layout.z2,
        "psi_profile": {"kind": "tensor plateau", "step": "exp(-1/u) smooth step",
                        "plateau": layout.z1, "support": layout.z2},
        "gamma": gamma,
        "psi_semi_x": sx,
        "psi_semi_t": st,
        "target_domain": ext.spec.domain,
        "target_shape": ext.spec.shape,
    }
    path.with_suffix(".json").write_text(json.dumps(sidecar, indent=2))
    return ext
