"""Norms and seminorms on grid functions.

Hölder seminorms are discrete suprema over same-time (resp. same-place) node
pairs. Periodic grids measure minimum-image distances, so a periodic box
stands in for the whole space.

BMO uses parabolic cylinders ``{|x - x0| < r} x (t0 - r^2, t0 + r^2)`` with
radii on the dyadic ladder ``r = 2 h_x 2^m`` up to the spatial width of the
domain and centers on grid nodes. On non-periodic grids each cylinder is
intersected with the domain; on periodic grids it wraps, and radii whose
cylinder would overlap itself are dropped.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from . import kernels
from .grid import GridFunction

__all__ = [
    "HolderReport",
    "BmoReport",
    "NormReport",
    "SeminormScan",
    "CylinderScan",
    "sup_norm",
    "lp_norm",
    "holder_seminorm_x",
    "holder_seminorm_t",
    "holder_scan",
    "holder_norm",
    "HolderProfile",
    "AxisProfile",
    "axis_profile",
    "bmo_norm",
    "bmo_cylinders",
    "log_plus",
    "norm_report",
]

#: grids with at most this many nodes on an axis are scanned exhaustively
MAX_EXACT = 64


def _check_gamma(gamma: float) -> None:
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")


def sup_norm(f: GridFunction, region=None) -> float:
    """Max of ``|f|`` over the nodes of `region` (all nodes by default)."""
    if region is None:
        return float(np.max(np.abs(f.values)))
    mask = f.spec.region_mask(region)
    if not mask.any():
        raise ValueError(f"region {region} contains no grid node")
    return float(np.max(np.abs(f.values[mask])))


def lp_norm(f: GridFunction, p: int = 2, region=None) -> float:
    """Quadrature L^p norm for ``p`` in {1, 2}.

    Periodic grids use uniform cell weights ``h_x^n h_t``; closed grids use
    trapezoid weights so that constants integrate exactly.
    """
    if p not in (1, 2):
        raise ValueError(f"p must be 1 or 2, got {p}")
    w = f.spec.cell_weights()
    a = np.abs(f.values)
    if region is not None:
        mask = f.spec.region_mask(region)
        if not mask.any():
            raise ValueError(f"region {region} contains no grid node")
        w = np.where(mask, w, 0.0)
    if p == 1:
        return float(np.sum(w * a))
    return float(math.sqrt(np.sum(w * a * a)))


class SeminormScan(NamedTuple):
    value: float
    pair: tuple        # the two nodes achieving the sup (index tuples)
    exhaustive: bool


def _separations(npos: int, periodic: bool, max_exact: int) -> tuple[np.ndarray, bool]:
    top = npos // 2 if periodic else npos - 1
    if npos <= max_exact:
        return np.arange(1, top + 1, dtype=np.int64), True
    stride = max(1, -(-top // max_exact))
    seps = np.unique(np.concatenate([np.arange(1, max_exact + 1),
                                     np.arange(max_exact, top + 1, stride),
                                     [top]]))
    return seps[(seps >= 1) & (seps <= top)].astype(np.int64), False


class AxisProfile(NamedTuple):
    """Largest same-line difference for every scanned separation on one axis.

    Independent of the Hölder exponent, so one scan serves every ``gamma``.
    """
    axis: int
    h: float
    npos: int
    periodic: bool
    rows_shape: tuple
    seps: np.ndarray
    maxima: np.ndarray
    rows: np.ndarray
    cols: np.ndarray
    exhaustive: bool

    def scan(self, expo: float) -> SeminormScan:
        best, at = 0.0, -1
        for s, d in enumerate(self.seps):
            local = float(self.maxima[s])
            if local < 0.0:
                continue
            d = int(d)
            d_eff = min(d, self.npos - d) if self.periodic else d
            q = local / (float(d_eff) * self.h) ** expo
            if q > best:
                best, at = q, s
        if at < 0:
            return SeminormScan(0.0, (), self.exhaustive)
        d, i = int(self.seps[at]), int(self.cols[at])
        rest = np.unravel_index(int(self.rows[at]), self.rows_shape)
        a, b = list(rest), list(rest)
        a.insert(self.axis, i)
        b.insert(self.axis, (i + d) % self.npos)
        return SeminormScan(best, (tuple(int(x) for x in a), tuple(int(x) for x in b)),
                            self.exhaustive)


def axis_profile(f: GridFunction, axis: int, max_exact: int = MAX_EXACT) -> AxisProfile:
    spec = f.spec
    moved = np.moveaxis(f.values, axis, -1)
    rows_shape = moved.shape[:-1]
    v = np.ascontiguousarray(moved.reshape(-1, moved.shape[-1]))
    npos = v.shape[1]
    seps, exhaustive = _separations(npos, spec.periodic, max_exact)
    maxima, rows, cols = kernels.pair_maxima(v, spec.periodic, seps)
    return AxisProfile(axis, spec.spacing[axis], npos, spec.periodic, rows_shape, seps,
                       np.asarray(maxima), np.asarray(rows), np.asarray(cols), exhaustive)


def _scan_axis(f: GridFunction, axis: int, expo: float, max_exact: int) -> SeminormScan:
    return axis_profile(f, axis, max_exact).scan(expo)


def _min_image(d: np.ndarray, n: int, periodic: bool) -> np.ndarray:
    return np.minimum(np.abs(d), n - np.abs(d)) if periodic else np.abs(d)


def _scan_space_2d(f: GridFunction, gamma: float, max_exact: int) -> SeminormScan:
    # Euclidean spatial offsets (d1, d2) over a half-plane, vectorised over nodes.
    spec = f.spec
    n1, n2 = spec.shape[0], spec.shape[1]
    h1, h2 = spec.spacing[0], spec.spacing[1]
    exhaustive = n1 * n2 <= 32 * 32
    if spec.periodic:
        r1 = np.arange(0, n1 // 2 + 1)
        r2 = np.arange(-(n2 // 2) + 1, n2 // 2 + 1)
    else:
        r1 = np.arange(0, n1)
        r2 = np.arange(-(n2 - 1), n2)
    if not exhaustive:
        near = 8
        s1 = max(1, -(-r1.size // max_exact))
        s2 = max(1, -(-r2.size // max_exact))
        r1 = np.unique(np.concatenate([r1[np.abs(r1) <= near], r1[::s1]]))
        r2 = np.unique(np.concatenate([r2[np.abs(r2) <= near], r2[::s2]]))
    v = f.values
    best, pair = 0.0, ()
    for d1 in r1:
        for d2 in r2:
            if d1 == 0 and d2 <= 0:
                continue
            if spec.periodic:
                w = np.roll(np.roll(v, -d1, axis=0), -d2, axis=1)
                diff = np.abs(w - v)
            else:
                if d1 >= n1 or abs(d2) >= n2:
                    continue
                j_lo, j_hi = max(0, -d2), n2 - max(0, d2)
                a = v[: n1 - d1, j_lo:j_hi]
                b = v[d1:, j_lo + d2:j_hi + d2]
                diff = np.abs(b - a)
            e1 = _min_image(np.array(d1), n1, spec.periodic) * h1
            e2 = _min_image(np.array(d2), n2, spec.periodic) * h2
            dist = float(math.hypot(e1, e2))
            if dist == 0.0:
                continue
            flat = int(np.argmax(diff))
            local = float(diff.flat[flat])
            q = local / dist ** gamma
            if q > best:
                idx = np.unravel_index(flat, diff.shape)
                best = q
                pair = ((int(d1), int(d2)), tuple(int(x) for x in idx))
    return SeminormScan(best, pair, exhaustive)


def holder_scan(f: GridFunction, gamma: float, which: str = "x",
                max_exact: int = MAX_EXACT) -> SeminormScan:
    """Hölder seminorm scan with the pair achieving the sup.

    ``which="x"`` gives the exponent-`gamma` seminorm over same-time pairs,
    ``which="t"`` the exponent-``gamma/2`` seminorm over same-place pairs.
    Axes with at most `max_exact` nodes are scanned over every pair; longer
    axes scan every separation up to `max_exact` plus a strided set of larger
    separations (each separation over all base nodes).
    """
    _check_gamma(gamma)
    spec = f.spec
    if which == "t":
        if spec.shape[-1] < 2:
            raise ValueError("need at least two time nodes")
        return _scan_axis(f, spec.n, gamma / 2.0, max_exact)
    if which != "x":
        raise ValueError(f"which must be 'x' or 't', got {which!r}")
    if spec.n == 1:
        return _scan_axis(f, 0, gamma, max_exact)
    return _scan_space_2d(f, gamma, max_exact)


def holder_seminorm_x(f: GridFunction, gamma: float, max_exact: int = MAX_EXACT) -> float:
    return holder_scan(f, gamma, "x", max_exact).value


def holder_seminorm_t(f: GridFunction, gamma: float, max_exact: int = MAX_EXACT) -> float:
    return holder_scan(f, gamma, "t", max_exact).value


@dataclass(frozen=True)
class HolderReport:
    gamma: float
    sup_norm: float
    semi_x: float
    semi_t: float
    total: float


class HolderProfile:
    """Exponent-free part of the Hölder scans of `f`, reusable across ``gamma``.

    In one space dimension both seminorms reduce to per-separation maxima;
    with two spatial dimensions the space seminorm is rescanned per exponent.
    """

    def __init__(self, f: GridFunction, max_exact: int = MAX_EXACT):
        self.f = f
        self.max_exact = max_exact
        self.sup = sup_norm(f)
        self.time = axis_profile(f, f.spec.n, max_exact)
        self.space = axis_profile(f, 0, max_exact) if f.spec.n == 1 else None

    def norm(self, gamma: float) -> HolderReport:
        _check_gamma(gamma)
        if self.space is not None:
            sx = self.space.scan(gamma).value
        else:
            sx = _scan_space_2d(self.f, gamma, self.max_exact).value
        st = self.time.scan(gamma / 2.0).value
        return HolderReport(gamma, self.sup, sx, st, self.sup + sx + st)


def holder_norm(f: GridFunction, gamma: float, max_exact: int = MAX_EXACT) -> HolderReport:
    """Parabolic Hölder norm: sup norm plus space and time seminorms."""
    _check_gamma(gamma)
    return HolderProfile(f, max_exact).norm(gamma)


class CylinderScan(NamedTuple):
    radius: float
    half_width_x: int
    half_width_t: int
    stride_x: int
    stride_t: int


def _snap(q: float) -> float:
    r = round(q)
    return float(r) if abs(q - r) <= 1e-9 * max(1.0, abs(q)) else q


def _half_width(extent: float, h: float) -> int:
    # largest integer m with m * h < extent
    return max(0, int(math.ceil(_snap(extent / h))) - 1)


def bmo_cylinders(spec, max_dense: int = MAX_EXACT) -> list:
    """The scanned cylinder family: one :class:`CylinderScan` per radius."""
    hx, ht = spec.h_x, spec.h_t
    width = spec.lengths[0]
    nx, nt = spec.shape[0], spec.shape[-1]
    out = []
    r = 2.0 * hx
    while r <= width * (1 + 1e-12):
        a = _half_width(r, hx)
        b = _half_width(r * r, ht)
        if spec.periodic:
            if 2 * a + 1 > min(spec.shape[:-1]) or 2 * b + 1 > nt:
                break
        else:
            a = min(a, max(spec.shape[:-1]) - 1)
            b = min(b, nt - 1)
        sx = 1 if nx <= max_dense else max(1, a // 2)
        st = 1 if nt <= max_dense else max(1, b // 2)
        out.append(CylinderScan(r, a, b, sx, st))
        r *= 2.0
    return out


@dataclass(frozen=True)
class BmoReport:
    value: float
    worst_cylinder: tuple           # (center point, radius)
    cylinders_scanned: int
    scan: tuple = field(default=(), repr=False)


def _bmo_scan_nd(v, spec, cyl: CylinderScan):
    # generic path for two spatial dimensions: disk in x, interval in t
    a, b = cyl.half_width_x, cyl.half_width_t
    h1, h2 = spec.spacing[0], spec.spacing[1]
    d1 = np.arange(-a, a + 1)[:, None] * h1
    d2 = np.arange(-a, a + 1)[None, :] * h2
    disk = (d1 * d1 + d2 * d2) < cyl.radius * cyl.radius * (1 - 1e-12)
    mask = np.broadcast_to(disk[:, :, None], (2 * a + 1, 2 * a + 1, 2 * b + 1))
    mode = "wrap" if spec.periodic else "constant"
    kw = {} if spec.periodic else {"constant_values": np.nan}
    padded = np.pad(v, ((a, a), (a, a), (b, b)), mode=mode, **kw)
    best, where, count = 0.0, (0, 0, 0), 0
    st = (cyl.stride_x, cyl.stride_x, cyl.stride_t)
    for i in range(0, v.shape[0], st[0]):
        for j in range(0, v.shape[1], st[1]):
            for k in range(0, v.shape[2], st[2]):
                win = padded[i:i + 2 * a + 1, j:j + 2 * a + 1, k:k + 2 * b + 1][mask]
                win = win[~np.isnan(win)]
                dev = float(np.mean(np.abs(win - win.mean())))
                count += 1
                if dev > best:
                    best, where = dev, (i, j, k)
    return best, where, count


def bmo_norm(f: GridFunction, max_dense: int = MAX_EXACT) -> BmoReport:
    """Parabolic BMO seminorm: sup over scanned cylinders of the mean
    absolute deviation from the cylinder mean.

    Axes longer than `max_dense` use a center stride of half the cylinder
    half-width; the strides are recorded in ``report.scan``.
    """
    spec = f.spec
    cyls = bmo_cylinders(spec, max_dense)
    if not cyls:
        raise ValueError("domain too small to host a cylinder of radius 2 h_x")
    best, where, total = 0.0, (spec.node((0,) * spec.ndim), cyls[0].radius), 0
    v = np.ascontiguousarray(f.values)
    for cyl in cyls:
        if spec.n == 1:
            val, i, k, cnt = kernels.bmo_scan(v, cyl.half_width_x, cyl.half_width_t,
                                              cyl.stride_x, cyl.stride_t, spec.periodic)
            idx = (i, k)
        else:
            val, idx, cnt = _bmo_scan_nd(v, spec, cyl)
        total += cnt
        if val > best:
            best, where = float(val), (spec.node(idx), cyl.radius)
    return BmoReport(best, where, total, tuple(cyls))


def log_plus(s: float) -> float:
    """``log(e + s)``: at least 1 and increasing in ``s >= 0``."""
    if s < 0 or math.isnan(s):
        raise ValueError(f"log_plus needs s >= 0, got {s}")
    return math.log(math.e + s)


@dataclass(frozen=True)
class NormReport:
    l_inf: float
    l1: float
    l2: float
    semi_x: float
    semi_t: float
    holder: float
    bmo: float
    besov: float | None
    gamma: float
    label: str

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=False)


def norm_report(f: GridFunction, gamma: float, bank=None) -> NormReport:
    """All norms of `f`; the Besov entry needs an inhomogeneous filter bank."""
    from .littlewood_paley import besov_norm, build_filter_bank

    hr = holder_norm(f, gamma)
    besov = None
    if f.spec.periodic:
        if bank is None:
            bank = build_filter_bank(f.spec, "inhomogeneous")
        besov = besov_norm(f, bank, gamma).value
    return NormReport(hr.sup_norm, lp_norm(f, 1), lp_norm(f, 2), hr.semi_x, hr.semi_t,
                      hr.total, bmo_norm(f).value, besov, gamma, f.label)
