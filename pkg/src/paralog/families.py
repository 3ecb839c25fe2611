"""Seeded generators of test functions ``(g, f = d g / d x_1)``.

Every member has its own 64-bit seed derived from a master seed and the
member index through :class:`numpy.random.SeedSequence`, so any single row of
an experiment can be regenerated on its own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import GridFunction, GridSpec, spectral_derivative_x

__all__ = [
    "FAMILY_KINDS",
    "FamilySpec",
    "FamilyMember",
    "member_seed",
    "generate_family",
    "generate_member",
    "generate_domain_family",
    "is_band_limited",
    "x_exponent",
    "spatial_shells",
    "envelope_width",
    "GridIncompatible",
]

FAMILY_KINDS = ("trig-random", "bump", "lacunary", "heat-smoothed-noise", "holder-rough")


class GridIncompatible(ValueError):
    """A generated member is not band-limited on the requested grid."""


def envelope_width(spec: GridSpec) -> float:
    """Width of the Gaussian time envelope: ``L_t / 16``, but at least
    ``8 h_t`` so its spectrum is below 1e-12 at half the Nyquist frequency."""
    return max(spec.lengths[-1] / 16, 8.0 * spec.h_t)


def member_seed(master: int, index: int) -> int:
    ss = np.random.SeedSequence(entropy=int(master), spawn_key=(int(index),))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(hi) << 32 | int(lo)


@dataclass(frozen=True)
class FamilySpec:
    kind: str = "trig-random"
    count: int = 50
    seed: int = 0
    start: int = 0          # index offset, so [start, start + count) are disjoint families
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.count < 1:
            raise ValueError("family needs at least one member")

    def param(self, key, default):
        return self.params.get(key, default)


@dataclass(frozen=True)
class FamilyMember:
    seed: int
    index: int
    g: GridFunction
    f: GridFunction


def _base_omega(spec: GridSpec) -> float:
    return 2.0 * math.pi / spec.lengths[0]


def _envelope_t(spec: GridSpec, rng, width=None):
    lt = spec.lengths[-1]
    t0 = spec.domain[-1][0] + lt / 2
    w = envelope_width(spec) if width is None else width
    shift = rng.uniform(-lt / 16, lt / 16)
    return lambda t: np.exp(-((t - t0 - shift) / w) ** 2)


def _trig_random(spec, rng, fs):
    # mode j: spatial frequency j * kstep * w_x, time frequency j * qstep * w_t,
    # amplitude j^-decay, uniform random phases. Only the phases are random,
    # which keeps the family maximum of the implied constant seed-stable.
    modes = int(fs.param("modes", 3))
    kstep = int(fs.param("kstep", 2))
    qstep = int(fs.param("qstep", 1))
    decay = float(fs.param("decay", 1.0))
    om_x = _base_omega(spec)
    om_t = 2.0 * math.pi / spec.lengths[-1]
    X, T = spec.mesh()[0], spec.mesh()[-1]
    f = np.zeros(spec.shape)
    g = np.zeros(spec.shape)
    for j in range(1, modes + 1):
        a = j ** -decay
        ph, ps = rng.uniform(0, 2 * math.pi, size=2)
        kap = j * kstep * om_x
        w = np.cos(j * qstep * om_t * T + ps)
        f += a * np.cos(kap * X + ph) * w
        g += a / kap * np.sin(kap * X + ph) * w
    return g, f


def _bump(spec, rng, fs):
    # compactly supported cos^(2p) bump; f is the exact x-derivative
    p = int(fs.param("power", 8))
    lx, lt = spec.lengths[0], spec.lengths[-1]
    wx = rng.uniform(0.15, 0.25) * lx
    wt = rng.uniform(0.15, 0.25) * lt
    cx = spec.domain[0][0] + lx / 2 + rng.uniform(-0.1, 0.1) * lx
    ct = spec.domain[-1][0] + lt / 2 + rng.uniform(-0.1, 0.1) * lt
    amp = rng.uniform(0.5, 1.5)
    X, T = spec.mesh()[0], spec.mesh()[-1]
    ux = np.clip((X - cx) / wx, -1, 1) * (math.pi / 2)
    ut = np.clip((T - ct) / wt, -1, 1) * (math.pi / 2)
    # cos(pi/2) is not exactly 0 in floating point; zero the complement explicitly
    inside = (np.abs(ux) < math.pi / 2) & (np.abs(ut) < math.pi / 2)
    bt = np.cos(ut) ** (2 * p)
    g = amp * np.cos(ux) ** (2 * p) * bt
    f = amp * (-2 * p) * np.cos(ux) ** (2 * p - 1) * np.sin(ux) * (math.pi / 2 / wx) * bt
    return np.where(inside, g, 0.0), np.where(inside, f, 0.0)


def _lacunary(spec, rng, fs):
    M = int(fs.param("depth", 3))
    om0 = float(fs.param("omega0", _base_omega(spec)))
    X, T = spec.mesh()[0], spec.mesh()[-1]
    w = _envelope_t(spec, rng)(T)
    f = np.zeros(spec.shape)
    g = np.zeros(spec.shape)
    for k in range(1, M + 1):
        om = 2 ** k * om0
        ph = rng.uniform(0, 2 * math.pi) if fs.param("random_phase", False) else 0.0
        f += np.cos(om * X + ph)
        g += np.sin(om * X + ph) / om
    return g * w, f * w


def _heat_noise(spec, rng, fs):
    sx = float(fs.param("smoothing_x", 0.004))
    st = float(fs.param("smoothing_t", 0.06))
    noise = rng.standard_normal(spec.shape)
    coef = np.fft.rfftn(noise)
    freqs = [2 * math.pi * np.fft.fftfreq(n, d=h) for n, h in zip(spec.shape[:-1], spec.spacing[:-1])]
    tau = 2 * math.pi * np.fft.rfftfreq(spec.shape[-1], d=spec.spacing[-1])
    grids = np.meshgrid(*freqs, tau, indexing="ij")
    xsq = sum(q * q for q in grids[:-1])
    heat = np.exp(-sx * xsq - st * grids[-1] ** 2)
    # hard cut at half the Nyquist index on every axis, so the member is
    # band-limited whatever the grid resolution
    for ax, n in enumerate(spec.shape):
        k = np.abs(np.fft.fftfreq(n) * n) if ax < spec.ndim - 1 else np.fft.rfftfreq(n) * n
        shp = [1] * heat.ndim
        shp[ax] = k.size
        heat = heat * (k <= n / 4).reshape(shp)
    g = np.fft.irfftn(coef * heat, s=spec.shape, axes=tuple(range(len(spec.shape))))
    g -= g.mean()
    g /= np.max(np.abs(g))
    gf = GridFunction(spec, g)
    return g, spectral_derivative_x(gf).values


def _holder_rough(spec, rng, fs):
    # random-phase Weierstrass-type sum with x-increments ~ |dx|^alpha
    alpha = float(fs.param("roughness", 0.5))
    om0 = _base_omega(spec)
    kmax = int(fs.param("kmax", spec.shape[0] // 4))
    X, T = spec.mesh()[0], spec.mesh()[-1]
    w = _envelope_t(spec, rng)(T)
    f = np.zeros(spec.shape)
    g = np.zeros(spec.shape)
    for k in range(1, kmax + 1):
        ph = rng.uniform(0, 2 * math.pi)
        a = k ** (-(alpha + 0.5))
        om = k * om0
        f += a * np.cos(om * X + ph)
        g += a / om * np.sin(om * X + ph)
    scale = 1.0 / np.max(np.abs(f))
    return g * w * scale, f * w * scale


_GENERATORS = {
    "trig-random": _trig_random,
    "bump": _bump,
    "lacunary": _lacunary,
    "heat-smoothed-noise": _heat_noise,
    "holder-rough": _holder_rough,
}


def generate_member(fs: FamilySpec, spec: GridSpec, index: int) -> FamilyMember:
    if not spec.periodic:
        raise ValueError("families live on periodic grids")
    seed = member_seed(fs.seed, index)
    rng = np.random.default_rng(seed)
    g, f = _GENERATORS[fs.kind](spec, rng, fs)
    label = f"{fs.kind}#{index}"
    gg = GridFunction(spec, g, f"g:{label}")
    ff = GridFunction(spec, f, f"f:{label}")
    if not is_band_limited(gg):
        raise GridIncompatible(f"member {index} of {fs.kind} is not band-limited on this grid")
    return FamilyMember(seed, index, gg, ff)


def generate_family(fs: FamilySpec, spec: GridSpec) -> list:
    """Members ``start .. start + count - 1`` of the family."""
    return [generate_member(fs, spec, i) for i in range(fs.start, fs.start + fs.count)]


def generate_domain_family(spec: GridSpec, count: int, seed: int, start: int = 0,
                           modes: int = 3) -> list:
    """Random trigonometric functions on a closed Omega_T grid.

    Member ``i`` is ``sum_k a_k / k cos(k pi x + p_k) cos(k pi t / T + q_k)``
    for ``k = 1 .. modes`` with ``a_k`` uniform on [1/2, 1] and uniform
    phases. Integer frequencies keep the family small enough that its
    largest implied constant settles within a few dozen members.

    Returns ``(seed, f)`` pairs; the functions are not periodic.
    """
    if spec.periodic:
        raise ValueError("domain families live on closed grids")
    X, T = spec.mesh()[0], spec.mesh()[-1]
    Tlen = spec.lengths[-1]
    out = []
    for i in range(start, start + count):
        sd = member_seed(seed, i)
        rng = np.random.default_rng(sd)
        f = np.zeros(spec.shape)
        for k in range(1, modes + 1):
            a = rng.uniform(0.5, 1.0)
            px, pt = rng.uniform(0, 2 * math.pi, size=2)
            f += a / k * np.cos(k * math.pi * X + px) * np.cos(k * math.pi * T / Tlen + pt)
        out.append((sd, GridFunction(spec, f, f"domain-trig#{i}")))
    return out


def is_band_limited(g: GridFunction, frac: float = 0.5, tol: float = 1e-12) -> bool:
    """True when the Fourier coefficients beyond `frac` of the Nyquist index on
    any axis are below ``tol`` relative to the largest one."""
    coef = np.abs(np.fft.rfftn(g.values))
    top = coef.max()
    if top == 0.0:
        return True
    mask = np.zeros(coef.shape, dtype=bool)
    for ax, n in enumerate(g.spec.shape):
        k = np.abs(np.fft.fftfreq(n) * n) if ax < g.spec.ndim - 1 else np.fft.rfftfreq(n) * n
        shp = [1] * coef.ndim
        shp[ax] = k.size
        mask |= (k > frac * n / 2).reshape(shp)
    return bool(coef[mask].max(initial=0.0) <= tol * top)


def spatial_shells(f: GridFunction, rel: float = 1e-10) -> list:
    """Dyadic shells ``floor(log2 |xi_x|)`` carrying spatial Fourier energy."""
    coef = np.abs(np.fft.rfft(f.values, axis=0))
    energy = coef.max(axis=tuple(range(1, coef.ndim)))
    xi = 2 * math.pi * np.fft.rfftfreq(f.spec.shape[0], d=f.spec.h_x)
    live = (energy > rel * energy.max()) & (xi > 0)
    return sorted({int(math.floor(math.log2(v))) for v in xi[live]})


def x_exponent(f: GridFunction, seps=None) -> float:
    """Log-log slope of the mean absolute x-increment against separation.

    The default separations ``4 h .. (N / 8) h`` sit between the shortest
    wavelength of the holder-rough sum and the box scale.
    """
    n = f.spec.shape[0]
    if seps is None:
        seps = [2 ** k for k in range(2, int(math.log2(n)) - 2)]
    v = f.values
    inc = [float(np.mean(np.abs(np.roll(v, -d, axis=0) - v))) for d in seps]
    slope, _ = np.polyfit(np.log(np.asarray(seps, float) * f.spec.h_x), np.log(inc), 1)
    return float(slope)
