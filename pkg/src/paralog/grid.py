"""Uniform space-time grids, parabolic geometry and the PGF file format.

Values of a :class:`GridFunction` are stored with the spatial axes first and
the time axis last, i.e. ``values[i_x, k_t]`` for one spatial dimension and
``values[i_x1, i_x2, k_t]`` for two.

Periodic grids sample the half-open box (``h = (hi - lo) / N``) and model the
whole space; non-periodic grids sample the closed box including both
endpoints (``h = (hi - lo) / (N - 1)``), which is what bounded-domain work
such as boundary reflections needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "GridSpec",
    "GridFunction",
    "DilationMatrix",
    "quasi_norm",
    "quasi_norm_sq",
    "dilate",
    "sample",
    "spectral_derivative_x",
    "antiderivative_x",
    "read_pgf",
    "write_pgf",
    "PGFError",
]

MAX_DILATION = 62


class PGFError(ValueError):
    """Raised for malformed or inconsistent PGF files."""


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned space-time box with uniform sampling.

    Parameters
    ----------
    n : int
        Spatial dimension (1 or 2).
    shape : tuple of int
        Samples per spatial axis followed by samples along time.
    domain : tuple of (lo, hi)
        Interval per axis, same order as `shape`.
    periodic : bool
        Periodic (full-space model) or closed bounded box.
    """

    n: int
    shape: tuple
    domain: tuple
    periodic: bool = True

    def __post_init__(self):
        shape = tuple(int(s) for s in self.shape)
        domain = tuple((float(lo), float(hi)) for lo, hi in self.domain)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "domain", domain)
        if self.n not in (1, 2):
            raise ValueError(f"spatial dimension must be 1 or 2, got {self.n}")
        if len(shape) != self.n + 1 or len(domain) != self.n + 1:
            raise ValueError("shape and domain need one entry per spatial axis plus time")
        for s in shape:
            if s < 4:
                raise ValueError(f"every axis needs at least 4 samples, got {shape}")
            if self.periodic and not _is_pow2(s):
                raise ValueError(f"periodic grids need power-of-two sizes, got {shape}")
        for lo, hi in domain:
            if not (math.isfinite(lo) and math.isfinite(hi)) or not hi > lo:
                raise ValueError(f"degenerate interval [{lo}, {hi}]")

    @classmethod
    def box(cls, n_x: int, n_t: int, x: tuple = (0.0, 1.0), t: tuple = (0.0, 1.0),
            periodic: bool = True) -> "GridSpec":
        """One spatial dimension shortcut."""
        return cls(1, (n_x, n_t), (x, t), periodic)

    @property
    def ndim(self) -> int:
        return self.n + 1

    @property
    def spacing(self) -> tuple:
        div = (lambda s: s) if self.periodic else (lambda s: s - 1)
        return tuple((hi - lo) / div(s) for (lo, hi), s in zip(self.domain, self.shape))

    @property
    def h_x(self) -> float:
        return self.spacing[0]

    @property
    def h_t(self) -> float:
        return self.spacing[-1]

    @property
    def lengths(self) -> tuple:
        return tuple(hi - lo for lo, hi in self.domain)

    def axis(self, k: int) -> np.ndarray:
        """Node coordinates along axis `k` (``lo + i * h``)."""
        lo = self.domain[k][0]
        return lo + np.arange(self.shape[k]) * self.spacing[k]

    def mesh(self) -> list:
        return np.meshgrid(*[self.axis(k) for k in range(self.ndim)], indexing="ij")

    def node(self, index: Sequence[int]) -> tuple:
        return tuple(self.domain[k][0] + int(i) * self.spacing[k] for k, i in enumerate(index))

    def cell_weights(self) -> np.ndarray:
        """Quadrature weights: uniform cells when periodic, trapezoid otherwise."""
        w = np.ones(self.shape)
        for k, (s, h) in enumerate(zip(self.shape, self.spacing)):
            wk = np.full(s, h)
            if not self.periodic:
                wk[0] = wk[-1] = h / 2
            shp = [1] * self.ndim
            shp[k] = s
            w = w * wk.reshape(shp)
        return w

    def region_mask(self, region, open_box: bool = False) -> np.ndarray:
        """Boolean node mask of the closed (or open) sub-box ``((lo, hi), ...)``.

        Nodes within ``1e-9 h`` of a face count as on the face.
        """
        mask = np.ones(self.shape, dtype=bool)
        for k, (lo, hi) in enumerate(region):
            slack = 1e-9 * self.spacing[k]
            ax = self.axis(k)
            if open_box:
                sel = (ax > lo + slack) & (ax < hi - slack)
            else:
                sel = (ax >= lo - slack) & (ax <= hi + slack)
            shp = [1] * self.ndim
            shp[k] = self.shape[k]
            mask &= sel.reshape(shp)
        return mask


@dataclass(frozen=True)
class GridFunction:
    """Real samples of ``f(x, t)`` on a :class:`GridSpec`; immutable."""

    spec: GridSpec
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64, copy=True)
        if vals.size != math.prod(self.spec.shape):
            raise ValueError(f"{vals.size} values for grid of shape {self.spec.shape}")
        vals = vals.reshape(self.spec.shape)
        bad = ~np.isfinite(vals)
        if bad.any():
            idx = tuple(int(i) for i in np.argwhere(bad)[0])
            raise ValueError(f"non-finite value at node {idx}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def replace(self, values=None, label=None) -> "GridFunction":
        return GridFunction(self.spec,
                            self.values if values is None else values,
                            self.label if label is None else label)

    def __add__(self, other):
        if isinstance(other, GridFunction):
            if other.spec != self.spec:
                raise ValueError("grid mismatch")
            return self.replace(self.values + other.values)
        return self.replace(self.values + float(other))

    def __mul__(self, c):
        if isinstance(c, GridFunction):
            if c.spec != self.spec:
                raise ValueError("grid mismatch")
            return self.replace(self.values * c.values)
        return self.replace(self.values * float(c))

    __rmul__ = __mul__


@dataclass(frozen=True)
class DilationMatrix:
    """A = diag(2, ..., 2, 4): doubling in space, quadrupling in time."""

    n: int = 1
    diagonal: tuple = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "diagonal", (2.0,) * self.n + (4.0,))

    @property
    def det(self) -> float:
        return 2.0 ** (self.n + 2)

    def apply(self, z, j: int = 1):
        return dilate(z, j)

    def inverse(self, z, j: int = 1):
        return dilate(z, -j)


def quasi_norm_sq(x_sq, t):
    """Square of the parabolic gauge from ``|x|^2`` and ``t`` (broadcasts)."""
    x_sq = np.asarray(x_sq, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    return 0.5 * (x_sq + np.sqrt(x_sq * x_sq + 4.0 * t * t))


def quasi_norm(z) -> float:
    """Parabolic quasi-norm of a space-time point ``z = (x_1, ..., x_n, t)``.

    The positive root of ``|x|^2/rho^2 + t^2/rho^4 = 1``; it satisfies
    ``quasi_norm(A z) == 2 * quasi_norm(z)``.
    """
    z = np.asarray(z, dtype=np.float64)
    if not np.all(np.isfinite(z)):
        raise ValueError("quasi_norm needs a finite point")
    x_sq = float(np.dot(z[:-1], z[:-1]))
    return float(np.sqrt(quasi_norm_sq(x_sq, z[-1])))


def dilate(z, j: int):
    """Return ``A^j z`` i.e. ``(2^j x, 4^j t)``."""
    j = int(j)
    if abs(j) > MAX_DILATION:
        raise ValueError(f"dilation exponent {j} outside [-{MAX_DILATION}, {MAX_DILATION}]")
    z = np.asarray(z, dtype=np.float64)
    out = np.ldexp(z, j)
    out[-1] = math.ldexp(float(z[-1]), 2 * j)
    return tuple(float(v) for v in out)


def sample(generator: Callable, spec: GridSpec, label: str = "") -> GridFunction:
    """Evaluate ``generator(x_1, ..., x_n, t)`` on every node of `spec`.

    The generator receives broadcastable coordinate arrays.
    """
    with np.errstate(all="ignore"):
        vals = np.broadcast_to(np.asarray(generator(*spec.mesh()), dtype=np.float64),
                               spec.shape)
    bad = ~np.isfinite(vals)
    if bad.any():
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        raise ValueError(f"generator returned {vals[idx]} at node {idx} = {spec.node(idx)}")
    return GridFunction(spec, vals, label or getattr(generator, "__name__", ""))


def _wavenumbers(spec: GridSpec, axis: int) -> np.ndarray:
    return 2.0 * np.pi * np.fft.rfftfreq(spec.shape[axis], d=spec.spacing[axis])


def spectral_derivative_x(g: GridFunction, axis: int = 0) -> GridFunction:
    """Fourier-multiplier derivative ``i k`` along spatial `axis` (periodic only)."""
    spec = g.spec
    if not spec.periodic:
        raise ValueError("spectral differentiation requires a periodic grid")
    if not 0 <= axis < spec.n:
        raise ValueError(f"axis {axis} is not a spatial axis")
    n_ax = spec.shape[axis]
    k = _wavenumbers(spec, axis)
    mult = 1j * k
    mult[-1] = 0.0  # Nyquist mode has no odd counterpart
    shp = [1] * spec.ndim
    shp[axis] = k.size
    coef = np.fft.rfft(g.values, axis=axis) * mult.reshape(shp)
    out = np.fft.irfft(coef, n=n_ax, axis=axis)
    return GridFunction(spec, out, f"d/dx{axis + 1}({g.label})")


def antiderivative_x(f: GridFunction, axis: int = 0, base: float | None = None) -> GridFunction:
    """Cumulative trapezoidal integral along spatial `axis`, zero at `base`."""
    spec = f.spec
    if not 0 <= axis < spec.n:
        raise ValueError(f"axis {axis} is not a spatial axis")
    lo, hi = spec.domain[axis]
    top = hi if not spec.periodic else hi - spec.spacing[axis]
    if base is None:
        base = lo
    if not lo <= base <= top:
        raise ValueError(f"base {base} outside [{lo}, {top}]")
    h = spec.spacing[axis]
    v = np.moveaxis(f.values, axis, 0)
    cum = np.zeros_like(v)
    cum[1:] = np.cumsum(0.5 * h * (v[1:] + v[:-1]), axis=0)
    s = (base - lo) / h
    i0 = min(int(math.floor(s)), v.shape[0] - 2)
    w = s - i0
    offset = (1.0 - w) * cum[i0] + w * cum[i0 + 1]
    out = np.moveaxis(cum - offset, 0, axis)
    return GridFunction(spec, out, f"int dx{axis + 1}({f.label})")


_PGF_MAGIC = "pgf v1"


def _fmt(x: float) -> str:
    return repr(float(x))


def write_pgf(path, gf: GridFunction) -> None:
    """Write `gf` as PGF: ASCII header, then little-endian float64 raster
    with the spatial index fastest and time slowest."""
    spec = gf.spec
    label = gf.label.replace("\n", " ").replace("\r", " ")
    header = [
        _PGF_MAGIC,
        f"n {spec.n}",
        "shape " + " ".join(str(s) for s in spec.shape),
        "domain " + " ".join(_fmt(v) for pair in spec.domain for v in pair),
        f"periodic {int(spec.periodic)}",
        f"label {label}",
        "data",
    ]
    payload = np.asarray(gf.values, dtype="<f8").ravel(order="F").tobytes()
    with open(Path(path), "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode("ascii", errors="replace"))
        fh.write(payload)


def read_pgf(path) -> GridFunction:
    raw = Path(path).read_bytes()
    fields = {}
    pos = 0
    expected = ["pgf", "n", "shape", "domain", "periodic", "label", "data"]
    for key in expected:
        end = raw.find(b"\n", pos)
        if end < 0:
            raise PGFError(f"truncated header, missing '{key}' line")
        line = raw[pos:end].decode("ascii", errors="strict")
        pos = end + 1
        if key == "pgf":
            if line != _PGF_MAGIC:
                raise PGFError(f"unsupported version line {line!r}")
            continue
        if key == "data":
            if line != "data":
                raise PGFError(f"expected 'data', got {line!r}")
            continue
        name, _, rest = line.partition(" ")
        if name != key:
            raise PGFError(f"expected '{key}' header line, got {line!r}")
        fields[key] = rest
    try:
        n = int(fields["n"])
        shape = tuple(int(s) for s in fields["shape"].split())
        bounds = [float(v) for v in fields["domain"].split()]
        periodic = {"0": False, "1": True}[fields["periodic"].strip()]
    except (ValueError, KeyError) as exc:
        raise PGFError(f"malformed header: {exc}") from None
    if len(bounds) != 2 * len(shape):
        raise PGFError("domain needs two bounds per axis")
    try:
        spec = GridSpec(n, shape, tuple(zip(bounds[::2], bounds[1::2])), periodic)
    except ValueError as exc:
        raise PGFError(str(exc)) from None
    body = raw[pos:]
    if len(body) != 8 * math.prod(shape):
        raise PGFError(f"payload has {len(body)} bytes, shape {shape} needs {8 * math.prod(shape)}")
    vals = np.frombuffer(body, dtype="<f8").reshape(shape, order="F")
    if not np.all(np.isfinite(vals)):
        raise PGFError("non-finite value in payload")
    return GridFunction(spec, vals.astype(np.float64), fields["label"])
