"""Anisotropic Littlewood-Paley filter bank on periodic grids.

The cutoff is ``theta(xi) = S(2 - rho(xi))`` with the smooth step
``S(u) = q(u) / (q(u) + q(1 - u))``, ``q(u) = exp(-1/u)`` for ``u > 0``:
exactly 1 for ``rho <= 1`` and exactly 0 for ``rho >= 2``.

Levels use ``phi_hat(xi) = theta(xi) - theta(A xi)``, so the level-``j``
multiplier ``phi_hat(A^-j xi) = theta(A^-j xi) - theta(A^(1-j) xi)`` lives on
the annulus ``2^(j-1) <= rho(xi) <= 2^(j+1)``. The inhomogeneous bank
replaces all levels ``j <= 0`` by ``theta`` itself; both banks telescope to
an exact partition of unity.

Frequencies are angular (``xi = 2 pi k / L``) and blocks are computed by
multiplication on the real FFT lattice.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .grid import GridFunction, GridSpec, quasi_norm_sq, write_pgf

__all__ = [
    "smooth_step",
    "theta",
    "FilterBank",
    "BlockDecomposition",
    "BesovNorm",
    "build_filter_bank",
    "lattice_rho",
    "lp_block",
    "decompose",
    "reconstruct",
    "besov_norm",
    "besov_from_blocks",
    "square_function",
    "square_function_from_blocks",
    "partition_residual",
    "export_decomposition",
]


def _q(u):
    u = np.asarray(u, dtype=np.float64)
    out = np.zeros_like(u)
    pos = u > 0
    with np.errstate(over="ignore"):      # 1/u overflows to inf for tiny u; exp gives 0
        out[pos] = np.exp(-1.0 / u[pos])
    return out


def smooth_step(u):
    """C-infinity step: 0 for ``u <= 0``, 1 for ``u >= 1``."""
    a = _q(u)
    b = _q(1.0 - np.asarray(u, dtype=np.float64))
    return a / (a + b)


def theta(rho):
    """Cutoff as a function of the quasi-norm value."""
    return smooth_step(2.0 - np.asarray(rho, dtype=np.float64))


def lattice_rho(spec: GridSpec) -> np.ndarray:
    """Quasi-norm of every frequency on the real-FFT lattice of `spec`."""
    freqs = [2.0 * np.pi * np.fft.fftfreq(s, d=h)
             for s, h in zip(spec.shape[:-1], spec.spacing[:-1])]
    tau = 2.0 * np.pi * np.fft.rfftfreq(spec.shape[-1], d=spec.spacing[-1])
    grids = np.meshgrid(*freqs, tau, indexing="ij")
    x_sq = sum(g * g for g in grids[:-1])
    return np.sqrt(quasi_norm_sq(x_sq, grids[-1]))


@dataclass(frozen=True)
class FilterBank:
    spec: GridSpec
    mode: str
    j_min: int
    j_max: int
    rho: np.ndarray = field(repr=False)
    multipliers: dict = field(repr=False)

    @property
    def levels(self) -> tuple:
        return tuple(sorted(self.multipliers))

    def multiplier(self, j: int) -> np.ndarray:
        try:
            return self.multipliers[j]
        except KeyError:
            raise ValueError(f"level {j} not in bank range [{self.j_min}, {self.j_max}]") from None

    def covered(self) -> np.ndarray:
        """Lattice mask where the resolvable levels sum to one."""
        top = self.rho <= 2.0 ** self.j_max
        if self.mode == "inhomogeneous":
            return top
        return top & (self.rho >= 2.0 ** self.j_min)


def _level_multiplier(rho: np.ndarray, j: int) -> np.ndarray:
    # ldexp keeps the dilation exact, so theta(A^-j xi) == theta(2^-j rho)
    return theta(np.ldexp(rho, -j)) - theta(np.ldexp(rho, 1 - j))


def build_filter_bank(spec: GridSpec, mode: str = "inhomogeneous") -> FilterBank:
    """Sample the dyadic multipliers on the frequency lattice of `spec`.

    ``j_max`` is the smallest level with ``2^j_max >= max rho`` and
    ``j_min`` the largest with ``2^j_min <= min nonzero rho``, so together
    the levels cover every nonzero lattice frequency.
    """
    if not spec.periodic:
        raise ValueError("filter banks need a periodic grid")
    if mode not in ("homogeneous", "inhomogeneous"):
        raise ValueError(f"unknown mode {mode!r}")
    rho = lattice_rho(spec)
    rho.setflags(write=False)
    rmax = float(rho.max())
    rmin = float(rho[rho > 0].min())
    j_max = int(math.ceil(math.log2(rmax)))
    j_min = int(math.floor(math.log2(rmin)))
    mults = {}
    if mode == "homogeneous":
        if j_max < j_min:
            raise ValueError("grid too small to host a dyadic annulus")
        for j in range(j_min, j_max + 1):
            mults[j] = _level_multiplier(rho, j)
    else:
        if j_max < 1:
            raise ValueError("grid too small to host a dyadic annulus")
        mults[0] = theta(rho)
        for j in range(1, j_max + 1):
            mults[j] = _level_multiplier(rho, j)
        j_min = 0
    for m in mults.values():
        m.setflags(write=False)
    return FilterBank(spec, mode, j_min, j_max, rho, mults)


def partition_residual(bank: FilterBank) -> tuple[float, float]:
    """Max ``|sum_j m_j - 1|`` inside and outside the covered annulus."""
    total = np.zeros_like(bank.rho)
    for j in bank.levels:
        total = total + bank.multipliers[j]
    res = np.abs(total - 1.0)
    cov = bank.covered()
    inside = float(res[cov].max()) if cov.any() else 0.0
    outside = float(res[~cov].max()) if (~cov).any() else 0.0
    return inside, outside


def _check_spec(f: GridFunction, bank: FilterBank) -> None:
    if f.spec != bank.spec:
        raise ValueError("function and filter bank live on different grids")


def _transform(f: GridFunction) -> np.ndarray:
    return np.fft.rfftn(f.values)


def _block_from_coef(coef, bank, j):
    return np.fft.irfftn(coef * bank.multiplier(j), s=bank.spec.shape,
                          axes=tuple(range(len(bank.spec.shape))))


def lp_block(f: GridFunction, bank: FilterBank, j: int) -> GridFunction:
    """``phi_j * f`` via the convolution theorem."""
    _check_spec(f, bank)
    vals = _block_from_coef(_transform(f), bank, j)
    return GridFunction(bank.spec, vals, f"block{j}({f.label})")


@dataclass(frozen=True)
class BlockDecomposition:
    mode: str
    blocks: tuple          # ((level, GridFunction), ...)

    def as_dict(self) -> dict:
        return {j: b for j, b in self.blocks}


def decompose(f: GridFunction, bank: FilterBank, levels=None) -> BlockDecomposition:
    _check_spec(f, bank)
    coef = _transform(f)
    levels = bank.levels if levels is None else levels
    blocks = tuple((j, GridFunction(bank.spec, _block_from_coef(coef, bank, j),
                                    f"block{j}({f.label})"))
                   for j in levels)
    return BlockDecomposition(bank.mode, blocks)


def reconstruct(decomp: BlockDecomposition) -> GridFunction:
    """Sum of the blocks. In homogeneous mode the mean is lost."""
    if not decomp.blocks:
        raise ValueError("empty decomposition")
    vals = np.zeros(decomp.blocks[0][1].spec.shape)
    for _, b in decomp.blocks:
        vals = vals + b.values
    return GridFunction(decomp.blocks[0][1].spec, vals, "reconstruction")


class BesovNorm(NamedTuple):
    value: float
    level: int
    profile: dict          # level -> 2^(gamma j) ||phi_j * f||_inf


def besov_norm(f: GridFunction, bank: FilterBank, gamma: float) -> BesovNorm:
    """``sup_{j >= 0} 2^(gamma j) ||phi_j * f||_inf`` over resolvable levels."""
    if bank.mode != "inhomogeneous":
        raise ValueError("the Besov norm needs an inhomogeneous bank")
    _check_spec(f, bank)
    return besov_from_blocks(decompose(f, bank), gamma)


def besov_from_blocks(decomp: BlockDecomposition, gamma: float) -> BesovNorm:
    """:func:`besov_norm` from an existing inhomogeneous decomposition."""
    if decomp.mode != "inhomogeneous":
        raise ValueError("the Besov norm needs an inhomogeneous decomposition")
    profile = {j: 2.0 ** (gamma * j) * float(np.max(np.abs(b.values)))
               for j, b in decomp.blocks if j >= 0}
    level = max(profile, key=lambda j: (profile[j], -j))
    return BesovNorm(profile[level], level, profile)


def square_function_from_blocks(blocks: dict, levels, weight_exponent: float = 0.0) -> np.ndarray:
    """Pointwise ``(sum_j 2^(2 w j) |b_j|^2)^(1/2)`` over `levels`."""
    levels = list(levels)
    if not levels:
        raise ValueError("empty level set")
    acc = None
    for j in levels:
        w = 2.0 ** (weight_exponent * j)
        term = (w * blocks[j]) ** 2
        acc = term if acc is None else acc + term
    return np.sqrt(acc)


def square_function(f: GridFunction, bank: FilterBank, levels,
                    weight_exponent: float = 0.0) -> GridFunction:
    levels = list(levels)
    if not levels:
        raise ValueError("empty level set")
    missing = [j for j in levels if j not in bank.multipliers]
    if missing:
        raise ValueError(f"levels {missing} not resolvable on this bank")
    dec = decompose(f, bank, levels)
    vals = square_function_from_blocks({j: b.values for j, b in dec.blocks}, levels,
                                       weight_exponent)
    return GridFunction(bank.spec, vals, f"S({f.label})")


def export_decomposition(decomp: BlockDecomposition, out_dir, bank: FilterBank | None = None,
                         original: GridFunction | None = None) -> Path:
    """Write ``block_j{level}.pgf`` files plus ``manifest.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for j, b in decomp.blocks:
        name = f"block_j{j}.pgf"
        write_pgf(out / name, b)
        files.append(name)
    manifest = {"mode": decomp.mode, "levels": [j for j, _ in decomp.blocks], "files": files}
    if bank is not None:
        inside, outside = partition_residual(bank)
        manifest["partition_residual"] = inside
        manifest["partition_residual_outside"] = outside
    if original is not None:
        rec = reconstruct(decomp).values
        target = original.values
        if decomp.mode == "homogeneous":
            target = target - target.mean()
        manifest["reconstruction_error"] = float(np.max(np.abs(rec - target)))
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2))
    return out
