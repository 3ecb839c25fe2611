"""Brute-force reference implementations used to certify the fast scans.

Both oracles enumerate every pair or every cylinder directly from node
coordinates and share no code with :mod:`paralog.norms` beyond the grid
type. They are quadratic (or worse) in the grid size and meant for grids of
at most a few thousand nodes.
"""

from __future__ import annotations

import math

import numpy as np

from .grid import GridFunction

__all__ = ["holder_oracle", "bmo_oracle", "bmo_radii"]

_EDGE = 1e-9  # relative slack for strict "< r" membership tests


def _line_distance(n: int, h: float, periodic: bool) -> np.ndarray:
    i = np.arange(n)
    d = np.abs(i[:, None] - i[None, :])
    if periodic:
        d = np.minimum(d, n - d)
    return d


def holder_oracle(f: GridFunction, gamma: float, which: str = "x") -> float:
    """Every same-time (``x``) or same-place (``t``) node pair, exponent
    ``gamma`` in space and ``gamma / 2`` in time. One space dimension only."""
    spec = f.spec
    if spec.n != 1:
        raise ValueError("the pairwise oracle handles one space dimension")
    if which == "x":
        v, h, expo = f.values.T, spec.h_x, gamma          # rows are time slices
    elif which == "t":
        v, h, expo = f.values, spec.h_t, gamma / 2.0      # rows are space points
    else:
        raise ValueError(f"which must be 'x' or 't', got {which!r}")
    n = v.shape[1]
    dist = _line_distance(n, h, spec.periodic)
    denom = np.ones((n, n))
    for p in range(n):
        for q in range(n):
            if dist[p, q] > 0:
                denom[p, q] = (float(dist[p, q]) * h) ** expo
    best = 0.0
    off = dist > 0
    for row in v:
        diff = np.abs(row[:, None] - row[None, :])
        best = max(best, float(np.max(diff[off] / denom[off])))
    return best


def bmo_radii(spec) -> list:
    """The dyadic ladder ``2 h_x 2^m`` up to the spatial width of the box."""
    out, r = [], 2.0 * spec.h_x
    while r <= spec.lengths[0] * (1 + 1e-12):
        out.append(r)
        r *= 2.0
    return out


def bmo_oracle(f: GridFunction) -> float:
    """Sup over all node-centred cylinders ``|x - x0| < r``, ``|t - t0| < r^2``.

    Membership is decided from node distances (minimum image when periodic).
    On periodic grids a radius is skipped once its cylinder would contain
    more offsets than the grid has nodes along an axis; on closed grids each
    cylinder is cut down to the nodes it shares with the domain.
    """
    spec = f.spec
    if spec.n != 1:
        raise ValueError("the cylinder oracle handles one space dimension")
    nx, nt = spec.shape
    hx, ht = spec.h_x, spec.h_t
    dx = _line_distance(nx, hx, spec.periodic) * hx
    dt = _line_distance(nt, ht, spec.periodic) * ht
    v = f.values
    best = 0.0
    for r in bmo_radii(spec):
        rx, rt = r * (1 - _EDGE), r * r * (1 - _EDGE)
        if spec.periodic:
            # offsets m with |m| h < extent, counted without wrapping
            ox = 2 * math.ceil(rx / hx) - 1
            ot = 2 * math.ceil(rt / ht) - 1
            if ox > nx or ot > nt:
                break
        inx = dx < rx
        int_ = dt < rt
        for i0 in range(nx):
            rows = v[inx[i0]]
            for k0 in range(nt):
                win = rows[:, int_[k0]]
                dev = float(np.mean(np.abs(win - win.mean())))
                if dev > best:
                    best = dev
    return best
