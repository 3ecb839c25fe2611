"""Numpy implementation of the scan kernels (fallback for :mod:`._kernels`)."""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

BACKEND = "python"

_CHUNK = 1 << 22  # elements per temporary in the BMO scan


def pair_maxima(v, periodic, seps):
    v = np.ascontiguousarray(v, dtype=np.float64)
    npos = v.shape[1]
    seps = np.asarray(seps, dtype=np.int64)
    out = np.full(seps.size, -1.0)
    rows = np.zeros(seps.size, dtype=np.int64)
    cols = np.zeros(seps.size, dtype=np.int64)
    for s, d in enumerate(seps):
        d = int(d)
        if periodic:
            diff = np.abs(np.roll(v, -d, axis=1) - v)
        else:
            if d >= npos:
                continue
            diff = np.abs(v[:, d:] - v[:, :-d])
        flat = int(np.argmax(diff))
        rows[s], cols[s] = divmod(flat, diff.shape[1])
        out[s] = diff.flat[flat]
    return out, rows, cols


def _window_sums(sat, i_lo, i_hi, k_lo, k_hi):
    return (sat[i_hi[:, None] + 1, k_hi[None, :] + 1] - sat[i_lo[:, None], k_hi[None, :] + 1]
            - sat[i_hi[:, None] + 1, k_lo[None, :]] + sat[i_lo[:, None], k_lo[None, :]])


def bmo_scan(v, a, b, sx, st, periodic):
    v = np.ascontiguousarray(v, dtype=np.float64)
    n0, n1 = v.shape
    ci = np.arange(0, n0, sx)
    ck = np.arange(0, n1, st)
    if periodic:
        w = np.pad(v, ((a, a), (b, b)), mode="wrap")
        i_lo, i_hi = ci, ci + 2 * a
        k_lo, k_hi = ck, ck + 2 * b
        padded = w
    else:
        w = v
        i_lo, i_hi = np.maximum(ci - a, 0), np.minimum(ci + a, n0 - 1)
        k_lo, k_hi = np.maximum(ck - b, 0), np.minimum(ck + b, n1 - 1)
        padded = np.pad(v, ((a, a), (b, b)), constant_values=np.nan)
    sat = np.zeros((w.shape[0] + 1, w.shape[1] + 1))
    sat[1:, 1:] = np.cumsum(np.cumsum(w, axis=0), axis=1)
    count = (i_hi - i_lo + 1)[:, None] * (k_hi - k_lo + 1)[None, :]
    means = _window_sums(sat, i_lo, i_hi, k_lo, k_hi) / count

    windows = sliding_window_view(padded, (2 * a + 1, 2 * b + 1))[::sx, ::st]
    wsize = (2 * a + 1) * (2 * b + 1)
    rows_per_chunk = max(1, _CHUNK // max(1, wsize * ck.size))
    dev = np.empty((ci.size, ck.size))
    for r0 in range(0, ci.size, rows_per_chunk):
        r1 = min(ci.size, r0 + rows_per_chunk)
        diff = np.abs(windows[r0:r1] - means[r0:r1, :, None, None])
        if periodic:
            dev[r0:r1] = diff.sum(axis=(-2, -1))
        else:
            dev[r0:r1] = np.nansum(diff, axis=(-2, -1))
    dev /= count
    flat = int(np.argmax(dev))
    r, c = divmod(flat, ck.size)
    best = float(dev[r, c])
    if best <= 0.0:
        return 0.0, 0, 0, int(dev.size)
    return best, int(ci[r]), int(ck[c]), int(dev.size)
