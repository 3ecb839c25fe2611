# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan kernels for the Hölder pair maxima and the BMO cylinder scan.

Both functions mirror :mod:`paralog._kernels_py` exactly in scan order so the
two backends agree on values and, for ties, on the reported location.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()

BACKEND = "cython"


def pair_maxima(const double[:, ::1] v, bint periodic, const long[::1] seps):
    """For each separation ``d``: ``max |v[r, i+d] - v[r, i]|`` and its node.

    Returns arrays ``(maxima, rows, cols)``; periodic grids pair ``i`` with
    ``(i + d) mod N``. Entries for separations with no pair are ``-1``.
    """
    cdef Py_ssize_t rows = v.shape[0], npos = v.shape[1], ns = seps.shape[0]
    cdef Py_ssize_t s, r, i, d, lim, loc_r, loc_i
    cdef double diff, local
    out_arr = np.full(ns, -1.0)
    rr_arr = np.zeros(ns, dtype=np.int64)
    ii_arr = np.zeros(ns, dtype=np.int64)
    cdef double[::1] out = out_arr
    cdef long long[::1] rr = rr_arr
    cdef long long[::1] ii = ii_arr
    with nogil:
        for s in range(ns):
            d = seps[s]
            local = -1.0
            loc_r = 0
            loc_i = 0
            lim = npos - d
            for r in range(rows):
                for i in range(lim):
                    diff = fabs(v[r, i + d] - v[r, i])
                    if diff > local:
                        local = diff
                        loc_r = r
                        loc_i = i
                if periodic:
                    # wrapped pairs (i, i + d - N), visited after the direct ones
                    # in the same row, matching the numpy scan order
                    for i in range(lim, npos):
                        diff = fabs(v[r, i + d - npos] - v[r, i])
                        if diff > local:
                            local = diff
                            loc_r = r
                            loc_i = i
            out[s] = local
            rr[s] = loc_r
            ii[s] = loc_i
    return out_arr, rr_arr, ii_arr


def bmo_scan(const double[:, ::1] v, int a, int b, int sx, int st, bint periodic):
    """Sup of the mean oscillation over windows ``|di| <= a, |dk| <= b``.

    Centers run over ``range(0, N0, sx) x range(0, N1, st)``; windows wrap
    when `periodic` and are clipped to the array otherwise. Returns
    ``(value, i, k, n_centers)``.
    """
    cdef Py_ssize_t n0 = v.shape[0], n1 = v.shape[1]
    cdef Py_ssize_t i, k, p, q, i_lo, i_hi, k_lo, k_hi, pp, qq, count, ncent = 0
    cdef double mean, dev, best = 0.0
    cdef Py_ssize_t best_i = 0, best_k = 0
    cdef double[:, ::1] sat
    pad = np.pad(np.asarray(v), ((a, a), (b, b)), mode="wrap") if periodic else np.asarray(v)
    cdef const double[:, ::1] w = np.ascontiguousarray(pad)
    sat_arr = np.zeros((w.shape[0] + 1, w.shape[1] + 1))
    sat_arr[1:, 1:] = np.cumsum(np.cumsum(np.asarray(w), axis=0), axis=1)
    sat = sat_arr
    with nogil:
        i = 0
        while i < n0:
            k = 0
            while k < n1:
                if periodic:
                    i_lo = i
                    i_hi = i + 2 * a
                    k_lo = k
                    k_hi = k + 2 * b
                else:
                    i_lo = i - a if i >= a else 0
                    i_hi = i + a if i + a < n0 else n0 - 1
                    k_lo = k - b if k >= b else 0
                    k_hi = k + b if k + b < n1 else n1 - 1
                count = (i_hi - i_lo + 1) * (k_hi - k_lo + 1)
                mean = (sat[i_hi + 1, k_hi + 1] - sat[i_lo, k_hi + 1]
                        - sat[i_hi + 1, k_lo] + sat[i_lo, k_lo]) / count
                dev = 0.0
                for pp in range(i_lo, i_hi + 1):
                    for qq in range(k_lo, k_hi + 1):
                        dev = dev + fabs(w[pp, qq] - mean)
                dev = dev / count
                ncent = ncent + 1
                if dev > best:
                    best = dev
                    best_i = i
                    best_k = k
                k = k + st
            i = i + sx
    return best, int(best_i), int(best_k), int(ncent)
