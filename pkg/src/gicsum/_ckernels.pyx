# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled scan kernel for the genie-parameter grid search.

Same contract and the same floating-point operation order as
``gicsum._kernels_py.min_slack_scan``; built with FMA contraction disabled
so results are bit-identical to the fallback.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY

ctypedef cnp.int64_t i64


def min_slack_scan(double[::1] rho_base, i64[::1] free_idx, list axes,
                   i64[::1] rec_rho, double[::1] rec_pw, double[::1] rec_q,
                   i64[::1] rec_ptr, i64[::1] rec_j, double[::1] rec_c,
                   double[::1] rec_qd,
                   i64[::1] pow_rho, i64[::1] pow_ptr, i64[::1] pow_j,
                   double[::1] pow_c,
                   exit_slack=None):
    cdef int K = rho_base.shape[0]
    cdef int F = free_idx.shape[0]
    if K > 8 or F > 8:
        raise ValueError("kernel supports at most 8 users")

    cdef double rho[8]
    cdef i64 lens[8]
    cdef i64 offs[8]
    cdef i64 idx[8]
    cdef i64 best_i[8]
    cdef int f, r, p, i
    cdef i64 t, pt, total
    cdef double v, s, rj, rb, m
    cdef double best = -INFINITY
    cdef bint do_exit = exit_slack is not None
    cdef double exit_s = exit_slack if do_exit else 0.0
    cdef bint early = False
    cdef int R = rec_rho.shape[0]
    cdef int Pn = pow_rho.shape[0]

    for i in range(K):
        rho[i] = rho_base[i]

    # flatten the per-coordinate grids
    cdef cnp.ndarray flat_arr
    if F > 0:
        flat_arr = np.concatenate([np.ascontiguousarray(a, dtype=np.float64) for a in axes])
    else:
        flat_arr = np.empty(0, dtype=np.float64)
    cdef double[::1] flat = flat_arr
    total = 1
    for f in range(F):
        lens[f] = len(axes[f])
        offs[f] = 0 if f == 0 else offs[f - 1] + lens[f - 1]
        idx[f] = 0
        best_i[f] = 0
        rho[free_idx[f]] = flat[offs[f]]
        total *= lens[f]

    for pt in range(total):
        m = INFINITY
        for r in range(R):
            v = (1.0 + rec_q[r]) / rho[rec_rho[r]]
            s = 1.0 / (rec_pw[r] + v * v)
            for t in range(rec_ptr[r], rec_ptr[r + 1]):
                rj = rho[rec_j[t]]
                s = s - rec_c[t] / ((1.0 + rec_qd[t]) - rj * rj)
            if s < m:
                m = s
        for p in range(Pn):
            rb = rho[pow_rho[p]]
            s = 1.0 - rb * rb
            for t in range(pow_ptr[p], pow_ptr[p + 1]):
                rj = rho[pow_j[t]]
                s = s - pow_c[t] / (rj * rj)
            if s < m:
                m = s

        if do_exit and m >= exit_s:
            best = m
            for f in range(F):
                best_i[f] = idx[f]
            early = True
            break
        if m > best:
            best = m
            for f in range(F):
                best_i[f] = idx[f]

        # odometer increment, last coordinate fastest
        f = F - 1
        while f >= 0:
            idx[f] += 1
            if idx[f] < lens[f]:
                rho[free_idx[f]] = flat[offs[f] + idx[f]]
                break
            idx[f] = 0
            rho[free_idx[f]] = flat[offs[f]]
            f -= 1

    point = np.empty(F, dtype=np.float64)
    for f in range(F):
        point[f] = flat[offs[f] + best_i[f]]
    return float(best), point, bool(early)
