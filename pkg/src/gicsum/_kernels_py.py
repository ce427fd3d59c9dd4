"""Pure NumPy scan kernel; reference implementation of the compiled one.

The per-point arithmetic (operation order included) mirrors the Cython
kernel exactly so both produce bit-identical slacks and pick identical
grid points.
"""

from __future__ import annotations

import numpy as np


def min_slack_scan(rho_base, free_idx, axes,
                   rec_rho, rec_pw, rec_q, rec_ptr, rec_j, rec_c, rec_qd,
                   pow_rho, pow_ptr, pow_j, pow_c,
                   exit_slack=None):
    """Evaluate the min constraint slack over the grid ``axes`` (one array per
    free coordinate, C-order product) and return ``(best_slack, best_point,
    early)``.  With ``exit_slack`` set, the first point reaching it wins."""
    nfree = len(free_idx)
    if nfree == 0:
        rho = [float(r) for r in rho_base]
        total = 1
    else:
        mesh = np.meshgrid(*axes, indexing="ij")
        grids = [g.ravel() for g in mesh]
        total = grids[0].size
        rho = [float(r) for r in rho_base]
        for f in range(nfree):
            rho[int(free_idx[f])] = grids[f]

    m = np.full(total, np.inf)
    for r in range(len(rec_rho)):
        v = (1.0 + rec_q[r]) / rho[rec_rho[r]]
        s = 1.0 / (rec_pw[r] + v * v)
        for t in range(rec_ptr[r], rec_ptr[r + 1]):
            rj = rho[rec_j[t]]
            s = s - rec_c[t] / ((1.0 + rec_qd[t]) - rj * rj)
        m = np.minimum(m, s)
    for p in range(len(pow_rho)):
        rb = rho[pow_rho[p]]
        s = 1.0 - rb * rb
        for t in range(pow_ptr[p], pow_ptr[p + 1]):
            rj = rho[pow_j[t]]
            s = s - pow_c[t] / (rj * rj)
        m = np.minimum(m, s)

    if nfree == 0:
        return float(m[0]), np.empty(0), bool(exit_slack is not None and m[0] >= exit_slack)

    if exit_slack is not None:
        hits = m >= exit_slack
        if hits.any():
            idx = int(np.argmax(hits))
            point = np.array([grids[f][idx] for f in range(nfree)])
            return float(m[idx]), point, True

    idx = int(np.argmax(m))
    point = np.array([grids[f][idx] for f in range(nfree)])
    return float(m[idx]), point, False
