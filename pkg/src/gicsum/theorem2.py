"""Achievable sum-rate bounds for a fixed scheme.

Every receiver sees the users it does not treat as noise as a Gaussian MAC.
Summing one MAC constraint per receiver, chosen so the groups jointly cover
every user exactly ``l`` times, bounds ``l * S``.  The least normalized
bound over all covers and all ``l`` in 1..K is the scheme's maximum
achievable sum rate; an LP over the raw MAC constraints double-checks it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import (K_MAX_DEFAULT, RATE_TOL, ShkScheme, StandardGic,
                   noise_power_vector)
from .errors import EnumerationTooLarge, OracleFailure


@dataclass(frozen=True)
class SumRateBound:
    l: int
    covers: tuple[frozenset[int], ...]
    rhs_bits: float
    normalized_bits: float


def cover_multiset_valid(bound: SumRateBound, K: int) -> bool:
    """Independent recount: every user appears exactly ``l`` times overall."""
    counts = [0] * K
    for J in bound.covers:
        for j in J:
            counts[j] += 1
    return all(c == bound.l for c in counts)


def _bound_rhs_bits(gic: StandardGic, Q: np.ndarray, covers) -> float:
    H, P = gic.H, gic.P
    total = 0.0
    for i in range(gic.K):
        num = 0.0
        for j in sorted(covers[i]):
            num += H[i, j] ** 2 * P[j]
        total += 0.5 * math.log2(1.0 + num / (1.0 + Q[i]))
    return total


def enumerate_cover_bounds(gic: StandardGic, scheme: ShkScheme,
                           l_max: int | None = None,
                           k_max: int = K_MAX_DEFAULT) -> list[SumRateBound]:
    """All cover bounds for multiplicities 1..l_max (default 1..K), deduplicated.

    A multiplicity with no feasible cover (some user is decodable at fewer
    than ``l`` receivers) simply contributes no bounds.
    """
    K = gic.K
    if K > k_max:
        raise EnumerationTooLarge(f"K={K} exceeds k_max={k_max}")
    l_max = K if l_max is None else l_max
    if l_max > K:
        raise ValueError("multiplicity above K is out of scope")
    Q = noise_power_vector(gic, scheme)
    eligible = [[i for i in range(K) if j not in scheme.noise_sets[i]]
                for j in range(K)]
    bounds: list[SumRateBound] = []
    seen = set()
    for l in range(1, l_max + 1):
        if any(len(e) < l for e in eligible):
            continue
        per_user = [list(itertools.combinations(e, l)) for e in eligible]
        for assignment in itertools.product(*per_user):
            covers = [set() for _ in range(K)]
            for j, receivers in enumerate(assignment):
                for i in receivers:
                    covers[i].add(j)
            key = (l, tuple(frozenset(c) for c in covers))
            if key in seen:
                continue
            seen.add(key)
            rhs = _bound_rhs_bits(gic, Q, covers)
            bounds.append(SumRateBound(l, key[1], rhs, rhs / l))
    return bounds


def max_achievable_sum_rate(gic: StandardGic, scheme: ShkScheme,
                            k_max: int = K_MAX_DEFAULT) -> float:
    """Least normalized cover bound; equals the LP optimum over the MAC constraints."""
    bounds = enumerate_cover_bounds(gic, scheme, k_max=k_max)
    return min(b.normalized_bits for b in bounds)


def bounds_csv_rows(bounds: list[SumRateBound], K: int,
                    tol: float = RATE_TOL) -> list[dict]:
    best = min(b.normalized_bits for b in bounds) if bounds else math.nan
    rows = []
    for b in bounds:
        row = {"l": b.l}
        for i in range(K):
            row[f"J_{i + 1}"] = ";".join(str(j + 1) for j in sorted(b.covers[i]))
        row["rhs_bits"] = b.rhs_bits
        row["normalized_bits"] = b.normalized_bits
        row["active"] = bool(b.normalized_bits <= best + tol)
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# Independent oracle: maximize sum(R) over the intersected MAC polytopes.

def _simplex_maximize(c: np.ndarray, A: np.ndarray, b: np.ndarray,
                      max_iter: int = 10000) -> float:
    """Dense tableau simplex with Bland's rule; requires b >= 0."""
    m, n = A.shape
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -c
    basis = list(range(n, n + m))
    for _ in range(max_iter):
        enter = -1
        for j in range(n + m):
            if T[m, j] < -1e-12:
                enter = j
                break
        if enter < 0:
            # polish: solve the basic system from the original data
            B = np.zeros((m, m))
            ext = np.hstack([A, np.eye(m)])
            for col, var in enumerate(basis):
                B[:, col] = ext[:, var]
            try:
                xb = np.linalg.solve(B, b)
            except np.linalg.LinAlgError as exc:
                raise OracleFailure(f"singular final basis: {exc}") from exc
            cext = np.concatenate([c, np.zeros(m)])
            return float(sum(cext[var] * xb[col] for col, var in enumerate(basis)))
        leave = -1
        best_ratio = math.inf
        for i in range(m):
            a = T[i, enter]
            if a > 1e-12:
                ratio = T[i, -1] / a
                if ratio < best_ratio or (ratio == best_ratio and
                                          (leave < 0 or basis[i] < basis[leave])):
                    best_ratio = ratio
                    leave = i
        if leave < 0:
            raise OracleFailure("LP unbounded; constraint set is malformed")
        piv = T[leave, enter]
        T[leave, :] /= piv
        for i in range(m + 1):
            if i != leave and T[i, enter] != 0.0:
                T[i, :] -= T[i, enter] * T[leave, :]
        basis[leave] = enter
    raise OracleFailure("simplex iteration limit reached")


def lp_sum_rate_oracle(gic: StandardGic, scheme: ShkScheme,
                       k_max: int = K_MAX_DEFAULT) -> float:
    """Optimal sum rate of the LP with one constraint per (receiver, group)."""
    K = gic.K
    if K > k_max:
        raise EnumerationTooLarge(f"K={K} exceeds k_max={k_max}")
    H, P = gic.H, gic.P
    Q = noise_power_vector(gic, scheme)
    rows, rhs = [], []
    for i in range(K):
        allowed = sorted(set(range(K)) - scheme.noise_sets[i])
        for size in range(1, len(allowed) + 1):
            for J in itertools.combinations(allowed, size):
                row = np.zeros(K)
                num = 0.0
                for j in J:
                    row[j] = 1.0
                    num += H[i, j] ** 2 * P[j]
                rows.append(row)
                rhs.append(0.5 * math.log2(1.0 + num / (1.0 + Q[i])))
    A = np.array(rows)
    b = np.array(rhs)
    return _simplex_maximize(np.ones(K), A, b)
