"""Second family of sum-capacity certificates.

One receiver pair (m, k) is singled out: user k's rate is absorbed into
receiver m's MAC bound (the pair bound), and a genie construction shows
that bound is also a sum-capacity upper bound when a coupled system of
correlation inequalities is feasible.  The correlation of user k is pinned
by an exact smartness identity; the remaining ones are searched.

Capacity is certified for a scheme when the pair bound is simultaneously
the scheme's least achievable-sum-rate bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import (STATUS_ACHIEVABLE, STATUS_CERTIFIED, CapacityVerdict,
                   RhoWitness, ShkScheme, StandardGic)
from .search import ConstraintSystem, SearchConfig, SearchOutcome, solve
from .theorem2 import max_achievable_sum_rate

NEAR_TIGHT_TOL = 1e-6


@dataclass(frozen=True)
class Theorem3Config:
    """Noise-side sets G plus the distinguished pair (m, k)."""

    G: tuple[frozenset[int], ...]
    m: int
    k: int

    def __post_init__(self):
        K = len(self.G)
        if self.m == self.k:
            raise ValueError("m and k must differ")
        if not (0 <= self.m < K and 0 <= self.k < K):
            raise ValueError("pair index out of range")
        for i in range(K):
            if i == self.k:
                continue
            if self.m in self.G[i] or self.k in self.G[i]:
                raise ValueError("pair users may not be treated as noise "
                                 "outside receiver k")

    @property
    def K(self) -> int:
        return len(self.G)

    def delta(self, r: int) -> bool:
        return r in self.G[self.m]

    def q_vector(self, gic: StandardGic) -> np.ndarray:
        Q = np.zeros(self.K)
        for i in range(self.K):
            for j in sorted(self.G[i]):
                Q[i] += gic.H[i, j] ** 2 * gic.P[j]
        return Q


def config_from_scheme(gic: StandardGic, scheme: ShkScheme,
                       m: int, k: int) -> Theorem3Config | None:
    """G(i) is the scheme's noise set with zero-gain members dropped.

    Dropping them changes no sum in the conditions (their coefficients are
    zero) but lets partially connected channels meet the pair precondition.
    """
    G = tuple(frozenset(j for j in s if gic.H[i, j] != 0.0)
              for i, s in enumerate(scheme.noise_sets))
    try:
        return Theorem3Config(G, m, k)
    except ValueError:
        return None


def fixed_rho_k(gic: StandardGic, cfg: Theorem3Config,
                eps: float = 1e-6) -> float | None:
    """Correlation of user k pinned by the smartness identity, if admissible."""
    h_mk = gic.H[cfg.m, cfg.k]
    if h_mk <= 0.0:
        return None
    qm = float(cfg.q_vector(gic)[cfg.m])
    rho = (1.0 + qm) / h_mk
    if not (eps < rho < 1.0 - eps):
        return None
    return rho


def _system(gic: StandardGic, cfg: Theorem3Config, rho_k: float) -> ConstraintSystem:
    K, H, P = gic.K, gic.H, gic.P
    Q = cfg.q_vector(gic)
    free = [r for r in range(K) if r not in (cfg.m, cfg.k)]
    reciprocal = []
    power = []
    for r in free:
        terms = [(i, H[i, r] ** 2, float(Q[i]))
                 for i in free if r in cfg.G[i]]
        if cfg.delta(r):
            terms.append((cfg.k, H[cfg.m, r] ** 2, float(Q[cfg.m])))
        reciprocal.append((r, float(P[r]), float(Q[r]), terms))
    for i in free:
        power.append((i, [(j, H[i, j] ** 2 * (1.0 + Q[j]) ** 2)
                          for j in sorted(cfg.G[i])]))
    power.append((cfg.k, [(j, H[cfg.m, j] ** 2 * (1.0 + Q[j]) ** 2)
                          for j in sorted(cfg.G[cfg.m])]))
    return ConstraintSystem(K, fixed={cfg.k: rho_k}, free=free,
                            reciprocal=reciprocal, power=power)


def theorem3_search(gic: StandardGic, cfg: Theorem3Config,
                    search_cfg: SearchConfig,
                    early_exit: bool = False) -> SearchOutcome | None:
    rho_k = fixed_rho_k(gic, cfg, search_cfg.eps_rho)
    if rho_k is None:
        return None
    return solve(_system(gic, cfg, rho_k), search_cfg, early_exit=early_exit)


def _witness(cfg: Theorem3Config, rho: np.ndarray, eps: float) -> RhoWitness:
    vals: list[float | None] = []
    for i in range(cfg.K):
        vals.append(None if i == cfg.m else float(rho[i]))
    return RhoWitness(tuple(vals), eps=eps)


def check_theorem3(gic: StandardGic, cfg: Theorem3Config,
                   search_cfg: SearchConfig,
                   strict_gain_check: bool = False) -> RhoWitness | None:
    """Feasible correlation witness for the pair upper bound, or None."""
    if strict_gain_check:
        for i in range(cfg.K):
            if any(gic.H[i, j] ** 2 > 1.0 for j in cfg.G[i]):
                return None
    out = theorem3_search(gic, cfg, search_cfg)
    if out is None or not out.feasible:
        return None
    return _witness(cfg, out.rho, search_cfg.eps_rho)


def theorem3_upper_bound(gic: StandardGic, cfg: Theorem3Config) -> float:
    """Pair bound: users m and k share receiver m's MAC, everyone else is solo."""
    Q = cfg.q_vector(gic)
    total = 0.0
    for i in range(gic.K):
        if i == cfg.k:
            continue
        if i == cfg.m:
            num = gic.P[cfg.m] + gic.H[cfg.m, cfg.k] ** 2 * gic.P[cfg.k]
        else:
            num = gic.P[i]
        total += 0.5 * math.log2(1.0 + num / (1.0 + Q[i]))
    return total


def classify_theorem2_3(gic: StandardGic, scheme: ShkScheme,
                        search_cfg: SearchConfig | None = None,
                        strict_gain_check: bool = False) -> CapacityVerdict:
    """Certify capacity when some pair bound is both tight and genie-valid."""
    search_cfg = search_cfg or SearchConfig()
    max_ach = max_achievable_sum_rate(gic, scheme)
    notes: list[str] = []
    if strict_gain_check:
        notes.append("strict_gain_check")
    for m, k in itertools.permutations(range(gic.K), 2):
        cfg = config_from_scheme(gic, scheme, m, k)
        if cfg is None:
            continue
        if fixed_rho_k(gic, cfg, search_cfg.eps_rho) is None:
            continue
        ub = theorem3_upper_bound(gic, cfg)
        if abs(ub - max_ach) > search_cfg.tol:
            if abs(ub - max_ach) <= NEAR_TIGHT_TOL:
                notes.append(f"near_tight_pair_{m + 1}_{k + 1}")
            continue
        witness = check_theorem3(gic, cfg, search_cfg, strict_gain_check)
        if witness is not None:
            return CapacityVerdict(STATUS_CERTIFIED, scheme, "T2+T3",
                                   max_ach, witness, (m, k), tuple(notes))
    return CapacityVerdict(STATUS_ACHIEVABLE, scheme, None, max_ach,
                           notes=tuple(notes))
