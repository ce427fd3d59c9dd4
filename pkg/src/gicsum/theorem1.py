"""First family of sum-capacity conditions.

Achievability: every receiver jointly decodes its set of decoded
interferers on top of the noise floor left by the treated-as-noise ones;
the fixed rate point is inside all of those MAC regions.

Converse: a genie gives each receiver a noisy copy of its own input with
noise correlation rho_i against the receiver noise.  Feasible correlations
(two inequality families per user: a reciprocal one and a power-budget
one) certify that the achieved sum rate is the sum capacity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import (RATE_TOL, RhoWitness, ShkScheme, StandardGic,
                   noise_power_vector, shk_rate_point)
from .search import ConstraintSystem, SearchConfig, SearchOutcome, solve


@dataclass(frozen=True)
class Theorem1Report:
    achievability_ok: bool
    violated: tuple[tuple[int, frozenset[int]], ...]
    tight_constraints: tuple[tuple[int, frozenset[int]], ...]
    converse_witness: RhoWitness | None
    best_slack: float
    vacuous_indices: tuple[int, ...]
    capacity_bits: float | None

    @property
    def certified(self) -> bool:
        return self.capacity_bits is not None


def _achievability_details(gic: StandardGic, scheme: ShkScheme, tol: float):
    H, P = gic.H, gic.P
    Q = noise_power_vector(gic, scheme)
    own = 1.0 + P / (1.0 + Q)
    violated, tight = [], []
    for i in range(gic.K):
        decoded = sorted(scheme.decode_sets[i])
        denom = 1.0 + P[i] + Q[i]
        for size in range(1, len(decoded) + 1):
            for J in itertools.combinations(decoded, size):
                lhs = 1.0
                num = 0.0
                for j in J:
                    lhs *= own[j]
                    num += H[i, j] ** 2 * P[j]
                rhs = 1.0 + num / denom
                if rhs - lhs < -tol:
                    violated.append((i, frozenset(J)))
                elif abs(rhs - lhs) <= tol:
                    tight.append((i, frozenset(J)))
    return not violated, tuple(violated), tuple(tight)


def check_decoding_achievability(gic: StandardGic, scheme: ShkScheme,
                                 tol: float = RATE_TOL):
    """True iff the decode-and-cancel rate point fits every receiver's MAC."""
    ok, violated, _ = _achievability_details(gic, scheme, tol)
    return ok, list(violated)


def converse_system(gic: StandardGic, scheme: ShkScheme) -> ConstraintSystem:
    """Both converse inequality families as one constraint system over rho."""
    K, H, P = gic.K, gic.H, gic.P
    Q = noise_power_vector(gic, scheme)
    reciprocal = []
    power = []
    for i in range(K):
        rec_terms = [(j, H[j, i] ** 2, Q[j])
                     for j in range(K) if i in scheme.noise_sets[j]]
        reciprocal.append((i, float(P[i]), float(Q[i]), rec_terms))
        pow_terms = [(j, H[i, j] ** 2 * (1.0 + Q[j]) ** 2)
                     for j in sorted(scheme.noise_sets[i])]
        power.append((i, pow_terms))
    return ConstraintSystem(K, fixed={}, free=list(range(K)),
                            reciprocal=reciprocal, power=power)


def converse_min_slack(gic: StandardGic, scheme: ShkScheme, rho) -> float:
    """Re-evaluate both condition families at a fixed rho (witness audit)."""
    rho = np.asarray(rho, dtype=float)
    K, H, P = gic.K, gic.H, gic.P
    Q = noise_power_vector(gic, scheme)
    slack = np.inf
    for i in range(K):
        v = (1.0 + Q[i]) / rho[i]
        s = 1.0 / (P[i] + v * v)
        for j in range(K):
            if i in scheme.noise_sets[j]:
                s -= H[j, i] ** 2 / (1.0 + Q[j] - rho[j] ** 2)
        slack = min(slack, s)
        s = 1.0 - rho[i] ** 2
        for j in sorted(scheme.noise_sets[i]):
            s -= H[i, j] ** 2 * (1.0 + Q[j]) ** 2 / rho[j] ** 2
        slack = min(slack, s)
    return float(slack)


def genie_search(gic: StandardGic, scheme: ShkScheme, cfg: SearchConfig,
                 early_exit: bool = False) -> SearchOutcome:
    return solve(converse_system(gic, scheme), cfg, early_exit=early_exit)


def check_genie_feasibility(gic: StandardGic, scheme: ShkScheme,
                            cfg: SearchConfig) -> RhoWitness | None:
    """A feasible correlation vector, or None if the search found none."""
    out = genie_search(gic, scheme, cfg)
    if not out.feasible:
        return None
    return RhoWitness(tuple(float(r) for r in out.rho), eps=cfg.eps_rho)


def classify_theorem1(gic: StandardGic, scheme: ShkScheme,
                      cfg: SearchConfig | None = None) -> Theorem1Report:
    """Run both condition families; certified iff both hold."""
    cfg = cfg or SearchConfig()
    ach_ok, violated, tight = _achievability_details(gic, scheme, cfg.tol)
    vacuous = tuple(i for i in range(gic.K)
                    if not any(i in scheme.noise_sets[j] for j in range(gic.K)))
    witness = None
    best_slack = -np.inf
    if ach_ok:
        out = genie_search(gic, scheme, cfg)
        best_slack = out.best_slack
        if out.feasible:
            witness = RhoWitness(tuple(float(r) for r in out.rho), eps=cfg.eps_rho)
    capacity = shk_rate_point(gic, scheme)[1] if (ach_ok and witness) else None
    return Theorem1Report(ach_ok, violated, tight, witness,
                          float(best_slack), vacuous, capacity)
