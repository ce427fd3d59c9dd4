"""Closed-form classifiers for the 2-user channel and partially connected
topologies (cyclic chain of interferers, cascade chain, many-to-one).

These re-derive the general certificates through per-topology closed forms
and therefore double as independent cross-checks of the general pipeline.
Closed-form witnesses are explicit feasible points of the correlation
conditions; on region boundaries they are clamped into the admissible box
and may sit at zero slack.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import (EPS_RHO, RATE_TOL, STATUS_ACHIEVABLE, STATUS_CERTIFIED,
                   CapacityVerdict, RhoWitness, ShkScheme, StandardGic,
                   half_log2)
from .errors import WrongTopology
from .search import ConstraintSystem, SearchConfig, solve
from .theorem2 import max_achievable_sum_rate

KIND_TWO_USER = "two_user"
KIND_CYCLIC = "cyclic"
KIND_CASCADE = "cascade"
KIND_MANY_TO_ONE = "many_to_one"
_KINDS = (KIND_TWO_USER, KIND_CYCLIC, KIND_CASCADE, KIND_MANY_TO_ONE)


@dataclass(frozen=True)
class PartialTopology:
    """Sparse channel described by its nonzero cross gains.

    cross gain layout (0-based):
      cyclic:       cross[i] is seen by receiver i from transmitter (i+1) % K
      cascade:      cross[i] is seen by receiver i from transmitter i+1,
                    i in 0..K-2; receiver K-1 is interference free
      many_to_one:  cross[j-1] is seen by receiver 0 from transmitter j
      two_user:     cross = (h12, h21)
    """

    kind: str
    cross: tuple[float, ...]
    P: tuple[float, ...]

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise WrongTopology(f"unknown topology kind {self.kind!r}")
        K = len(self.P)
        if K < 2:
            raise WrongTopology("partial topologies need at least two users")
        want = {KIND_TWO_USER: 2, KIND_CYCLIC: K,
                KIND_CASCADE: K - 1, KIND_MANY_TO_ONE: K - 1}[self.kind]
        if len(self.cross) != want or (self.kind == KIND_TWO_USER and K != 2):
            raise WrongTopology(f"{self.kind} with K={K} needs {want} cross gains")
        object.__setattr__(self, "cross", tuple(float(c) for c in self.cross))
        object.__setattr__(self, "P", tuple(float(p) for p in self.P))

    @property
    def K(self) -> int:
        return len(self.P)

    def embed(self) -> StandardGic:
        """StandardGic with exactly this topology's nonzero cross entries."""
        K = self.K
        H = np.eye(K)
        if self.kind == KIND_TWO_USER:
            H[0, 1], H[1, 0] = self.cross
        elif self.kind == KIND_CYCLIC:
            for i in range(K):
                H[i, (i + 1) % K] = self.cross[i]
        elif self.kind == KIND_CASCADE:
            for i in range(K - 1):
                H[i, i + 1] = self.cross[i]
        else:
            for j in range(1, K):
                H[0, j] = self.cross[j - 1]
        return StandardGic(K, H, np.array(self.P))

    def to_json(self) -> dict:
        return {"kind": self.kind, "h": list(self.cross), "P": list(self.P)}

    @classmethod
    def from_json(cls, obj: dict) -> "PartialTopology":
        try:
            return cls(str(obj["kind"]), tuple(obj["h"]), tuple(obj["P"]))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed topology object: {exc}") from exc


def _clamp_rho(x: float, eps: float = EPS_RHO) -> float:
    return min(max(x, eps), 1.0 - eps)


# ---------------------------------------------------------------------------
# 2-user closed forms

def _two_user_scheme(noise1: bool, noise2: bool) -> ShkScheme:
    return ShkScheme((frozenset({1} if noise1 else ()),
                      frozenset({0} if noise2 else ())))


def two_user_rows(gic: StandardGic, tol: float = RATE_TOL):
    """All closed-form rows as (row_id, satisfied, capacity, scheme, witness, mk)."""
    if gic.K != 2:
        raise WrongTopology("two-user classifier needs K=2")
    h12, h21 = gic.H[0, 1], gic.H[1, 0]
    p1, p2 = gic.P
    a = abs(h12) * (1.0 + h21 ** 2 * p1)
    b = abs(h21) * (1.0 + h12 ** 2 * p2)
    rows = []

    # noisy interference: both cross links weak enough to ignore
    delta = max(0.0, 1.0 - a - b) / 2.0
    w = RhoWitness((_clamp_rho(math.sqrt(b + delta)), _clamp_rho(math.sqrt(a + delta))))
    rows.append(("T1_1", a + b <= 1.0 + tol,
                 half_log2(p1 / (1.0 + h12 ** 2 * p2)) + half_log2(p2 / (1.0 + h21 ** 2 * p1)),
                 ShkScheme.tin(2), w, None))

    # one-sided decoding, receiver 1 decodes user 2
    w = RhoWitness((_clamp_rho(math.sqrt((1.0 + h21 ** 2) / 2.0)),
                    _clamp_rho(math.sqrt(max(0.0, 1.0 - h21 ** 2) / 2.0))))
    rows.append(("T1_2",
                 h21 ** 2 <= 1.0 + tol and
                 h12 ** 2 >= (1.0 + p1) / (1.0 + h21 ** 2 * p1) - tol,
                 half_log2(p1) + half_log2(p2 / (1.0 + h21 ** 2 * p1)),
                 _two_user_scheme(False, True), w, None))

    w = RhoWitness((_clamp_rho(math.sqrt(max(0.0, 1.0 - h12 ** 2) / 2.0)),
                    _clamp_rho(math.sqrt((1.0 + h12 ** 2) / 2.0))))
    rows.append(("T1_3",
                 h12 ** 2 <= 1.0 + tol and
                 h21 ** 2 >= (1.0 + p2) / (1.0 + h12 ** 2 * p2) - tol,
                 half_log2(p2) + half_log2(p1 / (1.0 + h12 ** 2 * p2)),
                 _two_user_scheme(True, False), w, None))

    # very strong: everything is decoded first
    rows.append(("T1_4",
                 h12 ** 2 >= 1.0 + p1 - tol and h21 ** 2 >= 1.0 + p2 - tol,
                 half_log2(p1) + half_log2(p2),
                 ShkScheme.all_decode(2), RhoWitness((0.5, 0.5)), None))

    # mixed: pair bound at receiver 1 is capacity (needs positive h12 for the
    # pinned correlation)
    rho2 = 1.0 / h12 if h12 > 0 else None
    ok = (rho2 is not None and EPS_RHO < rho2 < 1.0 - EPS_RHO and
          abs(h21) <= 1.0 + tol and
          h12 ** 2 <= (1.0 + p1) / (1.0 + h21 ** 2 * p1) + tol)
    rows.append(("T2_1", ok, half_log2(p1 + h12 ** 2 * p2),
                 _two_user_scheme(False, True),
                 RhoWitness((None, rho2)) if ok else None, (0, 1)))

    rho1 = 1.0 / h21 if h21 > 0 else None
    ok = (rho1 is not None and EPS_RHO < rho1 < 1.0 - EPS_RHO and
          abs(h12) <= 1.0 + tol and
          h21 ** 2 <= (1.0 + p2) / (1.0 + h12 ** 2 * p2) + tol)
    rows.append(("T2_2", ok, half_log2(p2 + h21 ** 2 * p1),
                 _two_user_scheme(True, False),
                 RhoWitness((rho1, None)) if ok else None, (1, 0)))

    # strong: both decode, the smaller pair bound is capacity
    ok = (rho2 is not None and EPS_RHO < rho2 < 1.0 - EPS_RHO and
          h12 ** 2 <= 1.0 + p1 + tol and
          p1 + h12 ** 2 * p2 <= p2 + h21 ** 2 * p1 + tol)
    rows.append(("T2_3", ok, half_log2(p1 + h12 ** 2 * p2),
                 ShkScheme.all_decode(2),
                 RhoWitness((None, rho2)) if ok else None, (0, 1)))
    ok = (rho1 is not None and EPS_RHO < rho1 < 1.0 - EPS_RHO and
          h21 ** 2 <= 1.0 + p2 + tol and
          p2 + h21 ** 2 * p1 <= p1 + h12 ** 2 * p2 + tol)
    rows.append(("T2_3", ok, half_log2(p2 + h21 ** 2 * p1),
                 ShkScheme.all_decode(2),
                 RhoWitness((rho1, None)) if ok else None, (1, 0)))
    return rows


def two_user_classify(gic: StandardGic, tol: float = RATE_TOL) -> CapacityVerdict:
    """First matching closed-form row, else the best achievable sum rate."""
    for row_id, ok, cap, scheme, witness, mk in two_user_rows(gic, tol):
        if ok:
            return CapacityVerdict(STATUS_CERTIFIED, scheme, row_id, cap,
                                   witness, mk)
    best = -math.inf
    best_scheme = None
    for noise1, noise2 in itertools.product((True, False), repeat=2):
        s = _two_user_scheme(noise1, noise2)
        r = max_achievable_sum_rate(gic, s)
        if r > best:
            best, best_scheme = r, s
    return CapacityVerdict(STATUS_ACHIEVABLE, best_scheme, None, best)


# ---------------------------------------------------------------------------
# chain topologies (cyclic / cascade)

def _splits(members: list[int]):
    """(noise_side, decode_side) partitions, smallest decode side first."""
    for size in range(len(members) + 1):
        for decode in itertools.combinations(members, size):
            dset = set(decode)
            yield set(members) - dset, dset


def _chain_q(topo: PartialTopology, noise_side: set[int]) -> np.ndarray:
    K = topo.K
    q = np.zeros(K)
    for i in noise_side:
        nxt = (i + 1) % K
        if topo.kind == KIND_CASCADE and i >= K - 1:
            continue
        q[i] = topo.cross[i] ** 2 * topo.P[nxt]
    return q


def _chain_scheme(topo: PartialTopology, noise_side: set[int]) -> ShkScheme:
    K = topo.K
    sets = []
    for i in range(K):
        full = set(range(K)) - {i}
        nxt = (i + 1) % K
        has_link = topo.kind == KIND_CYCLIC or i < K - 1
        if has_link and i not in noise_side:
            full -= {nxt}
        sets.append(frozenset(full))
    return ShkScheme(tuple(sets))


def _chain_converse_feasible(topo: PartialTopology, noise_side: set[int],
                             cfg: SearchConfig, fixed: dict[int, float]):
    """Correlation feasibility of the treat-as-noise receivers' conditions."""
    q = _chain_q(topo, noise_side)
    K = topo.K
    power = []
    involved: set[int] = set()
    for i in sorted(noise_side):
        nxt = (i + 1) % K
        power.append((i, [(nxt, topo.cross[i] ** 2 * (1.0 + q[nxt]) ** 2)]))
        involved |= {i, nxt}
    free = sorted(involved - set(fixed))
    system = ConstraintSystem(K, fixed=fixed, free=free, reciprocal=[], power=power)
    out = solve(system, cfg)
    if not out.feasible:
        return None
    rho: list[float | None] = [None] * K
    for i in free:
        rho[i] = float(out.rho[i])
    for i, v in fixed.items():
        rho[i] = v
    return rho


def _pair_coeffs(topo: PartialTopology, noise_side: set[int], decode_side: set[int]):
    """Best per-user singleton coefficients for the chain bounds."""
    K = topo.K
    q = _chain_q(topo, noise_side)
    coeff = np.ones(K)
    for j in range(K):
        has_own_link = topo.kind == KIND_CYCLIC or j < K - 1
        cands = [1.0 / (1.0 + q[j]) if (has_own_link and j in noise_side) else 1.0]
        prev = (j - 1) % K
        prev_has_link = topo.kind == KIND_CYCLIC or (0 <= prev < K - 1)
        if topo.kind == KIND_CASCADE and j == K - 1 and K - 2 in decode_side:
            cands = [1.0]  # terminal user keeps the unit coefficient
        elif prev_has_link and prev in decode_side:
            cands.append(topo.cross[prev] ** 2)
        coeff[j] = min(cands)
    return coeff


def _chain_pair_groups(decode_side: set[int], K: int, cyclic: bool):
    """Subsets of decode receivers whose pair groups do not overlap."""
    members = sorted(decode_side)
    for size in range(len(members) + 1):
        for combo in itertools.combinations(members, size):
            if any((i + 1) % K in combo if cyclic else i + 1 in combo
                   for i in combo):
                continue
            yield combo


def _chain_first_family(topo: PartialTopology, noise_side, decode_side,
                        cfg: SearchConfig, label: str) -> CapacityVerdict | None:
    K = topo.K
    q = _chain_q(topo, noise_side)
    for i in sorted(decode_side):
        nxt = (i + 1) % K
        if topo.cross[i] ** 2 * (1.0 + q[nxt]) < 1.0 + topo.P[i] - cfg.tol:
            return None
    rho = _chain_converse_feasible(topo, noise_side, cfg, fixed={})
    if rho is None:
        return None
    cap = sum(half_log2(topo.P[i] / (1.0 + q[i])) for i in range(K))
    return CapacityVerdict(STATUS_CERTIFIED, _chain_scheme(topo, noise_side),
                           f"{label}:first", cap,
                           RhoWitness(tuple(rho), eps=cfg.eps_rho))


def _chain_second_family(topo: PartialTopology, noise_side, decode_side,
                         cfg: SearchConfig, label: str) -> CapacityVerdict | None:
    K = topo.K
    cyclic = topo.kind == KIND_CYCLIC
    q = _chain_q(topo, noise_side)
    coeff = _pair_coeffs(topo, noise_side, decode_side)
    for k in sorted(decode_side):
        nxt = (k + 1) % K
        prev = (k - 1) % K
        # the pair construction treats users k and k+1 as clean side
        # information everywhere else, so the predecessor must decode
        prev_has_link = cyclic or prev < K - 1
        if prev != nxt and prev_has_link and prev not in decode_side:
            continue
        if topo.cross[k] <= 0:
            continue
        rho_pin = 1.0 / topo.cross[k]
        if not (cfg.eps_rho < rho_pin < 1.0 - cfg.eps_rho):
            continue
        target = half_log2(topo.P[k] + topo.cross[k] ** 2 * topo.P[nxt]) + \
            sum(half_log2(topo.P[j] / (1.0 + q[j]))
                for j in range(K) if j not in (k, nxt))
        ok = True
        for combo in _chain_pair_groups(decode_side, K, cyclic):
            covered = set()
            for j in combo:
                covered |= {j, (j + 1) % K}
            bound = sum(half_log2(topo.P[j] + topo.cross[j] ** 2 * topo.P[(j + 1) % K])
                        for j in combo)
            bound += sum(half_log2(coeff[j] * topo.P[j])
                         for j in range(K) if j not in covered)
            if target > bound + cfg.tol:
                ok = False
                break
        if ok and cyclic and len(decode_side) == K:
            double = sum(half_log2(topo.P[j] + topo.cross[j] ** 2 * topo.P[(j + 1) % K])
                         for j in range(K)) / 2.0
            ok = target <= double + cfg.tol
        if not ok:
            continue
        rho = _chain_converse_feasible(topo, noise_side, cfg, fixed={nxt: rho_pin})
        if rho is None:
            continue
        rho[nxt] = rho_pin
        rho[k] = None
        return CapacityVerdict(STATUS_CERTIFIED, _chain_scheme(topo, noise_side),
                               f"{label}:second", target,
                               RhoWitness(tuple(rho), eps=cfg.eps_rho),
                               mk_pair=(k, nxt))
    return None


def _chain_classify(topo: PartialTopology, cfg: SearchConfig,
                    label: str) -> CapacityVerdict:
    K = topo.K
    members = list(range(K)) if topo.kind == KIND_CYCLIC else list(range(K - 1))
    for noise_side, decode_side in _splits(members):
        v = _chain_first_family(topo, noise_side, decode_side, cfg, label)
        if v is not None:
            return v
        v = _chain_second_family(topo, noise_side, decode_side, cfg, label)
        if v is not None:
            return v
    gic = topo.embed()
    best = -math.inf
    best_scheme = None
    for noise_side, _ in _splits(members):
        s = _chain_scheme(topo, noise_side)
        r = max_achievable_sum_rate(gic, s)
        if r > best:
            best, best_scheme = r, s
    return CapacityVerdict(STATUS_ACHIEVABLE, best_scheme, None, best)


def cyclic_classify(topo: PartialTopology,
                    cfg: SearchConfig | None = None) -> CapacityVerdict:
    if topo.kind != KIND_CYCLIC:
        raise WrongTopology("cyclic classifier needs a cyclic topology")
    return _chain_classify(topo, cfg or SearchConfig(), KIND_CYCLIC)


def cascade_classify(topo: PartialTopology,
                     cfg: SearchConfig | None = None) -> CapacityVerdict:
    if topo.kind != KIND_CASCADE:
        raise WrongTopology("cascade classifier needs a cascade topology")
    return _chain_classify(topo, cfg or SearchConfig(), KIND_CASCADE)


# ---------------------------------------------------------------------------
# many-to-one

def _mto_scheme(K: int, decoded: set[int]) -> ShkScheme:
    sets = [frozenset(set(range(1, K)) - decoded)]
    for i in range(1, K):
        sets.append(frozenset(set(range(K)) - {i}))
    return ShkScheme(tuple(sets))


def many_to_one_classify(topo: PartialTopology,
                         cfg: SearchConfig | None = None) -> CapacityVerdict:
    """Search every decoded subset at the shared receiver, cheapest first."""
    if topo.kind != KIND_MANY_TO_ONE:
        raise WrongTopology("many-to-one classifier needs a many_to_one topology")
    cfg = cfg or SearchConfig()
    K = topo.K
    P = topo.P
    gain = {j: topo.cross[j - 1] for j in range(1, K)}

    for size in range(K):
        for decoded_t in itertools.combinations(range(1, K), size):
            decoded = set(decoded_t)
            noise = set(range(1, K)) - decoded
            q0 = sum(gain[j] ** 2 * P[j] for j in sorted(noise))
            denom = 1.0 + P[0] + q0

            # first family: decode-and-cancel plus weak residual interference
            ach = all(
                math.prod(1.0 + P[j] for j in J) <=
                1.0 + sum(gain[j] ** 2 * P[j] for j in J) / denom + cfg.tol
                for sz in range(1, size + 1)
                for J in itertools.combinations(sorted(decoded), sz))
            if ach and sum(gain[j] ** 2 for j in noise) <= 1.0 + cfg.tol:
                cap = half_log2(P[0] / (1.0 + q0)) + \
                    sum(half_log2(P[i]) for i in range(1, K))
                rho: list[float | None] = [_clamp_rho(0.0)] + [None] * (K - 1)
                for j in noise:
                    rho[j] = _clamp_rho(1.0)
                return CapacityVerdict(STATUS_CERTIFIED, _mto_scheme(K, decoded),
                                       f"{KIND_MANY_TO_ONE}:first", cap,
                                       RhoWitness(tuple(rho), eps=cfg.eps_rho))

            # second family: one decoded user pairs with the shared receiver
            for k in sorted(decoded):
                if gain[k] <= 0:
                    continue
                rho_pin = (1.0 + q0) / gain[k]
                if not (cfg.eps_rho < rho_pin < 1.0 - cfg.eps_rho):
                    continue
                if sum(gain[j] ** 2 for j in noise) > 1.0 - rho_pin ** 2 + cfg.tol:
                    continue
                others = sorted(decoded - {k})
                rhs = math.prod(1.0 + P[i] for i in others) * \
                    (1.0 + P[0] + q0 + gain[k] ** 2 * P[k])
                dominant = True
                for sz in range(size + 1):
                    for N in itertools.combinations(sorted(decoded), sz):
                        if set(N) == set(others):
                            continue
                        rest = decoded - set(N)
                        lhs = math.prod(1.0 + P[i] for i in N) * \
                            (1.0 + P[0] + q0 + sum(gain[i] ** 2 * P[i] for i in sorted(rest)))
                        if lhs < rhs - cfg.tol:
                            dominant = False
                            break
                    if not dominant:
                        break
                if not dominant:
                    continue
                cap = sum(half_log2(P[i]) for i in range(1, K) if i != k) + \
                    half_log2((P[0] + gain[k] ** 2 * P[k]) / (1.0 + q0))
                rho = [None] * K
                rho[k] = rho_pin
                for j in noise:
                    rho[j] = _clamp_rho(1.0)
                return CapacityVerdict(STATUS_CERTIFIED, _mto_scheme(K, decoded),
                                       f"{KIND_MANY_TO_ONE}:second", cap,
                                       RhoWitness(tuple(rho), eps=cfg.eps_rho),
                                       mk_pair=(0, k))

    gic = topo.embed()
    best = -math.inf
    best_scheme = None
    for size in range(K):
        for decoded_t in itertools.combinations(range(1, K), size):
            s = _mto_scheme(K, set(decoded_t))
            r = max_achievable_sum_rate(gic, s)
            if r > best:
                best, best_scheme = r, s
    return CapacityVerdict(STATUS_ACHIEVABLE, best_scheme, None, best)


def classify_topology(topo: PartialTopology,
                      cfg: SearchConfig | None = None) -> CapacityVerdict:
    if topo.kind == KIND_TWO_USER:
        return two_user_classify(topo.embed())
    if topo.kind == KIND_CYCLIC:
        return cyclic_classify(topo, cfg)
    if topo.kind == KIND_CASCADE:
        return cascade_classify(topo, cfg)
    return many_to_one_classify(topo, cfg)
