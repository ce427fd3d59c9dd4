"""Multi-resolution grid search for genie correlation parameters.

Both converse families reduce to the same feasibility question: do
correlation values rho in (0,1)^K exist satisfying a set of smooth
inequalities?  The two constraint shapes are

* reciprocal:  1/(P + ((1+Q)/rho_i)^2)  >=  sum_t c_t / (1 + q_t - rho_{j_t}^2)
* power:       1 - rho_b^2              >=  sum_t c_t / rho_{j_t}^2

A returned feasible point is a proof; an exhausted search is only
best-effort evidence of infeasibility.  The scan is deterministic: grids
are fixed by the config, ties keep the first (lexicographically smallest)
point, and a cheap per-constraint bound over the whole box prunes clearly
infeasible systems before any scan runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import min_slack_scan

INT = np.int64


@dataclass(frozen=True)
class SearchConfig:
    coarse_step: float = 0.05
    refine_steps: tuple[float, ...] = (0.01, 0.002)
    eps_rho: float = 1e-6
    tol: float = 1e-9

    def to_json(self) -> dict:
        return {"coarse_step": self.coarse_step,
                "refine_steps": list(self.refine_steps),
                "eps_rho": self.eps_rho, "tol": self.tol}

    @classmethod
    def from_json(cls, obj: dict) -> "SearchConfig":
        return cls(coarse_step=float(obj.get("coarse_step", 0.05)),
                   refine_steps=tuple(float(s) for s in obj.get("refine_steps", (0.01, 0.002))),
                   eps_rho=float(obj.get("eps_rho", 1e-6)),
                   tol=float(obj.get("tol", 1e-9)))

    def refined_once(self) -> "SearchConfig":
        """Same search with one extra refinement level (1/5 of the last step)."""
        extra = self.refine_steps[-1] / 5.0 if self.refine_steps else self.coarse_step / 5.0
        return SearchConfig(self.coarse_step, self.refine_steps + (extra,),
                            self.eps_rho, self.tol)


class ConstraintSystem:
    """Compiled form of one feasibility problem, consumed by the scan kernels."""

    __slots__ = ("K", "rho_base", "free_idx",
                 "rec_rho", "rec_pw", "rec_q", "rec_ptr", "rec_j", "rec_c", "rec_qd",
                 "pow_rho", "pow_ptr", "pow_j", "pow_c")

    def __init__(self, K, fixed: dict[int, float], free: list[int],
                 reciprocal: list[tuple[int, float, float, list[tuple[int, float, float]]]],
                 power: list[tuple[int, list[tuple[int, float]]]]):
        """reciprocal rows are (rho_index, P, Q, [(j, coeff, q_den), ...]);
        power rows are (rho_index, [(j, coeff), ...])."""
        self.K = K
        base = np.full(K, 0.5)
        for i, v in fixed.items():
            base[i] = v
        self.rho_base = base
        self.free_idx = np.array(sorted(free), dtype=INT)

        self.rec_rho = np.array([r[0] for r in reciprocal], dtype=INT)
        self.rec_pw = np.array([r[1] for r in reciprocal], dtype=float)
        self.rec_q = np.array([r[2] for r in reciprocal], dtype=float)
        ptr, js, cs, qs = [0], [], [], []
        for _, _, _, terms in reciprocal:
            for j, c, qd in terms:
                js.append(j); cs.append(c); qs.append(qd)
            ptr.append(len(js))
        self.rec_ptr = np.array(ptr, dtype=INT)
        self.rec_j = np.array(js, dtype=INT)
        self.rec_c = np.array(cs, dtype=float)
        self.rec_qd = np.array(qs, dtype=float)

        self.pow_rho = np.array([p[0] for p in power], dtype=INT)
        ptr, js, cs = [0], [], []
        for _, terms in power:
            for j, c in terms:
                js.append(j); cs.append(c)
            ptr.append(len(js))
        self.pow_ptr = np.array(ptr, dtype=INT)
        self.pow_j = np.array(js, dtype=INT)
        self.pow_c = np.array(cs, dtype=float)


@dataclass(frozen=True)
class SearchOutcome:
    feasible: bool
    best_slack: float
    rho: np.ndarray | None
    prefiltered: bool = False


def coarse_axis(cfg: SearchConfig) -> np.ndarray:
    """Grid values ``eps, step, 2*step, ..., 1-step, 1-eps``."""
    n = int(round(1.0 / cfg.coarse_step))
    vals = np.arange(1, n) * cfg.coarse_step
    lo, hi = cfg.eps_rho, 1.0 - cfg.eps_rho
    vals = vals[(vals > lo) & (vals < hi)]
    return np.concatenate(([lo], vals, [hi]))


def refine_axis(center: float, halfwidth: float, step: float, cfg: SearchConfig) -> np.ndarray:
    lo = max(cfg.eps_rho, center - halfwidth)
    hi = min(1.0 - cfg.eps_rho, center + halfwidth)
    n = int(round(halfwidth / step))
    vals = center + np.arange(-n, n + 1) * step
    vals = vals[(vals >= lo) & (vals <= hi)]
    out = np.unique(np.concatenate(([lo], vals, [hi])))
    return out


def slack_upper_bound(system: ConstraintSystem, cfg: SearchConfig) -> float:
    """Least upper bound on the min-slack over the whole search box.

    Each constraint is relaxed independently to its most favourable corner,
    so a negative value here certifies box-wide infeasibility.
    """
    lo, hi = cfg.eps_rho, 1.0 - cfg.eps_rho
    free = set(int(i) for i in system.free_idx)
    rho_hi = np.array([hi if i in free else system.rho_base[i] for i in range(system.K)])
    rho_lo = np.array([lo if i in free else system.rho_base[i] for i in range(system.K)])
    ub = np.inf
    for r in range(len(system.rec_rho)):
        v = (1.0 + system.rec_q[r]) / rho_hi[system.rec_rho[r]]
        s = 1.0 / (system.rec_pw[r] + v * v)
        for t in range(system.rec_ptr[r], system.rec_ptr[r + 1]):
            rj = rho_lo[system.rec_j[t]]
            s -= system.rec_c[t] / (1.0 + system.rec_qd[t] - rj * rj)
        ub = min(ub, s)
    for p in range(len(system.pow_rho)):
        rb = rho_lo[system.pow_rho[p]]
        s = 1.0 - rb * rb
        for t in range(system.pow_ptr[p], system.pow_ptr[p + 1]):
            rj = rho_hi[system.pow_j[t]]
            s -= system.pow_c[t] / (rj * rj)
        ub = min(ub, s)
    return float(ub)


def box_infeasible(system: ConstraintSystem, cfg: SearchConfig,
                   max_rounds: int = 8) -> bool:
    """Interval propagation over the constraints (with the acceptance slack
    folded in).  True means no point of the box can reach slack >= -tol, so
    the scan can be skipped entirely.  Sound but incomplete."""
    K = system.K
    tol = cfg.tol
    free = set(int(i) for i in system.free_idx)
    lo = np.array([cfg.eps_rho if i in free else system.rho_base[i] for i in range(K)])
    hi = np.array([1.0 - cfg.eps_rho if i in free else system.rho_base[i] for i in range(K)])
    for _ in range(max_rounds):
        changed = False
        for p in range(len(system.pow_rho)):
            b = system.pow_rho[p]
            terms = range(system.pow_ptr[p], system.pow_ptr[p + 1])
            least = sum(system.pow_c[t] / (hi[system.pow_j[t]] ** 2) for t in terms)
            # bound on the budget variable
            cap = 1.0 + tol - least
            if cap < lo[b] ** 2:
                return True
            if b in free and cap < hi[b] ** 2:
                hi[b] = math.sqrt(cap)
                changed = True
            # bounds on each contributing variable
            for t in terms:
                c = system.pow_c[t]
                if c <= 0.0:
                    continue
                j = system.pow_j[t]
                rest = least - c / hi[j] ** 2
                budget = 1.0 + tol - lo[b] ** 2 - rest
                if budget <= 0.0:
                    return True
                need = c / budget
                if need > hi[j] ** 2:
                    return True
                if j in free and need > lo[j] ** 2:
                    lo[j] = math.sqrt(need)
                    changed = True
        for r in range(len(system.rec_rho)):
            i = system.rec_rho[r]
            terms = range(system.rec_ptr[r], system.rec_ptr[r + 1])
            least = sum(system.rec_c[t] /
                        ((1.0 + system.rec_qd[t]) - lo[system.rec_j[t]] ** 2)
                        for t in terms)
            if least - tol <= 0.0:
                continue
            v = (1.0 + system.rec_q[r]) / hi[i]
            if 1.0 / (system.rec_pw[r] + v * v) + tol < least:
                return True
            # the receiving variable must be large enough
            cap = 1.0 / (least - tol) - system.rec_pw[r]
            if cap <= 0.0:
                return True
            need = (1.0 + system.rec_q[r]) / math.sqrt(cap)
            if need > hi[i]:
                return True
            if i in free and need > lo[i]:
                lo[i] = need
                changed = True
        if not changed:
            break
    return False


def _scan(system: ConstraintSystem, axes: list[np.ndarray], exit_slack: float | None):
    return min_slack_scan(
        system.rho_base, system.free_idx, axes,
        system.rec_rho, system.rec_pw, system.rec_q,
        system.rec_ptr, system.rec_j, system.rec_c, system.rec_qd,
        system.pow_rho, system.pow_ptr, system.pow_j, system.pow_c,
        exit_slack)


def solve(system: ConstraintSystem, cfg: SearchConfig, early_exit: bool = False) -> SearchOutcome:
    """Coarse scan plus local refinements; returns the best point found.

    A propagation prefilter skips the scan when the box is provably empty;
    such outcomes carry the corner bound on the slack instead of an attained
    value.
    """
    if box_infeasible(system, cfg):
        return SearchOutcome(False, slack_upper_bound(system, cfg), None,
                             prefiltered=True)

    exit_slack = -cfg.tol if early_exit else None
    nfree = len(system.free_idx)

    def outcome(slack, free_vals):
        rho = system.rho_base.copy()
        rho[system.free_idx] = free_vals
        return SearchOutcome(bool(slack >= -cfg.tol), float(slack), rho)

    if nfree == 0:
        slack, vals, _ = _scan(system, [], None)
        return outcome(slack, vals)

    axes = [coarse_axis(cfg)] * nfree
    best_slack, best_vals, early = _scan(system, axes, exit_slack)
    if early:
        return outcome(best_slack, best_vals)

    prev = cfg.coarse_step
    for step in cfg.refine_steps:
        axes = [refine_axis(float(c), prev, step, cfg) for c in best_vals]
        slack, vals, early = _scan(system, axes, exit_slack)
        if early:
            return outcome(slack, vals)
        if slack > best_slack:
            best_slack, best_vals = slack, vals
        prev = step

    return outcome(best_slack, best_vals)
