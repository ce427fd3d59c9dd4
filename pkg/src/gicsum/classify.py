"""Channel-level classification: best certificate over all schemes."""

from __future__ import annotations

from .core import (K_MAX_DEFAULT, STATUS_ACHIEVABLE, STATUS_CERTIFIED,
                   CapacityVerdict, RhoWitness, ShkScheme, StandardGic,
                   enumerate_schemes, shk_rate_point)
from .search import SearchConfig
from .theorem1 import _achievability_details, classify_theorem1, genie_search
from .theorem2 import max_achievable_sum_rate
from .theorem3 import classify_theorem2_3


def classify_scheme(gic: StandardGic, scheme: ShkScheme,
                    cfg: SearchConfig | None = None) -> CapacityVerdict:
    """Verdict for one fixed scheme: first family, then the pair-bound family."""
    cfg = cfg or SearchConfig()
    report = classify_theorem1(gic, scheme, cfg)
    if report.certified:
        return CapacityVerdict(STATUS_CERTIFIED, scheme, "T1",
                               report.capacity_bits, report.converse_witness)
    return classify_theorem2_3(gic, scheme, cfg)


def certify_channel(gic: StandardGic, cfg: SearchConfig | None = None,
                    k_max: int = K_MAX_DEFAULT) -> CapacityVerdict | None:
    """First certificate over all schemes, or None.  Feasibility searches
    stop at the first admissible point, so this is the fast path for
    certified/not-certified questions."""
    cfg = cfg or SearchConfig()
    schemes = enumerate_schemes(gic.K, k_max)
    for scheme in schemes:
        ok, _, _ = _achievability_details(gic, scheme, cfg.tol)
        if not ok:
            continue
        out = genie_search(gic, scheme, cfg, early_exit=True)
        if out.feasible:
            witness = RhoWitness(tuple(float(r) for r in out.rho), eps=cfg.eps_rho)
            return CapacityVerdict(STATUS_CERTIFIED, scheme, "T1",
                                   shk_rate_point(gic, scheme)[1], witness)
    for scheme in schemes:
        verdict = classify_theorem2_3(gic, scheme, cfg)
        if verdict.certified:
            return verdict
    return None


def classify_channel(gic: StandardGic, cfg: SearchConfig | None = None,
                     k_max: int = K_MAX_DEFAULT,
                     per_scheme: bool = False):
    """Best verdict over every scheme (plus per-scheme verdicts on request).

    Certified verdicts win; otherwise the best achievable sum rate over all
    schemes is reported.
    """
    cfg = cfg or SearchConfig()
    schemes = enumerate_schemes(gic.K, k_max)
    verdicts = []
    best_cert = None
    best_rate = -float("inf")
    best_rate_scheme = None
    for scheme in schemes:
        v = classify_scheme(gic, scheme, cfg)
        verdicts.append(v)
        if v.certified and best_cert is None:
            best_cert = v
            if not per_scheme:
                break
        rate = v.sum_bits if v.sum_bits is not None else \
            max_achievable_sum_rate(gic, scheme)
        if rate > best_rate:
            best_rate, best_rate_scheme = rate, scheme
    if best_cert is not None:
        best = best_cert
    else:
        best = CapacityVerdict(STATUS_ACHIEVABLE, best_rate_scheme, None, best_rate)
    return (best, verdicts) if per_scheme else (best, None)
