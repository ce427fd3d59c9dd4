"""Channel model, scheme encoding and the per-receiver Gaussian MAC rates.

A K-user Gaussian interference channel in standard form has unit direct
gains and unit noise variance; only the cross gains ``H[i, j]`` (receiver i,
transmitter j) and the transmit powers ``P`` remain.  A simple
Han-Kobayashi (S-HK) scheme is fully described by which interferers each
receiver treats as noise; everyone else it decodes and cancels.

All rates are in bits per channel use, computed as ``0.5 * log2(1 + snr)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDirectLink, EnumerationTooLarge, InvalidNoise, InvalidSubset

K_MAX_DEFAULT = 4
RATE_TOL = 1e-9
EPS_RHO = 1e-6

STATUS_CERTIFIED = "CapacityCertified"
STATUS_ACHIEVABLE = "AchievableOnly"
STATUS_UNKNOWN = "Unknown"


def half_log2(snr: float) -> float:
    """Rate of a Gaussian point-to-point link at the given SNR."""
    return 0.5 * math.log2(1.0 + snr)


@dataclass(frozen=True)
class StandardGic:
    """Standard-form channel: cross-gain matrix H (unit diagonal) and powers P."""

    K: int
    H: np.ndarray
    P: np.ndarray

    def __post_init__(self):
        H = np.array(self.H, dtype=float)
        P = np.array(self.P, dtype=float)
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if H.shape != (self.K, self.K) or P.shape != (self.K,):
            raise ValueError("H must be KxK and P length K")
        if not (np.isfinite(H).all() and np.isfinite(P).all()):
            raise ValueError("channel entries must be finite")
        if not np.all(np.diag(H) == 1.0):
            raise ValueError("direct gains must be exactly 1 in standard form")
        if not np.all(P > 0.0):
            raise ValueError("powers must be positive")
        H.setflags(write=False)
        P.setflags(write=False)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "P", P)

    def permuted(self, perm: tuple[int, ...]) -> "StandardGic":
        """Relabel users so that new index ``i`` is old index ``perm[i]``."""
        idx = np.asarray(perm)
        return StandardGic(self.K, self.H[np.ix_(idx, idx)].copy(), self.P[idx].copy())


@dataclass(frozen=True)
class ShkScheme:
    """Per-receiver partition of interferers into treated-as-noise vs decoded."""

    noise_sets: tuple[frozenset[int], ...]

    def __post_init__(self):
        K = len(self.noise_sets)
        sets = tuple(frozenset(s) for s in self.noise_sets)
        for i, s in enumerate(sets):
            if i in s:
                raise ValueError(f"receiver {i} cannot treat itself as noise")
            if any(j < 0 or j >= K for j in s):
                raise ValueError("noise set index out of range")
        object.__setattr__(self, "noise_sets", sets)

    @property
    def K(self) -> int:
        return len(self.noise_sets)

    @property
    def decode_sets(self) -> tuple[frozenset[int], ...]:
        K = self.K
        full = frozenset(range(K))
        return tuple(full - self.noise_sets[i] - {i} for i in range(K))

    @classmethod
    def tin(cls, K: int) -> "ShkScheme":
        """Treat every interferer as noise at every receiver."""
        return cls(tuple(frozenset(j for j in range(K) if j != i) for i in range(K)))

    @classmethod
    def all_decode(cls, K: int) -> "ShkScheme":
        return cls(tuple(frozenset() for _ in range(K)))

    @property
    def is_tin(self) -> bool:
        return all(len(s) == self.K - 1 for s in self.noise_sets)

    def max_decoded(self) -> int:
        """Largest number of interferers decoded at any single receiver."""
        return max(len(d) for d in self.decode_sets)

    def permuted(self, perm: tuple[int, ...]) -> "ShkScheme":
        """Apply the same user relabeling as :meth:`StandardGic.permuted`."""
        inv = {old: new for new, old in enumerate(perm)}
        return ShkScheme(tuple(frozenset(inv[j] for j in self.noise_sets[old])
                               for old in perm))


@dataclass(frozen=True)
class RhoWitness:
    """Genie correlation parameters certifying a converse; None marks unused slots."""

    rho: tuple[float | None, ...]
    eps: float = EPS_RHO

    def __post_init__(self):
        for r in self.rho:
            if r is None:
                continue
            if not (self.eps - 1e-12 <= r <= 1.0 - self.eps + 1e-12):
                raise ValueError(f"rho value {r} outside ({self.eps}, {1 - self.eps})")

    def as_array(self, fill: float = math.nan) -> np.ndarray:
        return np.array([fill if r is None else r for r in self.rho], dtype=float)


@dataclass(frozen=True)
class CapacityVerdict:
    """Outcome of classifying one channel (optionally for one fixed scheme)."""

    status: str
    scheme: ShkScheme | None
    theorem: str | None
    sum_bits: float | None
    witness: RhoWitness | None = None
    mk_pair: tuple[int, int] | None = None
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.status == STATUS_CERTIFIED and self.witness is None:
            raise ValueError("a certificate requires a witness")

    @property
    def certified(self) -> bool:
        return self.status == STATUS_CERTIFIED


def standardize(raw_gains, raw_powers, noise_powers) -> StandardGic:
    """Convert a physical channel (amplitude gains, powers, noise powers) to standard form.

    ``h_ij = g_ij * sqrt(N_j) / (g_jj * sqrt(N_i))`` and ``P_i = g_ii^2 * P~_i / N_i``.
    Already-standard channels pass through unchanged.
    """
    g = np.array(raw_gains, dtype=float)
    praw = np.array(raw_powers, dtype=float)
    nz = np.array(noise_powers, dtype=float)
    K = len(praw)
    if g.shape != (K, K) or nz.shape != (K,):
        raise ValueError("shape mismatch between gains, powers and noise powers")
    if np.any(np.diag(g) == 0.0):
        raise DegenerateDirectLink("zero direct gain")
    if np.any(nz <= 0.0):
        raise InvalidNoise("noise powers must be positive")
    H = np.empty((K, K))
    sq = np.sqrt(nz)
    for i in range(K):
        for j in range(K):
            H[i, j] = 1.0 if i == j else g[i, j] * sq[j] / (g[j, j] * sq[i])
    P = np.diag(g) ** 2 * praw / nz
    return StandardGic(K, H, P)


def interference_noise_power(gic: StandardGic, scheme: ShkScheme, i: int) -> float:
    """Noise-plus-treated-interference power above the unit floor at receiver i."""
    q = 0.0
    for j in sorted(scheme.noise_sets[i]):
        q += gic.H[i, j] ** 2 * gic.P[j]
    return q


def noise_power_vector(gic: StandardGic, scheme: ShkScheme) -> np.ndarray:
    return np.array([interference_noise_power(gic, scheme, i) for i in range(gic.K)])


def mac_group_rate(gic: StandardGic, scheme: ShkScheme, i: int, group) -> float:
    """Gaussian MAC sum-rate bound at receiver i for the users in ``group``.

    Only users the receiver does not treat as noise may appear in the group.
    """
    J = frozenset(group)
    if J & scheme.noise_sets[i]:
        raise InvalidSubset(f"group {sorted(J)} intersects noise set of receiver {i}")
    if any(j < 0 or j >= gic.K for j in J):
        raise InvalidSubset("group index out of range")
    qi = interference_noise_power(gic, scheme, i)
    num = 0.0
    for j in sorted(J):
        num += gic.H[i, j] ** 2 * gic.P[j]
    return half_log2(num / (1.0 + qi))


def shk_rate_point(gic: StandardGic, scheme: ShkScheme) -> tuple[np.ndarray, float]:
    """Per-user rates (and their sum) when decoded interference is cancelled."""
    rates = np.empty(gic.K)
    for i in range(gic.K):
        qi = interference_noise_power(gic, scheme, i)
        rates[i] = half_log2(gic.P[i] / (1.0 + qi))
    return rates, float(sum(rates))


def _noise_masks_desc(K: int, i: int) -> list[int]:
    """All treated-as-noise bitmasks for receiver i, largest (TIN) first."""
    full = ((1 << K) - 1) ^ (1 << i)
    return sorted((m for m in range(full + 1) if m & ~full == 0), reverse=True)


def mask_to_set(mask: int, K: int) -> frozenset[int]:
    return frozenset(j for j in range(K) if mask >> j & 1)


def enumerate_schemes(K: int, k_max: int = K_MAX_DEFAULT) -> list[ShkScheme]:
    """All 2^(K(K-1)) schemes, TIN first, descending per-receiver bitmask order."""
    if K > k_max:
        raise EnumerationTooLarge(f"K={K} exceeds the enumeration guard k_max={k_max}")
    axes = [_noise_masks_desc(K, i) for i in range(K)]
    return [ShkScheme(tuple(mask_to_set(m, K) for m in combo))
            for combo in itertools.product(*axes)]


# ---------------------------------------------------------------------------
# JSON interchange (user indices are 1-based on the wire)

def channel_to_json(gic: StandardGic) -> dict:
    return {"K": gic.K, "H": gic.H.tolist(), "P": gic.P.tolist()}


def channel_from_json(obj: dict) -> StandardGic:
    try:
        K = int(obj["K"])
        H = np.array(obj["H"], dtype=float)
        P = np.array(obj["P"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed channel object: {exc}") from exc
    if H.shape != (K, K) or not np.all(np.diag(H) == 1.0):
        raise ValueError("channel matrix must be KxK with unit diagonal")
    return StandardGic(K, H, P)


def scheme_to_json(scheme: ShkScheme) -> dict:
    return {"noise_sets": [sorted(j + 1 for j in s) for s in scheme.noise_sets]}


def scheme_from_json(obj: dict, K: int | None = None) -> ShkScheme:
    try:
        raw = obj["noise_sets"]
        sets = tuple(frozenset(int(j) - 1 for j in s) for s in raw)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed scheme object: {exc}") from exc
    if K is not None and len(sets) != K:
        raise ValueError(f"scheme has {len(sets)} receivers, expected {K}")
    return ShkScheme(sets)


def verdict_to_json(v: CapacityVerdict) -> dict:
    return {
        "status": v.status,
        "scheme": scheme_to_json(v.scheme)["noise_sets"] if v.scheme else None,
        "theorem": v.theorem,
        "sum_bits": v.sum_bits,
        "rho": None if v.witness is None else
               [None if r is None else r for r in v.witness.rho],
        "mk": None if v.mk_pair is None else [v.mk_pair[0] + 1, v.mk_pair[1] + 1],
        "notes": list(v.notes),
    }
