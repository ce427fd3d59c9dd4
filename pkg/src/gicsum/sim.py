"""Random wireless topologies, suburban path loss, and the Monte Carlo
estimate of how often the first condition family certifies sum capacity.

Three layouts are supported:

* T1: transmitters uniform in a 1 km disk, each receiver uniform in its
  transmitter's coverage disk of radius ``radius_m``.
* T2: one transmitter at the centre of a circle of radius ``radius_m``,
  the others equally spaced on its perimeter; the centre transmitter
  covers 3x the radius.
* T3: transmitters equally spaced on a line, each receiver placed to the
  right of its transmitter within one spacing.

Path loss follows the suburban empirical model with terrain-dependent
exponent ``gamma = a - b*h_b + c/h_b`` and lognormal shadowing; transmit
powers are set so the shadowing-free SNR at the nominal coverage boundary
is 0 dB.  Per-realization substreams of a counter-based generator make
parallel runs reproduce serial results exactly.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import ShkScheme, StandardGic, standardize
from .search import SearchConfig, solve
from .theorem1 import converse_system

SPEED_OF_LIGHT = 299792458.0
WILSON_Z = 1.959963984540054

CONDITION_SETS = ("tin", "shk_no_tin", "shk_any", "shk1_no_tin", "ach_only")


@dataclass(frozen=True)
class ErcegParams:
    """Suburban path-loss parameters (terrain category B defaults:
    hilly with light tree density)."""

    frequency_hz: float = 1.9e9
    terrain: str = "hilly_light_tree"
    a: float = 4.0
    b_per_m: float = 0.0065
    c_m: float = 17.1
    h_b_m: float = 30.0
    d0_m: float = 100.0
    sigma_s_db: float = 9.6
    d_min_m: float = 1.0

    def __post_init__(self):
        if self.d0_m <= 0:
            raise ValueError("reference distance must be positive")
        if not (10.0 <= self.h_b_m <= 80.0):
            raise ValueError("base antenna height outside the model's 10..80 m range")
        if self.sigma_s_db < 0:
            raise ValueError("shadowing deviation cannot be negative")

    @property
    def gamma(self) -> float:
        return self.a - self.b_per_m * self.h_b_m + self.c_m / self.h_b_m

    @property
    def intercept_db(self) -> float:
        return 20.0 * math.log10(4.0 * math.pi * self.d0_m * self.frequency_hz
                                 / SPEED_OF_LIGHT)

    def median_pathloss_db(self, distance_m: float) -> float:
        d = max(distance_m, self.d_min_m)
        return self.intercept_db + 10.0 * self.gamma * math.log10(d / self.d0_m)

    def to_json(self) -> dict:
        return {"frequency_hz": self.frequency_hz, "terrain": self.terrain,
                "a": self.a, "b_per_m": self.b_per_m, "c_m": self.c_m,
                "h_b_m": self.h_b_m, "d0_m": self.d0_m,
                "sigma_s_db": self.sigma_s_db, "d_min_m": self.d_min_m}

    @classmethod
    def from_json(cls, obj: dict) -> "ErcegParams":
        return cls(**{k: obj.get(k, getattr(cls, k)) for k in
                      ("frequency_hz", "terrain", "a", "b_per_m", "c_m",
                       "h_b_m", "d0_m", "sigma_s_db", "d_min_m")})


def erceg_pathloss_db(distance_m: float, params: ErcegParams, rng) -> float:
    """One path-loss draw: median plus a fresh lognormal shadowing term."""
    shadow = rng.normal(0.0, params.sigma_s_db) if params.sigma_s_db > 0 else 0.0
    return params.median_pathloss_db(distance_m) + shadow


@dataclass(frozen=True)
class TopologyConfig:
    kind: str  # "T1" | "T2" | "T3"
    K: int
    radius_m: float
    cell_radius_m: float = 1000.0
    realizations: int = 1000
    seed: int = 42

    def __post_init__(self):
        if self.kind not in ("T1", "T2", "T3"):
            raise ValueError(f"unknown topology kind {self.kind!r}")
        if self.radius_m <= 0 or self.cell_radius_m <= 0:
            raise ValueError("radii must be positive")
        if self.realizations < 1:
            raise ValueError("need at least one realization")
        if self.kind == "T2" and self.K < 2:
            raise ValueError("T2 needs a centre transmitter plus ring members")


@dataclass(frozen=True)
class TopologyRealization:
    tx: np.ndarray  # (K, 2) positions in metres
    rx: np.ndarray  # (K, 2)
    coverage_m: np.ndarray  # (K,) nominal coverage radius per transmitter


def _uniform_disk(center, radius, u):
    r = radius * math.sqrt(u[0])
    theta = 2.0 * math.pi * u[1]
    return (center[0] + r * math.cos(theta), center[1] + r * math.sin(theta))


def sample_topology(cfg: TopologyConfig, rng) -> TopologyRealization:
    K = cfg.K
    tx = np.zeros((K, 2))
    rx = np.zeros((K, 2))
    cov = np.full(K, cfg.radius_m)
    if cfg.kind == "T1":
        u_tx = rng.random((K, 2))
        u_rx = rng.random((K, 2))
        for i in range(K):
            tx[i] = _uniform_disk((0.0, 0.0), cfg.cell_radius_m, u_tx[i])
            rx[i] = _uniform_disk(tx[i], cfg.radius_m, u_rx[i])
    elif cfg.kind == "T2":
        for i in range(1, K):
            angle = 2.0 * math.pi * (i - 1) / (K - 1)
            tx[i] = (cfg.radius_m * math.cos(angle), cfg.radius_m * math.sin(angle))
        cov[0] = 3.0 * cfg.radius_m
        u_rx = rng.random((K, 2))
        for i in range(K):
            rx[i] = _uniform_disk(tx[i], cov[i], u_rx[i])
    else:  # T3
        u_rx = rng.random(K)
        for i in range(K):
            tx[i] = ((i + 1) * cfg.radius_m, 0.0)
            rx[i] = (tx[i][0] + (1.0 - u_rx[i]) * cfg.radius_m, 0.0)
    return TopologyRealization(tx, rx, cov)


def realize_standard_channel(realization: TopologyRealization, params: ErcegParams,
                             noise_floor_dbm: float, rng) -> StandardGic:
    """Draw all link losses, apply the boundary-SNR power rule, standardize.

    Transmit power is calibrated against the shadowing-free median loss at
    the nominal coverage radius, so standard-form powers do not depend on
    the shadowing draws of other links.
    """
    K = realization.tx.shape[0]
    pl = np.empty((K, K))
    for i in range(K):
        for j in range(K):
            d = float(np.hypot(*(realization.rx[i] - realization.tx[j])))
            pl[i, j] = erceg_pathloss_db(d, params, rng)
    p_dbm = np.array([noise_floor_dbm + params.median_pathloss_db(realization.coverage_m[j])
                      for j in range(K)])
    amplitudes = 10.0 ** (-pl / 20.0)
    powers_mw = 10.0 ** (p_dbm / 10.0)
    noise_mw = np.full(K, 10.0 ** (noise_floor_dbm / 10.0))
    return standardize(amplitudes, powers_mw, noise_mw)


# ---------------------------------------------------------------------------
# condition-set tallies

def wilson_interval(successes: int, trials: int, z: float = WILSON_Z):
    if trials == 0:
        return (0.0, 1.0)
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass
class ConditionSetStats:
    trials: int = 0
    successes: dict = field(default_factory=lambda: {name: 0 for name in CONDITION_SETS})

    def p(self, name: str) -> float:
        return self.successes[name] / self.trials if self.trials else math.nan

    def interval(self, name: str):
        return wilson_interval(self.successes[name], self.trials)

    def merge(self, other: "ConditionSetStats") -> "ConditionSetStats":
        merged = ConditionSetStats(self.trials + other.trials,
                                   {k: self.successes[k] + other.successes[k]
                                    for k in CONDITION_SETS})
        return merged


@dataclass(frozen=True)
class SweepPoint:
    radius_m: float
    stats: ConditionSetStats


@dataclass(frozen=True)
class SweepConfig:
    kind: str
    K: int
    radii_m: tuple[float, ...]
    realizations: int = 1000
    seed: int = 42
    noise_floor_dbm: float = -110.0
    cell_radius_m: float = 1000.0
    scheme_cap: int | None = None  # cap on feasibility searches per realization

    def to_json(self) -> dict:
        return {"kind": self.kind, "K": self.K, "radii_m": list(self.radii_m),
                "realizations": self.realizations, "seed": self.seed,
                "noise_floor_dbm": self.noise_floor_dbm,
                "cell_radius_m": self.cell_radius_m,
                "scheme_cap": self.scheme_cap}

    @classmethod
    def from_json(cls, obj: dict) -> "SweepConfig":
        return cls(kind=str(obj["kind"]), K=int(obj["K"]),
                   radii_m=tuple(float(r) for r in obj["radii_m"]),
                   realizations=int(obj.get("realizations", 1000)),
                   seed=int(obj.get("seed", 42)),
                   noise_floor_dbm=float(obj.get("noise_floor_dbm", -110.0)),
                   cell_radius_m=float(obj.get("cell_radius_m", 1000.0)),
                   scheme_cap=obj.get("scheme_cap"))


def _noise_masks_desc(K: int, i: int) -> list[int]:
    full = ((1 << K) - 1) ^ (1 << i)
    return sorted((m for m in range(full + 1) if m & ~full == 0), reverse=True)


def achievability_grid(gic: StandardGic, tol: float) -> np.ndarray:
    """Decode-and-cancel feasibility for every scheme at once.

    Axis i indexes receiver i's treated-as-noise mask in descending order,
    so flat C-order matches the scheme enumeration order (TIN first).
    """
    K = gic.K
    A = gic.H ** 2 * gic.P[None, :]
    masks = [_noise_masks_desc(K, i) for i in range(K)]
    M = len(masks[0])
    qtab = np.empty((K, M))
    for i in range(K):
        for mi, mask in enumerate(masks[i]):
            qtab[i, mi] = sum(A[i, j] for j in range(K) if mask >> j & 1)
    own = [1.0 + gic.P[j] / (1.0 + qtab[j]) for j in range(K)]  # (M,) each

    def axis_vec(j: int) -> np.ndarray:
        shape = [1] * K
        shape[j] = M
        return own[j].reshape(shape)

    ok = np.ones((M,) * K, dtype=bool)
    for i in range(K):
        for mi, mask in enumerate(masks[i]):
            decoded = [j for j in range(K) if j != i and not mask >> j & 1]
            if not decoded:
                continue
            denom = 1.0 + gic.P[i] + qtab[i, mi]
            cond = np.ones([1] * K, dtype=bool)
            for size in range(1, len(decoded) + 1):
                for J in itertools.combinations(decoded, size):
                    lhs = np.ones([1] * K)
                    num = 0.0
                    for j in J:
                        lhs = lhs * axis_vec(j)
                        num += A[i, j]
                    cond = cond & (lhs <= 1.0 + num / denom + tol)
            sel = [slice(None)] * K
            sel[i] = mi
            ok[tuple(sel)] &= cond.squeeze(axis=i)
    return ok


def _scheme_from_flat(flat: int, K: int, masks) -> ShkScheme:
    M = len(masks[0])
    idx = []
    for _ in range(K):
        idx.append(flat % M)
        flat //= M
    idx.reverse()
    sets = []
    for i in range(K):
        mask = masks[i][idx[i]]
        sets.append(frozenset(j for j in range(K) if mask >> j & 1))
    return ShkScheme(tuple(sets))


def _genie_feasible(gic: StandardGic, scheme: ShkScheme, cfg: SearchConfig) -> bool:
    return solve(converse_system(gic, scheme), cfg, early_exit=True).feasible


def classify_realization(gic: StandardGic, search_cfg: SearchConfig,
                         scheme_cap: int | None = None) -> dict:
    """Condition-set flags for one channel draw."""
    K = gic.K
    grid = achievability_grid(gic, search_cfg.tol)
    masks = [_noise_masks_desc(K, i) for i in range(K)]
    flat_ok = grid.ravel()
    ach_nontin = bool(flat_ok[1:].any())

    tin_cert = _genie_feasible(gic, ShkScheme.tin(K), search_cfg)

    nontin_cert = False
    shk1_cert = False
    if not tin_cert:
        # the tallies partition successes by whether the plain noise scheme
        # certifies, so the other schemes only matter when it does not
        popcounts = [[bin(m).count("1") for m in masks[i]] for i in range(K)]
        searched = 0
        M = len(masks[0])
        for flat in range(1, flat_ok.size):
            if not flat_ok[flat]:
                continue
            rest, idx = flat, []
            for _ in range(K):
                idx.append(rest % M)
                rest //= M
            idx.reverse()
            in_class1 = all(popcounts[i][idx[i]] >= K - 2 for i in range(K))
            if nontin_cert and (shk1_cert or not in_class1):
                continue
            if scheme_cap is not None and searched >= scheme_cap:
                break
            scheme = _scheme_from_flat(flat, K, masks)
            searched += 1
            if _genie_feasible(gic, scheme, search_cfg):
                nontin_cert = True
                if in_class1:
                    shk1_cert = True
            if nontin_cert and shk1_cert:
                break
    return {
        "tin": tin_cert,
        "shk_no_tin": (not tin_cert) and nontin_cert,
        "shk_any": tin_cert or nontin_cert,
        "shk1_no_tin": (not tin_cert) and shk1_cert,
        "ach_only": ach_nontin,
    }


def _run_block(args) -> dict:
    sweep, params, search_cfg, radius_idx, start, stop = args
    radius = sweep.radii_m[radius_idx]
    topo_cfg = TopologyConfig(sweep.kind, sweep.K, radius,
                              cell_radius_m=sweep.cell_radius_m,
                              realizations=sweep.realizations, seed=sweep.seed)
    counts = {name: 0 for name in CONDITION_SETS}
    for t in range(start, stop):
        ss = np.random.SeedSequence(sweep.seed, spawn_key=(radius_idx, t))
        rng = np.random.Generator(np.random.Philox(ss))
        realization = sample_topology(topo_cfg, rng)
        gic = realize_standard_channel(realization, params,
                                       sweep.noise_floor_dbm, rng)
        flags = classify_realization(gic, search_cfg, sweep.scheme_cap)
        for name in CONDITION_SETS:
            counts[name] += bool(flags[name])
    return counts


def default_workers() -> int:
    env = os.environ.get("GIC_THREADS", "")
    if env.strip():
        return max(1, int(env))
    return 1


def estimate_probabilities(sweep: SweepConfig, params: ErcegParams | None = None,
                           search_cfg: SearchConfig | None = None,
                           workers: int | None = None) -> list[SweepPoint]:
    """Per-radius certification statistics over seeded channel draws.

    Deterministic for a fixed config and seed regardless of ``workers``:
    every realization draws from its own counter-based substream and the
    tallies are plain sums.
    """
    params = params or ErcegParams()
    search_cfg = search_cfg or SearchConfig()
    workers = default_workers() if workers is None else max(1, workers)
    points = []
    for radius_idx in range(len(sweep.radii_m)):
        n = sweep.realizations
        if workers == 1:
            counts = _run_block((sweep, params, search_cfg, radius_idx, 0, n))
        else:
            chunk = max(1, -(-n // workers))
            blocks = [(sweep, params, search_cfg, radius_idx, s, min(s + chunk, n))
                      for s in range(0, n, chunk)]
            counts = {name: 0 for name in CONDITION_SETS}
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for result in pool.map(_run_block, blocks):
                    for name in CONDITION_SETS:
                        counts[name] += result[name]
        points.append(SweepPoint(sweep.radii_m[radius_idx],
                                 ConditionSetStats(n, counts)))
    return points
