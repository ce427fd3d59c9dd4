"""Command-line interface.

Exit codes: 0 success (or capacity certified), 2 achievable-only,
3 unknown, 64 bad input, 70 internal error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import platform
import sys
import tempfile
import time

import numpy as np

from . import __version__
from .classify import classify_channel
from .core import (STATUS_ACHIEVABLE, STATUS_CERTIFIED, channel_from_json,
                   enumerate_schemes, scheme_from_json, scheme_to_json,
                   verdict_to_json)
from .errors import GicError
from .search import SearchConfig
from .sim import ErcegParams, SweepConfig, estimate_probabilities
from .special import two_user_classify
from .theorem2 import (bounds_csv_rows, enumerate_cover_bounds,
                       lp_sum_rate_oracle, max_achievable_sum_rate)

EXIT_OK = 0
EXIT_ACHIEVABLE = 2
EXIT_UNKNOWN = 3
EXIT_USAGE = 64
EXIT_INTERNAL = 70


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-gicsum-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        _write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _manifest(command: str, config: dict, seed, outputs: list[str],
              started: float) -> dict:
    blob = json.dumps(config, sort_keys=True).encode()
    return {
        "command": command,
        "config_hash": hashlib.sha256(blob).hexdigest(),
        "seed": seed,
        "versions": {"gicsum": __version__, "numpy": np.__version__,
                     "python": platform.python_version()},
        "wall_time_s": time.time() - started,
        "outputs": outputs,
    }


def _search_cfg(args) -> SearchConfig:
    cfg = SearchConfig()
    if getattr(args, "coarse_step", None):
        cfg = SearchConfig(coarse_step=args.coarse_step,
                           refine_steps=cfg.refine_steps,
                           eps_rho=cfg.eps_rho, tol=cfg.tol)
    if getattr(args, "tol", None):
        cfg = SearchConfig(cfg.coarse_step, cfg.refine_steps, cfg.eps_rho, args.tol)
    return cfg


def cmd_classify(args) -> int:
    with open(args.channel) as fh:
        gic = channel_from_json(json.load(fh))
    cfg = _search_cfg(args)
    best, per_scheme = classify_channel(gic, cfg, per_scheme=not args.best_only)
    report = {"best": verdict_to_json(best)}
    if per_scheme is not None:
        report["per_scheme"] = [verdict_to_json(v) for v in per_scheme]
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    if best.status == STATUS_CERTIFIED:
        return EXIT_OK
    if best.status == STATUS_ACHIEVABLE:
        return EXIT_ACHIEVABLE
    return EXIT_UNKNOWN


def cmd_region2(args) -> int:
    values = np.linspace(args.gain_min, args.gain_max, args.steps)
    rows = []
    from .core import StandardGic

    for h12 in values:
        for h21 in values:
            gic = StandardGic(2, np.array([[1.0, h12], [h21, 1.0]]),
                              np.array([args.p1, args.p2]))
            v = two_user_classify(gic)
            rows.append([h12, h21, v.status, v.theorem or "",
                         v.sum_bits if v.sum_bits is not None else math.nan])
    text = _csv_text(["h12", "h21", "verdict", "theorem", "sum_bits"], rows)
    _emit(text, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    started = time.time()
    with open(args.config) as fh:
        raw = json.load(fh)
    sweep = SweepConfig.from_json(raw)
    if args.seed is not None:
        sweep = SweepConfig.from_json({**raw, "seed": args.seed})
    params = ErcegParams.from_json(raw.get("erceg", {}))
    points = estimate_probabilities(sweep, params, _search_cfg(args),
                                    workers=args.workers)
    rows = []
    for pt in points:
        for name in pt.stats.successes:
            lo, hi = pt.stats.interval(name)
            rows.append([pt.radius_m, name, pt.stats.successes[name],
                         pt.stats.trials, pt.stats.p(name), lo, hi])
    text = _csv_text(["radius", "condition_set", "successes", "trials",
                      "p_hat", "ci_lo", "ci_hi"], rows)
    outputs = []
    if args.out:
        _write_atomic(args.out, text)
        outputs.append(args.out)
        manifest = _manifest("simulate", sweep.to_json() | {"erceg": params.to_json()},
                             sweep.seed, outputs, started)
        manifest_path = args.out + ".manifest.json"
        _write_atomic(manifest_path, json.dumps(manifest, indent=2) + "\n")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_schemes(args) -> int:
    schemes = enumerate_schemes(args.k)
    if args.format == "json":
        payload = [scheme_to_json(s) for s in schemes]
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        rows = [[idx] + [";".join(str(j + 1) for j in sorted(s.noise_sets[i]))
                         for i in range(args.k)]
                for idx, s in enumerate(schemes)]
        header = ["index"] + [f"I_{i + 1}" for i in range(args.k)]
        _emit(_csv_text(header, rows), args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    with open(args.channel) as fh:
        gic = channel_from_json(json.load(fh))
    with open(args.scheme) as fh:
        scheme = scheme_from_json(json.load(fh), gic.K)
    lp = lp_sum_rate_oracle(gic, scheme)
    fm = max_achievable_sum_rate(gic, scheme)
    if args.format == "csv":
        bounds = enumerate_cover_bounds(gic, scheme)
        rows = bounds_csv_rows(bounds, gic.K)
        header = list(rows[0].keys()) if rows else ["l"]
        _emit(_csv_text(header, [[r[h] for h in header] for r in rows]), args.out)
    else:
        _emit(json.dumps({"lp_bits": lp, "min_bound_bits": fm,
                          "gap": abs(lp - fm)}, indent=2) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gicsum",
                                 description="Sum-capacity certificates for "
                                             "K-user Gaussian interference channels")
    ap.add_argument("--seed", type=int, default=None, help="override config seed")
    ap.add_argument("--tol", type=float, default=None)
    ap.add_argument("--coarse-step", dest="coarse_step", type=float, default=None)
    ap.add_argument("--out", default=None, help="output path (atomic write)")
    ap.add_argument("--format", choices=("csv", "json"), default="json")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify a channel JSON file")
    p.add_argument("channel")
    p.add_argument("--best-only", action="store_true")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("region2", help="2-user closed-form region map")
    p.add_argument("--gain-min", type=float, default=0.0)
    p.add_argument("--gain-max", type=float, default=2.0)
    p.add_argument("--steps", type=int, default=201)
    p.add_argument("--p1", type=float, default=1.0)
    p.add_argument("--p2", type=float, default=1.0)
    p.set_defaults(func=cmd_region2)

    p = sub.add_parser("simulate", help="run a topology sweep config")
    p.add_argument("config")
    p.add_argument("--workers", type=int, default=None,
                   help="parallel workers (default: GIC_THREADS or 1)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("schemes", help="list all schemes for K users")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_schemes)

    p = sub.add_parser("oracle", help="LP oracle vs cover bounds for a scheme")
    p.add_argument("channel")
    p.add_argument("--scheme", required=True)
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GicError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"gicsum: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - keep the exit-code contract total
        print(f"gicsum: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
