"""Command-line front end writing CSV tables and a JSON run manifest.

Commands: ``association``, ``coverage``, ``success``, ``optimize``, ``validate``.
Configuration precedence: built-in defaults < ``--config`` file < flags.
Exit codes: 0 success, 2 configuration error, 3 non-convergence, 4 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy import stats

from . import __version__
from . import geometry as geo
from .association import association_report, assoc_vs_height, assoc_xhaul_deconditioned
from .channel import los_weight
from .content import CachePolicy, SuccessModel, success_probability
from .coverage import access_coverage
from .montecarlo import (estimate_association, estimate_coverage, estimate_success,
                         estimate_xhaul_association, sample_nearest_distances)
from .optimizer import optimize_beta
from .params import Config, ConfigError, environment, load_config
from .quadrature import NonConvergent

EXIT_OK, EXIT_CONFIG, EXIT_NONCONVERGENT, EXIT_VALIDATION = 0, 2, 3, 4

AXES = {
    "association": ("lambda-ua", "lambda-m", "height"),
    "coverage": ("threshold",),
    "success": ("cache", "users", "lambda-ua", "beta"),
    "optimize": ("cache", "gamma"),
    "validate": (),
}
# (from, to, points, log) per axis
DEFAULT_GRIDS = {
    "lambda-ua": (1e-7, 1e-1, 25, True),
    "lambda-m": (1e-7, 1e-5, 9, True),
    "height": (10.0, 500.0, 25, False),
    "threshold": (-10.0, 30.0, 9, False),
    "cache": (0.0, 1000.0, 11, False),
    "users": (1.0, 10.0, 10, False),
    "beta": (0.0, 1.0, 21, False),
    "gamma": (0.0, 1.5, 7, False),
}
INTEGER_AXES = {"cache", "users"}


@dataclass
class RunManifest:
    command: str
    argv: list
    config: dict
    seed: int
    outputs: list = field(default_factory=list)
    wall_clock_s: float = 0.0
    version: str = __version__

    def write(self, path: Path) -> None:
        path.write_text(json.dumps(self.__dict__, indent=2, sort_keys=True, default=str) + "\n")


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.9g}"
    return str(v)


def write_csv(path: Path, rows: list[dict]) -> None:
    """Header plus rows, numbers at 9 significant digits, row order preserved."""
    header = list(rows[0]) if rows else []
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(r[k]) for k in header])


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="uavhetnet", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in AXES:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path)
        sp.add_argument("--env", choices=["suburban", "urban", "dense-urban", "high-rise"])
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--realizations", type=int, default=10_000)
        if AXES[name]:
            sp.add_argument("--axis", choices=AXES[name], default=AXES[name][0])
        sp.add_argument("--from", dest="lo", type=float)
        sp.add_argument("--to", dest="hi", type=float)
        sp.add_argument("--points", type=int)
        sp.add_argument("--log", action="store_true", default=None)
        sp.add_argument("--out", type=Path, default=Path("."))
        sp.add_argument("--threads", type=int, default=1)
    return ap


def resolve_config(args) -> Config:
    cfg = load_config(args.config) if args.config else Config()
    if args.env:
        cfg = replace(cfg, network=cfg.network.with_(env=environment(args.env)))
    return cfg


def make_grid(args, axis: str) -> np.ndarray:
    lo, hi, n, log = DEFAULT_GRIDS[axis]
    lo = lo if args.lo is None else args.lo
    hi = hi if args.hi is None else args.hi
    n = n if args.points is None else args.points
    log = log if args.log is None else args.log
    if n < 1:
        raise ConfigError("--points must be >= 1")
    if log:
        if lo <= 0 or hi <= 0:
            raise ConfigError("log grids need positive bounds")
        grid = np.geomspace(lo, hi, n)
    else:
        grid = np.linspace(lo, hi, n)
    if axis in INTEGER_AXES:
        grid = np.unique(np.round(grid).astype(int))
    return grid


def _policy(cfg: Config, **over) -> CachePolicy:
    kw = dict(cfg.cache)
    kw.update(over)
    if "cache_size" in over and "mpc_size" not in over:
        kw.pop("mpc_size", None)
    return CachePolicy(**kw)


def _pmap(fn, items, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


# ---------------------------------------------------------------------------
# commands


def cmd_association(cfg: Config, args) -> list[dict]:
    p = cfg.network
    grid = make_grid(args, args.axis)
    if args.axis == "height":
        hs = assoc_vs_height(grid, p)
        return [{"height": h, "a_ma": hs.a_m[i], "a_ual": hs.a_ual[i], "a_uan": hs.a_uan[i], "sum": hs.total[i]}
                for i, h in enumerate(grid)]
    if args.axis == "lambda-m":
        def row(v):
            xa = assoc_xhaul_deconditioned(p.with_(lambda_m=float(v)))
            return {"lambda_m": v, "a_ub": xa.a_ub, "a_mb": xa.a_mb, "sum": xa.a_ub + xa.a_mb}
        return _pmap(row, grid, args.threads)

    def row(v):
        r = association_report(p.with_(lambda_ua=float(v)))
        return {"lambda_ua": v, "a_ma": r.a_ma, "a_ual": r.a_ual_bar, "a_uan": r.a_uan_bar, "sum": r.total}
    return _pmap(row, grid, args.threads)


def cmd_coverage(cfg: Config, args) -> list[dict]:
    p = cfg.network
    db = make_grid(args, "threshold")
    t = 10.0 ** (db / 10.0)
    analytic = _pmap(lambda x: access_coverage(float(x), p).overall, t, args.threads)
    mc = estimate_coverage(p, t, n=args.realizations, seed=args.seed, threads=args.threads).overall
    mean, se = np.atleast_1d(mc.mean), np.atleast_1d(mc.std_err)
    return [{"threshold_db": db[i], "analytic": analytic[i], "mc": mean[i], "mc_std_err": se[i],
             "abs_diff": abs(analytic[i] - mean[i])} for i in range(db.size)]


def _events(key, v, bd) -> dict:
    return {key: v, "p_st": bd.p_st, "p_sa": bd.p_sa, "p_sx": bd.p_sx, "p_suc": bd.p_suc}


def cmd_success(cfg: Config, args) -> list[dict]:
    p, svc = cfg.network, cfg.service
    grid = make_grid(args, args.axis)
    policy = _policy(cfg)
    if args.axis == "lambda-ua":
        return _pmap(lambda v: _events("lambda_ua", v, SuccessModel(p.with_(lambda_ua=float(v)), svc).evaluate(policy)),
                     grid, args.threads)
    model = SuccessModel(p, svc)
    if args.axis == "cache":
        return [_events("cache_size", int(v), model.evaluate(_policy(cfg, cache_size=int(v)))) for v in grid]
    if args.axis == "users":
        return [_events("n_users", int(v), model.evaluate(policy, n_users=int(v))) for v in grid]
    return [_events("beta", v, model.evaluate(policy, beta=float(v))) for v in grid]


def cmd_optimize(cfg: Config, args) -> list[dict]:
    p, svc = cfg.network, cfg.service
    grid = make_grid(args, args.axis)
    model = SuccessModel(p, svc)
    rows = []
    for v in grid:
        if args.axis == "cache":
            pol, key, val = _policy(cfg, cache_size=int(v)), "cache_size", int(v)
        else:
            pol, key, val = _policy(cfg, gamma=float(v)), "gamma", float(v)
        opt = optimize_beta(svc, p, pol, model=model)
        rows.append({key: val, "beta_star": opt.beta_star, "p_suc_star": opt.p_suc_star})
    return rows


def validation_checks(cfg: Config, n: int, seed: int, threads: int = 1) -> list[dict]:
    """Analytic-versus-simulation checks; every check runs, failures are collected."""
    p, svc = cfg.network, cfg.service
    rows = []

    def check(name, measured, tol):
        rows.append({"check": name, "measured": float(measured), "tolerance": tol, "pass": bool(measured <= tol)})

    rep = association_report(p)
    est = estimate_association(p, n, seed, threads=threads)
    for name, a, e in zip(("a_ma", "a_ual", "a_uan"), (rep.a_ma, rep.a_ual_bar, rep.a_uan_bar), est):
        check(f"association {name} |diff|", abs(a - e.mean), 0.01)
    check("association sum rule |1-sum|", abs(1.0 - rep.total), 1e-3)

    d = sample_nearest_distances(p, n, seed + 1, h=100.0)
    w_l = los_weight(p.env)
    cdfs = {
        "d_ma": lambda x: geo.cdf_nearest_tbs(x, p.lambda_m),
        "d_ual": lambda x: geo.cdf_nearest_uav(x, p.lambda_ua, w_l),
        "d_uan": lambda x: geo.cdf_nearest_uav(x, p.lambda_ua, 1.0 - w_l),
        "d_mb": lambda x: geo.cdf_xhaul_tbs(x, 100.0, p.lambda_m),
        "d_ub": lambda x: geo.cdf_xhaul_uavbs(x, 100.0, p.lambda_ub),
    }
    for name, cdf in cdfs.items():
        x = d[name][np.isfinite(d[name])]
        check(f"K-S {name}", stats.kstest(x, cdf).statistic, 0.02)

    xa = assoc_xhaul_deconditioned(p)
    check("xhaul a_ub |diff|", abs(xa.a_ub - estimate_xhaul_association(p, n, seed + 2).mean), 0.01)

    t = 10.0 ** (np.array([-10.0, 0.0, 10.0]) / 10.0)
    mc = estimate_coverage(p, t, n=n, seed=seed + 3, threads=threads).overall
    for i, ti in enumerate(t):
        an = access_coverage(float(ti), p).overall
        check(f"coverage {10 * math.log10(ti):+.0f} dB |diff|", abs(an - mc.mean[i]), 0.02)

    pol = _policy(cfg)
    an = success_probability(svc, p, pol).p_suc
    check("success |diff|", abs(an - estimate_success(p, svc, pol, n, seed + 4, threads=threads).mean), 0.03)
    return rows


def cmd_validate(cfg: Config, args) -> list[dict]:
    if args.realizations < 1000:
        raise ConfigError("validate needs --realizations >= 1000")
    return validation_checks(cfg, args.realizations, args.seed, args.threads)


COMMANDS = {
    "association": cmd_association,
    "coverage": cmd_coverage,
    "success": cmd_success,
    "optimize": cmd_optimize,
    "validate": cmd_validate,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        cfg = resolve_config(args)
        if args.threads < 1 or args.realizations < 1:
            raise ConfigError("--threads and --realizations must be >= 1")
        rows = COMMANDS[args.command](cfg, args)
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonConvergent as exc:
        print(f"numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENT

    args.out.mkdir(parents=True, exist_ok=True)
    tag = args.command if args.command == "validate" else f"{args.command}_{args.axis}"
    csv_path = args.out / f"{tag}.csv"
    write_csv(csv_path, rows)
    manifest = RunManifest(args.command, argv, cfg.snapshot(), args.seed, [str(csv_path)],
                           time.perf_counter() - start)
    manifest.write(args.out / f"{tag}.manifest.json")
    print(csv_path)
    if args.command == "validate":
        failed = [r for r in rows if not r["pass"]]
        for r in rows:
            print(f"{'PASS' if r['pass'] else 'FAIL'} {r['check']}: {r['measured']:.3g} (tol {r['tolerance']:g})")
        if failed:
            return EXIT_VALIDATION
    return EXIT_OK
