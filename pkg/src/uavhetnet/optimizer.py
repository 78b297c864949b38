"""Bandwidth-partition optimisation and parameter sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .association import assoc_sweep_density, assoc_vs_height, assoc_xhaul_deconditioned
from .content import CachePolicy, SuccessModel
from .coverage import access_coverage
from .params import NetworkParams, ServiceParams
from .quadrature import DEFAULT_SPEC, QuadSpec
from .search import golden_section_max

__all__ = [
    "BetaOptimum",
    "optimize_beta",
    "SWEEP_AXES",
    "sweep",
    "first_crossing",
]

SWEEP_AXES = ("cache_size", "n_users", "lambda_ua", "beta", "height", "threshold", "lambda_m")


@dataclass(frozen=True)
class BetaOptimum:
    beta_star: float
    p_suc_star: float
    trace: list


def optimize_beta(svc: ServiceParams, params: NetworkParams, policy: CachePolicy, grid_n: int = 21,
                  model: SuccessModel | None = None, tol: float = 1e-4) -> BetaOptimum:
    """Maximise ``P_suc`` over the access share ``beta``.

    A uniform grid on ``[0, 1]`` (endpoints included) locates the best cell;
    golden-section search then refines inside the two neighbouring cells.
    The refined point replaces the grid best only if it is not worse.
    """
    if grid_n < 11:
        raise ValueError("grid_n must be >= 11")
    model = model or SuccessModel(params, svc)
    f = lambda b: model.evaluate(policy, beta=float(b), n_users=svc.n_users).p_suc
    grid = np.linspace(0.0, 1.0, grid_n)
    trace = [(float(b), f(b)) for b in grid]
    vals = np.array([v for _, v in trace])
    k = int(np.argmax(vals))
    beta_star, best = float(grid[k]), float(vals[k])
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, grid_n - 1)]
    b, v = golden_section_max(f, float(lo), float(hi), tol=tol)
    trace.append((float(b), v))
    if v > best:
        beta_star, best = b, v
    return BetaOptimum(beta_star, best, trace)


def first_crossing(x, y, level: float, log: bool = True) -> float:
    """First abscissa at which ``y`` reaches ``level`` (interpolated; log-x by default).

    Returns ``nan`` if the curve never reaches the level.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    above = np.nonzero(y >= level)[0]
    if above.size == 0:
        return math.nan
    i = int(above[0])
    if i == 0:
        return float(x[0])
    x0, x1 = (np.log(x[i - 1]), np.log(x[i])) if log else (x[i - 1], x[i])
    frac = (level - y[i - 1]) / (y[i] - y[i - 1])
    xc = x0 + frac * (x1 - x0)
    return float(math.exp(xc) if log else xc)


def sweep(axis: str, grid, params: NetworkParams, svc: ServiceParams, policy: CachePolicy | None = None,
          spec: QuadSpec = DEFAULT_SPEC) -> list[dict]:
    """Evaluate the model along one axis; one dict per grid value.

    Axes ``cache_size``, ``n_users``, ``lambda_ua`` and ``beta`` report the
    delivery events; ``height`` the association with a fixed LoS height;
    ``threshold`` (dB) the overall access coverage; ``lambda_m`` the xHaul
    association of a serving UAV-AP.
    """
    if axis not in SWEEP_AXES:
        raise ValueError(f"axis must be one of {SWEEP_AXES}")
    grid = list(grid)
    if not grid:
        raise ValueError("empty grid")
    policy = policy or CachePolicy()
    rows = []

    def events(row, bd):
        row.update(p_st=bd.p_st, p_sa=bd.p_sa, p_sx=bd.p_sx, p_suc=bd.p_suc)
        return row

    if axis in ("cache_size", "n_users", "beta"):
        model = SuccessModel(params, svc, spec)
        for v in grid:
            if axis == "cache_size":
                bd = model.evaluate(policy.with_(cache_size=int(v)))
            elif axis == "n_users":
                bd = model.evaluate(policy, n_users=int(v))
            else:
                bd = model.evaluate(policy, beta=float(v))
            rows.append(events({axis: v}, bd))
    elif axis == "lambda_ua":
        for v in grid:
            bd = SuccessModel(params.with_(lambda_ua=float(v)), svc, spec).evaluate(policy)
            rows.append(events({axis: v}, bd))
    elif axis == "height":
        hs = assoc_vs_height(grid, params, spec)
        for i, v in enumerate(grid):
            rows.append({axis: v, "a_m": hs.a_m[i], "a_ual": hs.a_ual[i], "a_uan": hs.a_uan[i],
                         "sum": hs.total[i]})
    elif axis == "threshold":
        for v in grid:
            acc = access_coverage(10.0 ** (float(v) / 10.0), params, spec)
            rows.append({axis: v, "coverage": acc.overall})
    elif axis == "lambda_m":
        for v in grid:
            xa = assoc_xhaul_deconditioned(params.with_(lambda_m=float(v)), spec)
            rows.append({axis: v, "a_ub": xa.a_ub, "a_mb": xa.a_mb})
    return rows
