"""Verification suites behind ``maxscheme verify``.

Each suite returns a dict ``{"pass": bool, "checks": [...]}`` where every check
records the measured statistic, its threshold and the verdict.  Randomness is
derived from the master seed and a fixed per-suite code, and every
path-level quantity comes from per-path streams, so a report depends only on
the seed; no timing or host information is recorded.
"""

from __future__ import annotations

import math
from typing import Callable, Optional

import numpy as np

from . import pdmp, scheme
from .distributions import parse_model
from .evt_limits import ExtremeType, parse_type
from .norming import NormingSequence, limit_check
from .stats import (autocovariance, generator_residual, invariance_integral,
                    ks_distance, limit_autocovariance, placed_bump, tail_ratio_gap)
from .streams import path_uniforms
from .testfunctions import bump_family

SCHEME_MODELS = ("exponential", "normal", "pareto:3", "uniform01", "boundedpower:2")
MARGINAL_MODELS = ("exponential", "pareto:3", "uniform01", "boundedpower:2")
TAIL_MODELS = ("exponential", "pareto:3", "uniform01")
LIMIT_TYPES = ("gumbel", "frechet:3", "weibull:2")
AUTOCOV_PAIRS = (("exponential", "gumbel"), ("pareto:3", "frechet:3"))

KS_MAX = 0.015


def sub_seed(seed: int, *key: int) -> int:
    """Independent 63-bit seed for one suite or sub-experiment."""
    state = np.random.SeedSequence(seed, spawn_key=(1000,) + tuple(key)).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1] & 0x7FFFFFFF) << 32)


def _check(name: str, measured: float, threshold: float, ok: Optional[bool] = None, **extra) -> dict:
    measured = float(measured)
    ok = bool(measured <= threshold) if ok is None else bool(ok)
    return {"name": name, "measured": measured, "threshold": float(threshold), "pass": ok, **extra}


def _suite(checks: list) -> dict:
    return {"pass": all(c["pass"] for c in checks), "checks": checks}


def _seq(spec: str):
    model = parse_model(spec)
    return model, NormingSequence(model)


# -- suites ----------------------------------------------------------------
def norming_suite(seed: int, threads: Optional[int] = None) -> dict:
    out = []
    _, seq = _seq("exponential")
    rep = limit_check(seq, 1000)
    out.append(_check("exponential |beta_n + 1| at n=1e3", rep.beta_gap, 1e-3))
    out.append(_check("exponential rho_n at n=1e3", abs(rep.rho_n), 0.0))
    _, seq = _seq("pareto:3")
    rep = limit_check(seq, 10 ** 4)
    out.append(_check("pareto:3 |rho_n + 1/3| at n=1e4", rep.rho_gap, 1e-3))
    out.append(_check("pareto:3 beta_n at n=1e4", abs(rep.beta_n), 0.0))
    _, seq = _seq("uniform01")
    rep = limit_check(seq, 1001)
    out.append(_check("uniform01 |rho_n - 1| at n=1001", rep.rho_gap, 1e-3))
    _, seq = _seq("normal")
    rep = limit_check(seq, 10 ** 6)
    out.append(_check("normal |beta_n + 1| at n=1e6", rep.beta_gap, 0.2))
    out.append(_check("normal |rho_n| at n=1e6", rep.rho_gap, 0.1))
    return _suite(out)


def equivalence_suite(seed: int, threads: Optional[int] = None, n_seeds: int = 100,
                      n_max: int = 10 ** 4) -> dict:
    """Running-maximum route vs Euler recursion on shared variates."""
    out = []
    for j, spec in enumerate(SCHEME_MODELS):
        model, seq = _seq(spec)
        xi = model._quantile(path_uniforms(sub_seed(seed, 1, j), range(n_seeds), n_max))
        direct = scheme.direct_from_variates(seq, xi, seq.min_index)
        rec = scheme.recursive_from_variates(seq, xi, seq.min_index)
        err = np.max(np.abs(direct - rec) / (1.0 + np.abs(direct)))
        out.append(_check(f"{spec} max |direct - recursive| / (1 + |X|), {n_seeds} paths to n={n_max}", err, 1e-9))
    return _suite(out)


def marginal_suite(seed: int, threads: Optional[int] = None, n_paths: int = 10 ** 5,
                   n: int = 10 ** 4) -> dict:
    out = []
    for j, spec in enumerate(MARGINAL_MODELS):
        model, seq = _seq(spec)
        x = scheme.simulate_paths(model, seq, n, n_paths, sub_seed(seed, 2, j), [n], threads=threads)
        ks = ks_distance(x[:, 0], seq.extreme_type.g_cdf)
        out.append(_check(f"{spec} KS(X_n, G) at n={n}", ks, KS_MAX))
    return _suite(out)


def stationarity_suite(seed: int, threads: Optional[int] = None, n_paths: int = 10 ** 5,
                       times=(1.0, 2.0, 5.0)) -> dict:
    out = []
    for j, spec in enumerate(LIMIT_TYPES):
        etype = parse_type(spec)
        x = pdmp.simulate_paths(etype, "stationary", times, n_paths, sub_seed(seed, 3, j), threads=threads)
        for c, t in enumerate(times, start=1):
            out.append(_check(f"{spec} KS(X_t, G) at t={t:g}", ks_distance(x[:, c], etype.g_cdf), KS_MAX))
    return _suite(out)


def microlaw_suite(seed: int, threads: Optional[int] = None, n: int = 10 ** 5) -> dict:
    """Holding-time and jump-level laws, after checking the hazard closed form."""
    from scipy import integrate

    out = []
    for j, spec in enumerate(LIMIT_TYPES):
        etype = parse_type(spec)
        x0 = float(etype.g_quantile(0.5))
        gap = 0.0
        for t in (0.1, 1.0, 3.0):
            num = integrate.quad(lambda s: float(etype.tau(pdmp.drift_flow(etype, x0, s))), 0.0, t,
                                 epsabs=1e-13, epsrel=1e-13)[0]
            gap = max(gap, abs(num - float(pdmp.integrated_hazard(etype, x0, t))))
        out.append(_check(f"{spec} hazard quadrature vs closed form", gap, 1e-8))
        rng = np.random.default_rng(sub_seed(seed, 4, j))
        e = -np.log(np.maximum(rng.random(n), 2.0 ** -53))
        hold = pdmp.hold_from_exponential(etype, x0, e)
        out.append(_check(f"{spec} KS(holding time) from median",
                          ks_distance(hold, lambda t: pdmp.holding_cdf(etype, x0, t)), KS_MAX))
        z = pdmp.target_from_uniform(etype, x0, np.maximum(rng.random(n), 2.0 ** -53))
        out.append(_check(f"{spec} KS(jump level) from median",
                          ks_distance(z, lambda v: pdmp.target_cdf(etype, x0, v)), KS_MAX))
        out.append(_check(f"{spec} jumps strictly upward", int(np.sum(z <= x0)), 0))
    return _suite(out)


def generator_suite(seed: int, threads: Optional[int] = None, n_draws: int = 10 ** 6,
                    trend_seeds: int = 50) -> dict:
    out = []
    for spec in LIMIT_TYPES:
        etype = parse_type(spec)
        for t in (0, 1, 5):
            value = invariance_integral(etype, placed_bump(etype, t))
            out.append(_check(f"{spec} |int A f_{t} dG|", abs(value), 1e-6))
    model, seq = _seq("exponential")
    etype = seq.extreme_type
    f = bump_family(1.0)
    res = generator_residual(model, seq, etype, f, 0.0, 10 ** 4, n_draws,
                             np.random.default_rng(sub_seed(seed, 5)))
    out.append(_check("exponential f_1 x=0 |residual| at k=1e4", abs(res.estimate),
                      0.05 + 3 * res.std_err, std_err=res.std_err))
    wins = 0
    for s in range(trend_seeds):
        small = generator_residual(model, seq, etype, f, 0.0, 100, n_draws,
                                   np.random.default_rng(sub_seed(seed, 6, s, 0)))
        big = generator_residual(model, seq, etype, f, 0.0, 10 ** 4, n_draws,
                                 np.random.default_rng(sub_seed(seed, 6, s, 1)))
        wins += abs(big.estimate) < abs(small.estimate)
    frac = wins / trend_seeds
    out.append(_check("residual shrinks from k=1e2 to k=1e4 (fraction of seeds)", frac, 0.8,
                      ok=frac >= 0.8))
    return _suite(out)


def tailratio_suite(seed: int, threads: Optional[int] = None, n: int = 10 ** 5) -> dict:
    out = []
    for spec in TAIL_MODELS:
        model, seq = _seq(spec)
        out.append(_check(f"{spec} sup-grid |ratio - tau| at n={n}", tail_ratio_gap(model, seq, n), 0.01))
    return _suite(out)


def autocov_suite(seed: int, threads: Optional[int] = None, n_paths: int = 10 ** 5,
                  n: int = 10 ** 4, t: float = 1.0) -> dict:
    """Lag-t covariance of the stepwise scheme from index n vs the limit process."""
    out = []
    for j, (spec, tspec) in enumerate(AUTOCOV_PAIRS):
        model, seq = _seq(spec)
        etype: ExtremeType = parse_type(tspec)
        k = scheme.step_index(seq, n, t)
        xs = scheme.simulate_paths(model, seq, k, n_paths, sub_seed(seed, 7, j, 0), [n, k], threads=threads)
        xp = pdmp.simulate_paths(etype, "stationary", [t], n_paths, sub_seed(seed, 7, j, 1), threads=threads)
        cs = autocovariance(xs[:, 0], xs[:, 1])
        cp = autocovariance(xp[:, 0], xp[:, 1])
        out.append(_check(f"{spec} vs {tspec} |cov_scheme - cov_limit| at lag {t:g}", abs(cs - cp), 0.05,
                          scheme_cov=cs, limit_cov=cp, exact_cov=limit_autocovariance(etype, t),
                          scheme_index=k))
    return _suite(out)


SUITES: dict[str, Callable[..., dict]] = {
    "norming": norming_suite,
    "equivalence": equivalence_suite,
    "marginal": marginal_suite,
    "stationarity": stationarity_suite,
    "microlaws": microlaw_suite,
    "generator": generator_suite,
    "tailratio": tailratio_suite,
    "autocov": autocov_suite,
}


def run_suites(names, seed: int, threads: Optional[int] = None) -> dict:
    """Report for the named suites ("all" expands to every suite)."""
    if isinstance(names, str):
        names = [names]
    if "all" in names:
        names = list(SUITES)
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}")
    suites = {name: SUITES[name](seed, threads) for name in names}
    return {"seed": int(seed), "suites": suites, "pass": all(s["pass"] for s in suites.values())}


def _finite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite(v) for v in obj]
    return obj


def report_json(report: dict) -> str:
    import json

    return json.dumps(_finite(report), indent=2, sort_keys=True) + "\n"
