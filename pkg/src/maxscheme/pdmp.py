"""Exact simulation of the limit jump process and numerical application of its generator.

The process moves along the linear flow x' = rho_G x + beta_G and, from state
x, jumps at total rate tau_G(x) to a level z > x drawn with density
phi_G(z)/tau_G(x).  Its generator acting on a C^1 function f with compact
support is

    A f(x) = (rho_G x + beta_G) f'(x) + int_0^inf (f(x+y) - f(x)) phi_G(x+y) dy
           = (rho_G x + beta_G) f'(x) + int_0^inf f'(x+y) tau_G(x+y) dy.

For all three laws the integrated hazard along the flow is
tau_G(x0) (e^t - 1), so holding times and jump levels are drawn by exact
inversion; there is no time step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import integrate

from .distributions import _out, _U_MIN, open_uniform
from .errors import DomainError, FlowUnderflow, QuadratureError
from .evt_limits import FRECHET, GUMBEL, ExtremeType
from .streams import map_chunks, path_rng
from .testfunctions import TestFunction

_TINY = np.finfo(float).tiny


# -- deterministic pieces --------------------------------------------------
def drift_flow(etype: ExtremeType, x0, t):
    """Solution at time t of x' = rho_G x + beta_G started from x0."""
    x0 = np.asarray(x0, dtype=float)
    t = np.asarray(t, dtype=float)
    if etype.kind == GUMBEL:
        out = x0 - t
    elif etype.kind == FRECHET:
        out = x0 * np.exp(-t / etype.alpha)
        if np.any((out < _TINY) & (x0 > 0)):
            raise FlowUnderflow("Frechet state underflowed below the smallest normal double")
    else:
        out = x0 * np.exp(t / etype.alpha)
    return _out(out)


def integrated_hazard(etype: ExtremeType, x0, t):
    """int_0^t tau_G(flow(x0, s)) ds = tau_G(x0) (e^t - 1)."""
    return _out(np.asarray(etype.tau(x0)) * np.expm1(np.asarray(t, dtype=float)))


def holding_cdf(etype: ExtremeType, x0, t):
    """P(first jump from x0 happens before t)."""
    return _out(-np.expm1(-np.asarray(integrated_hazard(etype, x0, t))))


def hold_from_exponential(etype: ExtremeType, x0, e):
    """Inverse of the integrated hazard at level e: log(1 + e / tau_G(x0)); +inf if tau_G(x0) = 0."""
    tau = np.asarray(etype.tau(x0), dtype=float)
    e = np.asarray(e, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(tau > 0, np.log1p(e / np.where(tau > 0, tau, 1.0)), math.inf)
    return _out(out)


def target_from_uniform(etype: ExtremeType, x, u):
    """Jump level z > x with tau_G(z) = u tau_G(x)."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if np.any(np.asarray(etype.tau(x)) == 0):
        raise DomainError("no jump is possible from a state with zero jump rate")
    if etype.kind == GUMBEL:
        out = x - np.log(u)
    elif etype.kind == FRECHET:
        out = x * u ** (-1.0 / etype.alpha)
    else:
        out = x * u ** (1.0 / etype.alpha)
    return _out(out)


def target_cdf(etype: ExtremeType, x, z):
    """P(Z <= z) for the jump level from x: (tau(x) - tau(z)) / tau(x) on z >= x."""
    tx = np.asarray(etype.tau(x), dtype=float)
    tz = np.asarray(etype.tau(np.maximum(z, x)), dtype=float)
    return _out((tx - tz) / tx)


def holding_time(etype: ExtremeType, x0: float, rng: np.random.Generator) -> float:
    return float(hold_from_exponential(etype, x0, -math.log(open_uniform(rng))))


def jump_target(etype: ExtremeType, x: float, rng: np.random.Generator) -> float:
    return float(target_from_uniform(etype, x, open_uniform(rng)))


def _check_state(etype: ExtremeType, x0):
    if not np.all(etype.in_support(x0)):
        raise DomainError(f"initial state outside the support of {etype}")


# -- single path -----------------------------------------------------------
@dataclass(frozen=True)
class PdmpPath:
    etype: ExtremeType
    x0: float
    horizon: float
    jump_times: np.ndarray
    pre_jump: np.ndarray
    post_jump: np.ndarray

    @property
    def n_jumps(self) -> int:
        return len(self.jump_times)

    def __call__(self, t):
        """State at time(s) t in [0, horizon]; right-continuous at jump times."""
        t = np.asarray(t, dtype=float)
        if np.any((t < 0) | (t > self.horizon)):
            raise DomainError("evaluation time outside [0, horizon]")
        k = np.searchsorted(self.jump_times, t, side="right")
        start = np.concatenate([[0.0], self.jump_times])[k]
        state = np.concatenate([[self.x0], self.post_jump])[k]
        return drift_flow(self.etype, state, t - start)


def simulate(etype: ExtremeType, x0: float, horizon: float,
             rng: np.random.Generator) -> PdmpPath:
    """One exact path on [0, horizon]."""
    _check_state(etype, x0)
    if not horizon > 0:
        raise DomainError("horizon must be positive")
    times, pre, post = [], [], []
    s, x = 0.0, float(x0)
    while True:
        h = holding_time(etype, x, rng)
        if s + h > horizon:
            break
        s += h
        x_before = float(drift_flow(etype, x, h))
        x = jump_target(etype, x_before, rng)
        times.append(s)
        pre.append(x_before)
        post.append(x)
    return PdmpPath(etype, float(x0), float(horizon), np.array(times), np.array(pre), np.array(post))


# -- many paths ------------------------------------------------------------
class _UniformFeed:
    """Per-path uniform buffers, refilled from each path's own generator."""

    def __init__(self, seed: int, indices: range, width: int = 32):
        self.gens = [path_rng(seed, i) for i in indices]
        self.width = width
        self.buf = np.stack([g.random(width) for g in self.gens])
        self.ptr = np.zeros(len(self.gens), dtype=np.int64)

    def take(self, rows: np.ndarray) -> np.ndarray:
        empty = rows[self.ptr[rows] == self.width]
        for r in empty:
            self.buf[r] = self.gens[r].random(self.width)
            self.ptr[r] = 0
        out = self.buf[rows, self.ptr[rows]]
        self.ptr[rows] += 1
        return np.maximum(out, _U_MIN)


def simulate_paths(etype: ExtremeType, x0, record_times: Sequence[float], n_paths: int,
                   seed: int, first_path: int = 0, threads: Optional[int] = None,
                   chunk: int = 8192, return_jumps: bool = False):
    """States at ``record_times`` for many independent exact paths.

    ``x0`` is a float, an array of length n_paths, or ``"stationary"``, in
    which case each path draws its start from nu_G with the first uniform
    of its own stream.  Returns an array (n_paths, 1 + len(record_times))
    whose first column holds X_0; with ``return_jumps`` the number of jumps
    per path is returned as well.
    """
    times = np.asarray(record_times, dtype=float)
    if times.size == 0 or np.any(np.diff(times) <= 0) or times[0] < 0:
        raise DomainError("record times must be nonnegative and strictly increasing")
    stationary = isinstance(x0, str)
    if stationary and x0 != "stationary":
        raise DomainError(f"unknown initial law {x0!r}")
    if not stationary:
        x0_all = np.broadcast_to(np.asarray(x0, dtype=float), (n_paths,))
        _check_state(etype, x0_all)
    n_rec = len(times)

    def work(lo, hi):
        size = hi - lo
        feed = _UniformFeed(seed, range(first_path + lo, first_path + hi))
        rows = np.arange(size)
        x = etype.g_quantile(feed.take(rows)) if stationary else x0_all[lo:hi].copy()
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty((size, n_rec + 1))
        out[:, 0] = x
        s = np.zeros(size)
        nxt = np.zeros(size, dtype=np.int64)
        jumps = np.zeros(size, dtype=np.int64)
        active = rows
        while active.size:
            e = -np.log(feed.take(active))
            xa = x[active]
            t_jump = s[active] + np.asarray(hold_from_exponential(etype, xa, e), dtype=float)
            # record every requested time that falls before the next jump
            pending = active
            while pending.size:
                k = nxt[pending]
                has = k < n_rec
                pending, k = pending[has], k[has]
                due = times[k] < t_jump[np.searchsorted(active, pending)]
                pending, k = pending[due], k[due]
                if pending.size:
                    out[pending, k + 1] = drift_flow(etype, x[pending], times[k] - s[pending])
                    nxt[pending] += 1
            keep = nxt[active] < n_rec
            active, t_jump, e = active[keep], t_jump[keep], e[keep]
            if not active.size:
                break
            before = np.atleast_1d(drift_flow(etype, x[active], t_jump - s[active]))
            x[active] = target_from_uniform(etype, before, feed.take(active))
            s[active] = t_jump
            jumps[active] += 1
        return np.column_stack([out, jumps]) if return_jumps else out

    res = map_chunks(work, n_paths, chunk, threads)
    if return_jumps:
        return res[:, :-1], res[:, -1].astype(np.int64)
    return res


# -- generator -------------------------------------------------------------
@dataclass(frozen=True)
class QuadConfig:
    epsabs: float = 1e-10
    epsrel: float = 1e-12
    limit: int = 200


def _quad(func, lo, hi, cfg: QuadConfig, points=()):
    if not hi > lo:
        return 0.0
    pts = [p for p in points if lo < p < hi]
    finite = math.isfinite(lo) and math.isfinite(hi)
    res = integrate.quad(func, lo, hi, epsabs=cfg.epsabs, epsrel=cfg.epsrel, limit=cfg.limit,
                         points=pts if (pts and finite) else None, full_output=1)
    value, err = res[0], res[1]
    if len(res) > 3 and err > max(cfg.epsabs, cfg.epsrel * abs(value)):
        raise QuadratureError(f"quadrature on [{lo}, {hi}] stopped at error {err:.3g}: {res[3]}")
    return value


def generator_apply(etype: ExtremeType, f: TestFunction, x: float,
                    quad_cfg: Optional[QuadConfig] = None, form: str = "tau") -> float:
    """A f(x) by adaptive Gauss-Kronrod quadrature over the support of f.

    ``form="tau"`` integrates f' tau_G (the integrated-by-parts form),
    ``form="phi"`` integrates (f(z) - f(x)) phi_G(z) over z > x, using
    int_x^inf phi_G = tau_G(x) for the constant part.
    """
    cfg = quad_cfg or QuadConfig()
    if not etype.in_support(x):
        raise DomainError(f"x = {x} outside the support of {etype}")
    rho, beta = etype.rho_beta
    drift = (rho * x + beta) * float(f.df(x))
    lo, hi = f.support
    start = max(x, lo)
    if form == "tau":
        if f.is_constant:
            return drift
        jump = _quad(lambda z: float(f.df(z)) * float(etype.tau(z)), start, hi, cfg, f.breakpoints)
    elif form == "phi":
        if f.is_constant:
            return drift
        inner = _quad(lambda z: float(f.f(z)) * float(etype.phi(z)), start, hi, cfg, f.breakpoints)
        jump = inner - float(f.f(x)) * float(etype.tau(x))
    else:
        raise DomainError(f"unknown generator form {form!r}")
    return drift + jump
