"""Verification statistics: KS distance, moments, tail ratios, generator checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate, special

from .distributions import TailModel, open_uniform
from .errors import DomainError, EmptyInput
from .evt_limits import FRECHET, GUMBEL, ExtremeType
from .norming import NormingSequence
from .pdmp import QuadConfig, _quad, generator_apply
from .testfunctions import TestFunction, bump_family, constant, placed_bump  # noqa: F401


def ks_distance(samples, cdf: Callable) -> float:
    """One-sample Kolmogorov-Smirnov statistic sup_x |F_hat(x) - cdf(x)|."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    if n == 0:
        raise EmptyInput("KS distance of an empty sample")
    u = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - u), np.max(u - (i - 1) / n)))


def moment(samples, r: float) -> float:
    """Empirical mean of |X|^r."""
    if r < 0:
        raise DomainError("moment order must be >= 0")
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise EmptyInput("moment of an empty sample")
    return float(np.mean(np.abs(x) ** r))


def autocovariance(x0, x1) -> float:
    """Empirical covariance of paired samples (1/n normalisation)."""
    x0 = np.asarray(x0, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    if x0.size == 0:
        raise EmptyInput("autocovariance of an empty sample")
    return float(np.mean((x0 - x0.mean()) * (x1 - x1.mean())))


def limit_autocovariance(etype: ExtremeType, t: float) -> float:
    """Exact Cov(X_0, X_t) of the stationary limit process.

    In tau-coordinates S = tau(X) is Exp(1) and S_t = min(e^t S_0, W), with
    W ~ Exp(1 - e^{-t}) independent of S_0 (the flowed start against the
    best new arrival), so the lag-t moment is a one-dimensional integral.
    """
    if not t >= 0:
        raise DomainError(f"lag must be >= 0, got {t}")
    if etype.kind == FRECHET and not etype.alpha > 2:
        raise DomainError("Frechet(alpha) has infinite variance for alpha <= 2")
    h = etype.inverse_tau
    c = -math.expm1(-t)
    if etype.kind == GUMBEL:
        mean = np.euler_gamma

        def partial(y):  # E[h(W); W < y]
            cy = c * y
            return (math.log(c) * -math.expm1(-cy) + np.euler_gamma + math.exp(-cy) * math.log(cy)
                    + special.exp1(cy))
    else:
        p = -1.0 / etype.alpha if etype.kind == FRECHET else 1.0 / etype.alpha
        sign = 1.0 if etype.kind == FRECHET else -1.0
        mean = sign * special.gamma(1.0 + p)

        def partial(y):
            return sign * c ** -p * special.gamma(1.0 + p) * special.gammainc(1.0 + p, c * y)

    def integrand(s):
        y = math.exp(t) * s
        inner = float(h(y)) * math.exp(-c * y) + (partial(y) if c > 0 else 0.0)
        return float(h(s)) * inner * math.exp(-s)

    val = 0.0
    for lo, hi in ((0.0, 1.0), (1.0, 40.0)):
        val += integrate.quad(integrand, lo, hi, epsabs=1e-13, epsrel=1e-12, limit=400)[0]
    return float(val - mean * mean)


# -- tail ratio ------------------------------------------------------------
def tail_ratio(model: TailModel, seq: NormingSequence, n: int, x):
    """(1 - F(a_n x + b_n)) / (1 - F(theta_n)), both tails evaluated directly."""
    a, b = seq.constants(n)
    num = np.asarray(model.tail(a * np.asarray(x, dtype=float) + b), dtype=float)
    out = num / float(model.tail(seq.theta(n)))
    return out[()] if out.ndim == 0 else out


def compact_grid(etype: ExtremeType, points: int = 201) -> np.ndarray:
    """Default compact subset of D_G used for tail-ratio sweeps."""
    if etype.kind == GUMBEL:
        return np.linspace(-2.0, 5.0, points)
    if etype.kind == FRECHET:
        return np.linspace(0.2, 5.0, points)
    return np.append(np.linspace(-3.0, -0.01, points), -1e-6)


def tail_ratio_gap(model: TailModel, seq: NormingSequence, n: int,
                   grid: Optional[np.ndarray] = None) -> float:
    """sup over the grid of |tail_ratio - tau_G|."""
    etype = seq.extreme_type
    grid = compact_grid(etype) if grid is None else np.asarray(grid, dtype=float)
    return float(np.max(np.abs(tail_ratio(model, seq, n, grid) - etype.tau(grid))))


# -- generator residual ----------------------------------------------------
@dataclass(frozen=True)
class Residual:
    estimate: float
    std_err: float
    increment_rate: float  # (1/gamma) E[f(X_{k+1}) - f(x) | X_k = x]
    generator: float       # A f(x)

    def __iter__(self):
        return iter((self.estimate, self.std_err))


def generator_residual(model: TailModel, seq: NormingSequence, etype: ExtremeType,
                       f: TestFunction, x: float, k: int, N: int,
                       rng: np.random.Generator, method: str = "conditional",
                       quad_cfg: Optional[QuadConfig] = None) -> Residual:
    """Monte Carlo estimate of (1/gamma_{k+1}) E[f(X_{k+1}) - f(X_k) | X_k = x] - A f(x).

    ``method="plain"`` draws xi_{k+1} from F.  ``method="conditional"``
    splits on the jump event {xi_{k+1} > a_k x + b_k}, whose probability p is
    known exactly, and draws xi_{k+1} from F conditioned on it; the no-jump
    branch is deterministic.  Both are unbiased; the conditional one has
    variance smaller by a factor of about p.
    """
    if k < 2:
        raise DomainError("k must be >= 2")
    if N < 1000:
        raise DomainError("N must be >= 1000")
    if not etype.in_support(x):
        raise DomainError(f"x = {x} outside the support of {etype}")
    if k < seq.min_index:
        raise DomainError(f"norming constants start at index {seq.min_index}")
    a, b = (float(v) for v in seq.constants(k))
    g = float(seq.gamma(k + 1))
    rg = float(seq.rho(k + 1)) * g
    bg = float(seq.beta(k + 1)) * g
    drifted = x + (rg * x + bg)
    fx = float(f(x))
    af = generator_apply(etype, f, x, quad_cfg)

    def after(xi):
        return drifted + (1.0 + rg) * np.maximum((xi - b) / a - x, 0.0)

    if method == "plain":
        xi = model._quantile(open_uniform(rng, N))
        d = np.asarray(f(after(xi)), dtype=float) - fx
        mean, se = float(np.mean(d)), float(np.std(d, ddof=1) / math.sqrt(N))
    elif method == "conditional":
        p = float(model.tail(a * x + b))
        stay = float(f(drifted)) - fx
        if p == 0.0:
            mean, se = stay, 0.0
        else:
            xi = model._isf(p * open_uniform(rng, N))
            d = np.asarray(f(after(xi)), dtype=float) - fx
            mean = (1.0 - p) * stay + p * float(np.mean(d))
            se = p * float(np.std(d, ddof=1)) / math.sqrt(N)
    else:
        raise DomainError(f"unknown method {method!r}")
    rate = mean / g
    return Residual(rate - af, se / g, rate, af)


# -- invariance ------------------------------------------------------------
def invariance_integral(etype: ExtremeType, f: TestFunction, epsabs: float = 1e-8,
                        inner: Optional[QuadConfig] = None) -> float:
    """int A f d(nu_G).

    Below the support of f the generator reduces to the constant
    int f' tau_G, so that region contributes that constant times G(lo);
    above the support A f vanishes.
    """
    if f.is_constant:
        return 0.0
    inner = inner or QuadConfig()
    lo, hi = f.support
    if not (etype.in_support(lo) and etype.in_support(hi)):
        raise DomainError(f"test function support {f.support} not inside D_G of {etype}")
    below = _quad(lambda z: float(f.df(z)) * float(etype.tau(z)), lo, hi, inner, f.breakpoints)
    outer_cfg = QuadConfig(epsabs=epsabs, epsrel=1e-10)
    body = _quad(lambda x: generator_apply(etype, f, x, inner) * float(etype.g_pdf(x)),
                 lo, hi, outer_cfg, f.breakpoints)
    return body + below * float(etype.g_cdf(lo))
