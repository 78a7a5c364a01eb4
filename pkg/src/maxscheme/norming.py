"""Norming sequences attached to a distribution model.

For a model F this computes

* ``theta(n)``  the (1 - 1/n)-quantile, ``inf{x : F(x) >= 1 - 1/n}``;
* ``gamma(n)``  the step ``1 - F(theta_n)`` (exactly ``1/n`` for continuous F);
* ``Gamma(n)``  the clock ``gamma_1 + ... + gamma_n``;
* ``a(n), b(n)`` norming constants, so that ``(M_n - b_n)/a_n`` has a limit law;
* ``rho(n) = (a_{n-1} - a_n) / (a_n gamma_n)`` and
  ``beta(n) = (b_{n-1} - b_n) / (a_n gamma_n)`` for n >= 2.

The differences ``a_{n-1} - a_n`` and ``b_{n-1} - b_n`` are O(1/n) quantities
obtained from numbers of order one, so the built-in models supply them in
closed form (``log1p``/``expm1`` rewrites) instead of subtracting.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .distributions import (
    BoundedPower,
    Exponential,
    Pareto,
    StandardNormal,
    TailModel,
    Truncated,
    Uniform01,
)
from .errors import DomainError, HorizonError, UnsupportedError
from .evt_limits import ExtremeType

_BLOCK = 2 ** 16
_CHUNK = 256
_LN_4PI = math.log(4 * math.pi)


def _as_index(n, lowest: int = 1) -> np.ndarray:
    arr = np.asarray(n)
    if arr.dtype.kind == "f":
        if np.any(arr != np.floor(arr)):
            raise DomainError("indices must be integers")
        arr = arr.astype(np.int64)
    if np.any(arr < lowest):
        raise DomainError(f"index must be >= {lowest}")
    return arr.astype(np.int64)


def _out(x):
    x = np.asarray(x, dtype=float)
    return x[()] if x.ndim == 0 else x


@dataclass(frozen=True)
class _Constants:
    """Closed forms for one family of norming constants (all take float arrays of n)."""

    a: Callable
    b: Callable
    a_drop: Optional[Callable] = None
    b_drop: Optional[Callable] = None
    rho: Optional[Callable] = None
    min_index: int = 1


def _exponential_constants() -> _Constants:
    return _Constants(
        a=lambda n: np.ones_like(n),
        b=np.log,
        a_drop=np.zeros_like,
        b_drop=lambda n: np.log1p(-1.0 / n),
    )


def _normal_constants() -> _Constants:
    # b_n keeps 2 sqrt(log n) in the correction's denominator.  (rho_n, beta_n)
    # still tend to (0, -1), but (b_n - theta_n)/a_n grows like
    # ((sqrt 2 - 1)/2) log log n, so the centred maxima drift very slowly;
    # pass a/b explicitly for the classical 2 sqrt(2 log n) centring.
    def a(n):
        return 1.0 / np.sqrt(2.0 * np.log(n))

    def b(n):
        L = np.log(n)
        return np.sqrt(2.0 * L) - (np.log(L) + _LN_4PI) / (2.0 * np.sqrt(L))

    def a_drop(n):
        L = np.log(n)
        e = np.log1p(-1.0 / n)            # log(n-1) - log(n) < 0
        s, s1 = np.sqrt(2.0 * L), np.sqrt(2.0 * (L + e))
        return -2.0 * e / ((s + s1) * s * s1)

    def b_drop(n):
        L = np.log(n)
        e = np.log1p(-1.0 / n)
        L1 = L + e
        s, s1 = np.sqrt(2.0 * L), np.sqrt(2.0 * L1)
        r, r1 = np.sqrt(L), np.sqrt(L1)
        d_lead = 2.0 * e / (s + s1)
        d_inv_root = -e / ((r + r1) * r * r1)
        d_h = 0.5 * (np.log1p(e / L) / r1 + (np.log(L) + _LN_4PI) * d_inv_root)
        return d_lead - d_h

    return _Constants(a=a, b=b, a_drop=a_drop, b_drop=b_drop, min_index=3)


def _pareto_constants(alpha: float) -> _Constants:
    return _Constants(
        a=lambda n: n ** (1.0 / alpha),
        b=np.zeros_like,
        a_drop=lambda n: n ** (1.0 / alpha) * np.expm1(np.log1p(-1.0 / n) / alpha),
        b_drop=np.zeros_like,
    )


def _power_constants(alpha: float) -> _Constants:
    return _Constants(
        a=lambda n: n ** (-1.0 / alpha),
        b=np.ones_like,
        a_drop=lambda n: n ** (-1.0 / alpha) * np.expm1(-np.log1p(-1.0 / n) / alpha),
        b_drop=np.zeros_like,
    )


def _uniform_constants() -> _Constants:
    return _Constants(
        a=lambda n: 1.0 / n,
        b=np.ones_like,
        a_drop=lambda n: 1.0 / (n * (n - 1.0)),
        b_drop=np.zeros_like,
        # (1/(n-1) - 1/n) / (1/n * 1/n), one rounding
        rho=lambda n: n / (n - 1.0),
    )


def _constants_for(model: TailModel, theta: Callable) -> _Constants:
    if isinstance(model, Truncated):
        # the base law's constants stay in the admissible class: only the
        # tail of F matters for the limit, and F_delta has the same tail
        return _constants_for(model.base, theta)
    if isinstance(model, Exponential):
        return _exponential_constants()
    if isinstance(model, StandardNormal):
        return _normal_constants()
    if isinstance(model, Pareto):
        return _pareto_constants(model.alpha)
    if isinstance(model, Uniform01):
        return _uniform_constants()
    if isinstance(model, BoundedPower):
        return _power_constants(model.alpha)
    doa = model.doa
    if doa.kind == 1:
        if model.aux_g is None:
            raise UnsupportedError(
                "type 1 model without an auxiliary function g: pass explicit a and b"
            )
        g = model.aux_g
        return _Constants(a=lambda n: np.asarray(g(theta(n)), dtype=float), b=theta)
    if doa.kind == 2:
        return _Constants(a=theta, b=np.zeros_like)
    x_F = model.x_F
    return _Constants(a=lambda n: x_F - theta(n), b=lambda n: np.full_like(n, x_F))


class NormingSequence:
    """Norming data (theta, gamma, Gamma, a, b, rho, beta) for a model.

    By default the canonical constants of the model are used.  Passing ``a``
    and ``b`` (callables on float arrays of indices) overrides them; the
    differences are then formed by plain subtraction.

    All query methods accept integer scalars or arrays.  The Gamma prefix
    table is extended lazily in blocks of 2**16 under a lock, so an instance
    can be shared between threads.
    """

    def __init__(self, model: TailModel, a: Optional[Callable] = None,
                 b: Optional[Callable] = None, *, min_index: int = 1,
                 max_index: int = 10 ** 9):
        self.model = model
        if (a is None) != (b is None):
            raise DomainError("override both a and b, or neither")
        if a is None:
            self._c = _constants_for(model, self._theta_float)
            self.overridden = False
        else:
            self._c = _Constants(a=a, b=b, min_index=min_index)
            self.overridden = True
        self.min_index = self._c.min_index
        self.max_index = max_index
        self._lock = threading.Lock()
        self._prefix = np.zeros(1)  # Gamma_0 = 0
        self._base = (0.0, 0.0)

    @classmethod
    def canonical(cls, model: TailModel) -> "NormingSequence":
        return cls(model)

    @property
    def extreme_type(self) -> ExtremeType:
        return ExtremeType.for_doa(self.model.doa)

    # -- theta / gamma ---------------------------------------------------
    def _theta_float(self, n):
        n = np.asarray(n, dtype=float)
        out = np.empty_like(n)
        first = n == 1
        out[first] = self.model.x_lo
        out[~first] = self.model._isf(1.0 / n[~first])
        return out

    def theta(self, n):
        """inf{x : F(x) >= 1 - 1/n}; theta(1) is the infimum of the support."""
        return _out(self._theta_float(_as_index(n)))

    def _gamma_float(self, n):
        n = np.asarray(n, dtype=float)
        if self.model.continuous:
            return 1.0 / n
        return self.model._tail(self._theta_float(n))

    def gamma(self, n):
        return _out(self._gamma_float(_as_index(n)))

    def _extend(self, upto: int):
        if upto > self.max_index:
            raise HorizonError(f"index {upto} beyond the tabulated limit {self.max_index}")
        with self._lock:
            prefix = self._prefix
            # running total kept as an unevaluated sum hi + lo (two-sum), so each
            # table entry is rounded once instead of once per chunk
            hi, lo = self._base
            while len(prefix) <= upto:
                start = len(prefix)
                ks = np.arange(start, start + _BLOCK, dtype=float)
                g = self._gamma_float(ks)
                block = np.empty(_BLOCK)
                for c in range(0, _BLOCK, _CHUNK):
                    part = g[c:c + _CHUNK]
                    block[c:c + _CHUNK] = hi + (lo + np.cumsum(part))
                    s = math.fsum(part)
                    t = hi + s
                    lo += (hi - (t - (t - hi))) + (s - (t - hi))
                    hi = t
                prefix = np.concatenate([prefix, block])
            self._base = (hi, lo)
            self._prefix = prefix

    def Gamma(self, n):
        """Prefix sums Gamma_n = gamma_1 + ... + gamma_n (Gamma_0 = 0)."""
        idx = _as_index(n, lowest=0)
        top = int(np.max(idx)) if idx.size else 0
        if top >= len(self._prefix):
            self._extend(top)
        return _out(self._prefix[idx])

    def Gamma_table(self, upto: int) -> np.ndarray:
        """View of Gamma_0..Gamma_upto."""
        self.Gamma(upto)
        return self._prefix[: upto + 1]

    # -- constants -------------------------------------------------------
    def _check(self, n, lowest):
        return _as_index(n, lowest=max(lowest, self.min_index))

    def a(self, n):
        n = self._check(n, 1).astype(float)
        return _out(self._c.a(n))

    def b(self, n):
        n = self._check(n, 1).astype(float)
        return _out(self._c.b(n))

    def constants(self, n):
        return self.a(n), self.b(n)

    def a_drop(self, n):
        """a_{n-1} - a_n."""
        n = self._check(n, 2)
        if np.any(n - 1 < self.min_index):
            raise DomainError(f"a_(n-1) undefined below index {self.min_index}")
        n = n.astype(float)
        if self._c.a_drop is not None:
            return _out(self._c.a_drop(n))
        return _out(self._c.a(n - 1.0) - self._c.a(n))

    def b_drop(self, n):
        """b_{n-1} - b_n."""
        n = self._check(n, 2)
        if np.any(n - 1 < self.min_index):
            raise DomainError(f"b_(n-1) undefined below index {self.min_index}")
        n = n.astype(float)
        if self._c.b_drop is not None:
            return _out(self._c.b_drop(n))
        return _out(self._c.b(n - 1.0) - self._c.b(n))

    def rho(self, n):
        """(a_{n-1} - a_n) / (a_n gamma_n), n >= 2."""
        drop = np.asarray(self.a_drop(n), dtype=float)
        nf = _as_index(n).astype(float)
        if self._c.rho is not None and self.model.continuous:
            return _out(self._c.rho(nf))
        return _out(drop / (self._c.a(nf) * self._gamma_float(nf)))

    def beta(self, n):
        """(b_{n-1} - b_n) / (a_n gamma_n), n >= 2."""
        drop = np.asarray(self.b_drop(n), dtype=float)
        nf = _as_index(n).astype(float)
        return _out(drop / (self._c.a(nf) * self._gamma_float(nf)))

    def table(self, n_max: int, start: Optional[int] = None) -> dict:
        """Columns n, theta, gamma, a, b, rho, beta for start..n_max (rho/beta NaN where undefined)."""
        first = self.min_index if start is None else start
        n = np.arange(first, n_max + 1)
        defined = n - 1 >= self.min_index
        rho = np.full(n.shape, np.nan)
        beta = np.full(n.shape, np.nan)
        if defined.any():
            rho[defined] = self.rho(n[defined])
            beta[defined] = self.beta(n[defined])
        return {
            "n": n,
            "theta": np.atleast_1d(self.theta(n)),
            "gamma": np.atleast_1d(self.gamma(n)),
            "a": np.atleast_1d(self.a(n)),
            "b": np.atleast_1d(self.b(n)),
            "rho": rho,
            "beta": beta,
        }


def canonical_constants(model: TailModel, n):
    """Canonical (a_n, b_n) for the model."""
    return NormingSequence(model).constants(n)


@dataclass(frozen=True)
class LimitReport:
    n: int
    rho_n: float
    beta_n: float
    rho_G: float
    beta_G: float

    @property
    def rho_gap(self) -> float:
        return abs(self.rho_n - self.rho_G)

    @property
    def beta_gap(self) -> float:
        return abs(self.beta_n - self.beta_G)

    @property
    def gaps(self) -> tuple[float, float]:
        return self.rho_gap, self.beta_gap


def limit_check(seq: NormingSequence, n_max: int) -> LimitReport:
    """Compare (rho_n, beta_n) at n_max with the limiting drift of the attracting law."""
    if n_max < 10:
        raise DomainError("limit_check needs n_max >= 10")
    rho_G, beta_G = seq.extreme_type.rho_beta
    return LimitReport(n_max, float(seq.rho(n_max)), float(seq.beta(n_max)), rho_G, beta_G)
