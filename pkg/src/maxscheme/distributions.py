"""Distribution models F lying in the three max-domains of attraction.

Every model exposes ``cdf``, ``tail`` (``1 - F`` evaluated directly, never as
``1 - cdf``), the left-continuous inverse ``quantile`` and its tail-side twin
``isf``.  All of them are vectorised over numpy arrays.  Sampling is by
inversion, one uniform per draw, so two code paths that consume the same
uniforms see exactly the same variates.

Models are immutable.  String specs such as ``"pareto:3"`` or
``"exponential+trunc:0.5"`` are handled by :func:`parse_model`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import special

from .errors import DomainError, ParseError, UnboundedError

# smallest positive value produced by Generator.random(); used to keep
# inversion uniforms inside the open interval (0, 1)
_U_MIN = 2.0 ** -53


def open_uniform(rng: np.random.Generator, size=None):
    """Uniform draws on (0, 1): zeros from ``rng.random`` are nudged up to 2**-53."""
    u = rng.random(size)
    return np.maximum(u, _U_MIN)


def _out(x):
    x = np.asarray(x, dtype=float)
    return x[()] if x.ndim == 0 else x


@dataclass(frozen=True)
class DoaTag:
    """Domain-of-attraction label: type 1 (Gumbel), 2 (Frechet) or 3 (Weibull)."""

    kind: int
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.kind not in (1, 2, 3):
            raise DomainError(f"domain-of-attraction kind must be 1, 2 or 3, got {self.kind}")
        if self.kind == 1:
            if self.alpha is not None:
                raise DomainError("type 1 carries no index alpha")
        elif self.alpha is None or not self.alpha > 0:
            raise DomainError(f"type {self.kind} requires alpha > 0, got {self.alpha}")

    def __str__(self):
        return "Type1" if self.kind == 1 else f"Type{self.kind}({self.alpha:g})"


class TailModel:
    """Base class.  Subclasses implement the four ``_``-prefixed kernels."""

    #: right endpoint sup{x : F(x) < 1}
    x_F: float = math.inf
    #: infimum of the support, i.e. the left-inverse of F at 0+
    x_lo: float = -math.inf
    doa: DoaTag
    #: True when F has no atoms, so that gamma_n = 1/n exactly
    continuous: bool = True
    aux_g: Optional[Callable] = None

    # kernels receive float arrays and need not validate
    def _cdf(self, x):
        raise NotImplementedError

    def _tail(self, x):
        raise NotImplementedError

    def _quantile(self, u):
        raise NotImplementedError

    def _isf(self, q):
        raise NotImplementedError

    @property
    def spec(self) -> str:
        raise NotImplementedError

    def cdf(self, x):
        return _out(self._cdf(np.asarray(x, dtype=float)))

    def tail(self, x):
        """P(xi > x), computed without forming 1 - cdf."""
        return _out(self._tail(np.asarray(x, dtype=float)))

    def quantile(self, u):
        """Left-continuous inverse F^{<-}(u) = inf{y : F(y) >= u} for u in (0, 1]."""
        u = np.asarray(u, dtype=float)
        if np.any(~((u > 0) & (u <= 1))):
            raise DomainError("quantile level must lie in (0, 1]")
        if math.isinf(self.x_F) and np.any(u == 1):
            raise UnboundedError("quantile(1) is +inf for an unbounded right endpoint")
        return _out(self._quantile(u))

    def isf(self, q):
        """Tail-side inverse: ``quantile(1 - q)`` without forming ``1 - q``.  q in [0, 1)."""
        q = np.asarray(q, dtype=float)
        if np.any(~((q >= 0) & (q < 1))):
            raise DomainError("tail level must lie in [0, 1)")
        if math.isinf(self.x_F) and np.any(q == 0):
            raise UnboundedError("isf(0) is +inf for an unbounded right endpoint")
        return _out(self._isf(q))

    def sample(self, rng: np.random.Generator, size=None):
        """Inversion sampling: ``quantile(U)`` with U uniform on (0, 1)."""
        return _out(self._quantile(open_uniform(rng, size)))

    def truncate(self, delta: float) -> "Truncated":
        return Truncated(self, delta)

    def __repr__(self):
        return f"<{type(self).__name__} {self.spec} {self.doa}>"


@dataclass(frozen=True, repr=False)
class Exponential(TailModel):
    """Standard exponential law, F(x) = 1 - exp(-x) on [0, inf)."""

    x_lo = 0.0
    doa = DoaTag(1)

    @staticmethod
    def aux_g(x):
        return np.ones_like(np.asarray(x, dtype=float))[()]

    @property
    def spec(self):
        return "exponential"

    def _cdf(self, x):
        return np.where(x > 0, -np.expm1(-np.maximum(x, 0.0)), 0.0)

    def _tail(self, x):
        return np.where(x > 0, np.exp(-np.maximum(x, 0.0)), 1.0)

    def _quantile(self, u):
        return -np.log1p(-u)

    def _isf(self, q):
        with np.errstate(divide="ignore"):
            return -np.log(q)


@dataclass(frozen=True, repr=False)
class StandardNormal(TailModel):
    """Standard Gaussian law.

    cdf and tail come from the Cephes ``ndtr`` routine (erfc based).  The
    inverse is computed by a short bisection to bracket the root and Newton
    iterations on the log-tail, to an absolute tolerance of 1e-12.
    """

    doa = DoaTag(1)
    _bracket = 40.0
    _tol = 1e-12

    @staticmethod
    def aux_g(x):
        # asymptotic form of the auxiliary function; only meaningful for x > 0
        return _out(1.0 / np.asarray(x, dtype=float))

    @property
    def spec(self):
        return "normal"

    def _cdf(self, x):
        return special.ndtr(x)

    def _tail(self, x):
        return special.ndtr(-x)

    def _upper_isf(self, q):
        # solves tail(x) = q for q in (0, 1/2], returning x >= 0
        lo = np.zeros_like(q)
        hi = np.full_like(q, self._bracket)
        for _ in range(12):
            mid = 0.5 * (lo + hi)
            above = special.ndtr(-mid) > q
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
        x = 0.5 * (lo + hi)
        logq = np.log(q)
        for _ in range(50):
            # Newton on log tail(x) - log q; d/dx log tail = -pdf/tail
            lt = special.log_ndtr(-x)
            log_pdf = -0.5 * x * x - 0.5 * math.log(2 * math.pi)
            step = (lt - logq) * np.exp(lt - log_pdf)
            x = np.clip(x + step, lo, hi)
            if np.all(np.abs(step) < self._tol):
                break
        return x

    def _isf(self, q):
        q = np.asarray(q, dtype=float)
        out = np.empty_like(q)
        upper = q <= 0.5
        with np.errstate(divide="ignore"):
            out[upper] = self._upper_isf(np.maximum(q[upper], 1e-300))
            out[upper & (q == 0)] = math.inf
        out[~upper] = -self._upper_isf(1.0 - q[~upper])
        return out

    def _quantile(self, u):
        u = np.asarray(u, dtype=float)
        out = np.empty_like(u)
        hi = u >= 0.5
        out[hi] = self._isf(1.0 - u[hi])
        out[~hi] = -self._upper_isf(u[~hi])
        return out


@dataclass(frozen=True, repr=False)
class Pareto(TailModel):
    """Pareto law F(x) = 1 - x^(-alpha) on [1, inf)."""

    alpha: float = 1.0
    x_lo = 1.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"Pareto index must be positive, got {self.alpha}")

    @property
    def doa(self):
        return DoaTag(2, self.alpha)

    @property
    def spec(self):
        return f"pareto:{self.alpha:g}"

    def _cdf(self, x):
        return np.where(x >= 1, -np.expm1(-self.alpha * np.log(np.maximum(x, 1.0))), 0.0)

    def _tail(self, x):
        return np.where(x >= 1, np.maximum(x, 1.0) ** -self.alpha, 1.0)

    def _quantile(self, u):
        return (1.0 - u) ** (-1.0 / self.alpha)

    def _isf(self, q):
        with np.errstate(divide="ignore"):
            return q ** (-1.0 / self.alpha)


@dataclass(frozen=True, repr=False)
class BoundedPower(TailModel):
    """F(x) = 1 - (1 - x)^alpha on [0, 1]; Weibull domain with index alpha."""

    alpha: float = 1.0
    x_F = 1.0
    x_lo = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"power index must be positive, got {self.alpha}")

    @property
    def doa(self):
        return DoaTag(3, self.alpha)

    @property
    def spec(self):
        return f"boundedpower:{self.alpha:g}"

    def _cdf(self, x):
        return 1.0 - self._tail(x)

    def _tail(self, x):
        return np.clip(1.0 - x, 0.0, 1.0) ** self.alpha

    def _quantile(self, u):
        return 1.0 - (1.0 - u) ** (1.0 / self.alpha)

    def _isf(self, q):
        return 1.0 - q ** (1.0 / self.alpha)


@dataclass(frozen=True, repr=False)
class Uniform01(BoundedPower):
    """Uniform law on [0, 1]: the alpha = 1 member of :class:`BoundedPower`."""

    alpha: float = 1.0

    def __post_init__(self):
        if self.alpha != 1.0:
            raise DomainError("Uniform01 has alpha = 1")

    @property
    def spec(self):
        return "uniform01"

    def _cdf(self, x):
        return np.clip(x, 0.0, 1.0)

    def _tail(self, x):
        return np.clip(1.0 - x, 0.0, 1.0)

    def _quantile(self, u):
        return u.copy()

    def _isf(self, q):
        return 1.0 - q


@dataclass(frozen=True, repr=False)
class Truncated(TailModel):
    """F_delta(x) = F(x) 1{x >= delta}: the mass of F below delta is moved onto delta.

    The domain of attraction, the right endpoint and the auxiliary function are
    those of the base law.
    """

    base: TailModel
    delta: float

    def __post_init__(self):
        if not self.delta < self.base.x_F:
            raise DomainError(f"truncation level {self.delta} must lie below x_F = {self.base.x_F}")

    @property
    def x_F(self):
        return self.base.x_F

    @property
    def x_lo(self):
        return max(self.base.x_lo, self.delta)

    @property
    def doa(self):
        return self.base.doa

    @property
    def aux_g(self):
        return self.base.aux_g

    @property
    def continuous(self):
        # an atom at delta appears iff F(delta) > 0
        return self.base.continuous and float(self.base.cdf(self.delta)) == 0.0

    @property
    def spec(self):
        return f"{self.base.spec}+trunc:{self.delta:g}"

    def _cdf(self, x):
        return np.where(x >= self.delta, self.base._cdf(x), 0.0)

    def _tail(self, x):
        return np.where(x >= self.delta, self.base._tail(x), 1.0)

    def _quantile(self, u):
        u = np.asarray(u, dtype=float)
        out = np.full_like(u, self.delta)
        above = u > float(self.base.cdf(self.delta))
        out[above] = self.base._quantile(u[above])
        return out

    def _isf(self, q):
        q = np.asarray(q, dtype=float)
        out = np.full_like(q, self.delta)
        above = q < float(self.base.tail(self.delta))
        out[above] = self.base._isf(q[above])
        return out


def _parse_positive(text: str, what: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"cannot read {what} from {text!r}") from None
    if not value > 0 or math.isinf(value):
        raise ParseError(f"{what} must be a positive finite number, got {text!r}")
    return value


def parse_model(spec: str) -> TailModel:
    """Build a model from ``exponential``, ``normal``, ``pareto:A``, ``uniform01``,
    ``boundedpower:A``, optionally suffixed by ``+trunc:DELTA``."""
    spec = spec.strip()
    base_text, _, trunc_text = spec.partition("+")
    name, _, arg = base_text.strip().lower().partition(":")
    if name in ("exponential", "normal", "uniform01") and arg:
        raise ParseError(f"model {name!r} takes no parameter")
    if name == "exponential":
        model: TailModel = Exponential()
    elif name == "normal":
        model = StandardNormal()
    elif name == "uniform01":
        model = Uniform01()
    elif name == "pareto":
        model = Pareto(_parse_positive(arg, "Pareto index"))
    elif name == "boundedpower":
        model = BoundedPower(_parse_positive(arg, "power index"))
    else:
        raise ParseError(f"unknown model {base_text!r}")
    if trunc_text:
        key, _, value = trunc_text.partition(":")
        if key.strip().lower() != "trunc":
            raise ParseError(f"unknown model modifier {trunc_text!r}")
        try:
            delta = float(value)
        except ValueError:
            raise ParseError(f"cannot read truncation level from {value!r}") from None
        model = model.truncate(delta)
    return model


def builtin_models() -> list[TailModel]:
    return [Exponential(), StandardNormal(), Pareto(3.0), Uniform01(), BoundedPower(2.0)]
