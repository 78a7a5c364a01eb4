"""The three extreme-value limit laws: Gumbel, Frechet(alpha), Weibull(alpha).

Each law G is written as exp(-tau(x)) on its support D_G, where tau is the
limiting tail function; phi = -tau' is the density of jump levels of the
limit process and (rho_G, beta_G) are its drift coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .distributions import DoaTag, _out, open_uniform
from .errors import DomainError, ParseError

GUMBEL, FRECHET, WEIBULL = "gumbel", "frechet", "weibull"
_KIND_OF_DOA = {1: GUMBEL, 2: FRECHET, 3: WEIBULL}


@dataclass(frozen=True)
class ExtremeType:
    kind: str
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.kind not in (GUMBEL, FRECHET, WEIBULL):
            raise DomainError(f"unknown extreme-value kind {self.kind!r}")
        if self.kind == GUMBEL:
            if self.alpha is not None:
                raise DomainError("the Gumbel law has no shape index")
        elif self.alpha is None or not self.alpha > 0:
            raise DomainError(f"{self.kind} requires alpha > 0, got {self.alpha}")

    @classmethod
    def for_doa(cls, doa: DoaTag) -> "ExtremeType":
        return cls(_KIND_OF_DOA[doa.kind], doa.alpha)

    @property
    def doa(self) -> DoaTag:
        return DoaTag({GUMBEL: 1, FRECHET: 2, WEIBULL: 3}[self.kind], self.alpha)

    @property
    def spec(self) -> str:
        return self.kind if self.kind == GUMBEL else f"{self.kind}:{self.alpha:g}"

    def __str__(self):
        return self.spec

    # -- support ---------------------------------------------------------
    @property
    def support(self) -> tuple[float, float]:
        """Closure bounds of D_G: R, (0, inf) or (-inf, 0]."""
        return {
            GUMBEL: (-math.inf, math.inf),
            FRECHET: (0.0, math.inf),
            WEIBULL: (-math.inf, 0.0),
        }[self.kind]

    def in_support(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == GUMBEL:
            out = np.isfinite(x)
        elif self.kind == FRECHET:
            out = (x > 0) & np.isfinite(x)
        else:
            out = (x <= 0) & np.isfinite(x)
        return out[()] if out.ndim == 0 else out

    # -- tau, phi, G -----------------------------------------------------
    def tau(self, x):
        """Limiting tail function.  For Frechet, x <= 0 returns +inf."""
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            if self.kind == GUMBEL:
                out = np.exp(-x)
            elif self.kind == FRECHET:
                out = np.where(x > 0, np.maximum(x, 0.0) ** -self.alpha, math.inf)
            else:
                out = np.where(x <= 0, np.maximum(-x, 0.0) ** self.alpha, 0.0)
        return _out(out)

    def phi(self, x):
        """Jump-level density -tau'(x) (zero outside D_G)."""
        x = np.asarray(x, dtype=float)
        a = self.alpha
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            if self.kind == GUMBEL:
                out = np.exp(-x)
            elif self.kind == FRECHET:
                out = np.where(x > 0, a * np.maximum(x, 0.0) ** (-a - 1.0), 0.0)
            else:
                out = np.where(x <= 0, a * np.maximum(-x, 0.0) ** (a - 1.0), 0.0)
        return _out(out)

    def inverse_tau(self, s):
        """The point x in D_G with tau(x) = s, for s > 0."""
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore"):
            if self.kind == GUMBEL:
                out = -np.log(s)
            elif self.kind == FRECHET:
                out = s ** (-1.0 / self.alpha)
            else:
                out = -(s ** (1.0 / self.alpha))
        return _out(out)

    def g_cdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore"):
            out = np.exp(-np.asarray(self.tau(x), dtype=float))
        return _out(out)

    def g_pdf(self, x):
        x = np.asarray(x, dtype=float)
        t = np.asarray(self.tau(x), dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.where(np.isfinite(t), np.asarray(self.phi(x)) * np.exp(-t), 0.0)
        return _out(out)

    def g_quantile(self, u):
        u = np.asarray(u, dtype=float)
        if np.any(~((u > 0) & (u < 1))):
            raise DomainError("limit-law quantile level must lie in (0, 1)")
        return self.inverse_tau(-np.log(u))

    def sample_nu(self, rng: np.random.Generator, size=None):
        """Draws from nu_G by inversion."""
        return self.g_quantile(open_uniform(rng, size))

    # -- drift -----------------------------------------------------------
    @property
    def rho_beta(self) -> tuple[float, float]:
        if self.kind == GUMBEL:
            return 0.0, -1.0
        if self.kind == FRECHET:
            return -1.0 / self.alpha, 0.0
        return 1.0 / self.alpha, 0.0

    @property
    def rho_G(self) -> float:
        return self.rho_beta[0]

    @property
    def beta_G(self) -> float:
        return self.rho_beta[1]


def parse_type(spec: str) -> ExtremeType:
    """``gumbel``, ``frechet:ALPHA`` or ``weibull:ALPHA``."""
    name, _, arg = spec.strip().lower().partition(":")
    if name == GUMBEL:
        if arg:
            raise ParseError("gumbel takes no parameter")
        return ExtremeType(GUMBEL)
    if name in (FRECHET, WEIBULL):
        try:
            alpha = float(arg)
        except ValueError:
            raise ParseError(f"cannot read shape index from {spec!r}") from None
        if not alpha > 0 or math.isinf(alpha):
            raise ParseError(f"shape index must be positive and finite, got {arg!r}")
        return ExtremeType(name, alpha)
    raise ParseError(f"unknown extreme-value type {spec!r}")
