"""C^1 test functions with compact support, used to probe the generator."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .evt_limits import FRECHET, GUMBEL, ExtremeType

# frechet copies are shifted right by this much so the support sits in (0, inf)
FRECHET_SHIFT = 0.5 + math.pi
# weibull copies are squeezed onto this interval inside (-inf, 0]
WEIBULL_WINDOW = (-3.0, -0.5)


@dataclass(frozen=True)
class TestFunction:
    f: Callable
    df: Callable
    support: tuple[float, float]
    breakpoints: tuple[float, ...] = ()
    name: str = field(default="f", compare=False)

    __test__ = False  # not a pytest class

    def __call__(self, x):
        return self.f(x)

    @property
    def is_constant(self) -> bool:
        return math.isinf(self.support[0]) and math.isinf(self.support[1])

    def transformed(self, scale: float, offset: float) -> "TestFunction":
        """x -> f(scale * (x - offset)), scale > 0."""
        f, df = self.f, self.df
        lo, hi = self.support
        return TestFunction(
            f=lambda x: f(scale * (np.asarray(x, dtype=float) - offset)),
            df=lambda x: scale * df(scale * (np.asarray(x, dtype=float) - offset)),
            support=(offset + lo / scale, offset + hi / scale),
            breakpoints=tuple(offset + p / scale for p in self.breakpoints),
            name=f"{self.name}[{scale:g}*(x-{offset:g})]",
        )


def bump_family(t: float) -> TestFunction:
    """f_t: 1 + cos x on [-pi, 0], 2 on [0, t], 1 + cos(x - t) on [t, t + pi], 0 elsewhere."""
    if t < 0:
        raise ValueError("t must be >= 0")

    def f(x):
        x = np.asarray(x, dtype=float)
        out = np.where((x >= -math.pi) & (x < 0), 1.0 + np.cos(x), 0.0)
        out = np.where((x >= 0) & (x <= t), 2.0, out)
        out = np.where((x > t) & (x <= t + math.pi), 1.0 + np.cos(x - t), out)
        return out[()] if out.ndim == 0 else out

    def df(x):
        x = np.asarray(x, dtype=float)
        out = np.where((x >= -math.pi) & (x < 0), -np.sin(x), 0.0)
        out = np.where((x > t) & (x <= t + math.pi), -np.sin(x - t), out)
        return out[()] if out.ndim == 0 else out

    points = (0.0,) if t == 0 else (0.0, float(t))
    return TestFunction(f, df, (-math.pi, t + math.pi), points, name=f"f_{t:g}")


def constant(c: float) -> TestFunction:
    return TestFunction(
        f=lambda x: np.full_like(np.asarray(x, dtype=float), c)[()],
        df=lambda x: np.zeros_like(np.asarray(x, dtype=float))[()],
        support=(-math.inf, math.inf),
        name=f"const_{c:g}",
    )


def placed_bump(etype: ExtremeType, t: float) -> TestFunction:
    """The member f_t moved inside D_G: as is for Gumbel, shifted right for
    Frechet, rescaled onto ``WEIBULL_WINDOW`` for Weibull."""
    base = bump_family(t)
    if etype.kind == GUMBEL:
        return base
    if etype.kind == FRECHET:
        return base.transformed(1.0, FRECHET_SHIFT)
    lo, hi = WEIBULL_WINDOW
    scale = (t + 2 * math.pi) / (hi - lo)
    return base.transformed(scale, lo + math.pi / scale)
