"""Normalised running maxima X_n = (M_n - b_n)/a_n, simulated two ways.

``run_direct`` forms the running maximum and normalises it.  ``run_recursive``
never looks at M_n: it advances X_n with the decreasing-step Euler update

    X_{n+1} = X_n + gamma_{n+1} (rho_{n+1} X_n + beta_{n+1})
              + (1 + rho_{n+1} gamma_{n+1}) ((xi_{n+1} - b_n)/a_n - X_n)_+

Both consume one uniform per step in the same order, so on a shared stream
they agree to rounding.  ``step_index``/``stepwise_eval`` give the
piecewise-constant interpolation of (X_k)_{k>=n} on the clock Gamma.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .distributions import TailModel, open_uniform
from .errors import DomainError, HorizonError
from .norming import NormingSequence
from .streams import map_chunks, path_uniforms


@dataclass(frozen=True)
class SchemePath:
    start_index: int
    values: np.ndarray
    seq: NormingSequence
    seed: Optional[int] = None
    stream: Optional[int] = None

    @property
    def last_index(self) -> int:
        return self.start_index + len(self.values) - 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.start_index, self.last_index + 1)

    def __getitem__(self, n: int) -> float:
        if not self.start_index <= n <= self.last_index:
            raise HorizonError(f"index {n} outside [{self.start_index}, {self.last_index}]")
        return float(self.values[n - self.start_index])

    def maxima(self) -> np.ndarray:
        """a_n X_n + b_n, i.e. the running maximum recovered from the normalised values."""
        n = self.indices
        return np.asarray(self.seq.a(n)) * self.values + np.asarray(self.seq.b(n))

    def at(self, n: int, t: float) -> float:
        return stepwise_eval(self, n, t)


def _start(seq: NormingSequence, start: Optional[int]) -> int:
    n0 = seq.min_index if start is None else int(start)
    if n0 < seq.min_index:
        raise DomainError(f"the norming constants start at index {seq.min_index}")
    return n0


def _coefficients(seq: NormingSequence, n0: int, n_max: int):
    """Per-step arrays for steps n -> n+1, n = n0..n_max-1."""
    nxt = np.arange(n0 + 1, n_max + 1)
    cur = nxt - 1
    gamma = np.atleast_1d(seq.gamma(nxt))
    rho = np.atleast_1d(seq.rho(nxt))
    beta = np.atleast_1d(seq.beta(nxt))
    return {
        "gamma": gamma,
        "rho_gamma": rho * gamma,
        "beta_gamma": beta * gamma,
        "a_cur": np.atleast_1d(seq.a(cur)),
        "b_cur": np.atleast_1d(seq.b(cur)),
    }


def direct_from_variates(seq: NormingSequence, xi: np.ndarray, start: int) -> np.ndarray:
    """Rows of variates xi_1..xi_N -> rows of X_start..X_N by running maxima."""
    xi = np.atleast_2d(xi)
    n_max = xi.shape[1]
    m = np.maximum.accumulate(xi, axis=1)[:, start - 1:]
    n = np.arange(start, n_max + 1)
    return (m - np.asarray(seq.b(n))) / np.asarray(seq.a(n))


def recursive_from_variates(seq: NormingSequence, xi: np.ndarray, start: int) -> np.ndarray:
    """Rows of variates -> rows of X_start..X_N by the Euler recursion."""
    xi = np.atleast_2d(xi)
    n_paths, n_max = xi.shape
    out = np.empty((n_paths, n_max - start + 1))
    a0, b0 = seq.constants(start)
    x = (xi[:, :start].max(axis=1) - b0) / a0
    out[:, 0] = x
    if n_max == start:
        return out
    c = _coefficients(seq, start, n_max)
    for j in range(n_max - start):
        excess = (xi[:, start + j] - c["b_cur"][j]) / c["a_cur"][j] - x
        x = (x + (c["rho_gamma"][j] * x + c["beta_gamma"][j])
             + (1.0 + c["rho_gamma"][j]) * np.maximum(excess, 0.0))
        out[:, j + 1] = x
    return out


def _draw(model: TailModel, n_max: int, rng: np.random.Generator) -> np.ndarray:
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    return model._quantile(open_uniform(rng, n_max))


def run_direct(model: TailModel, seq: NormingSequence, n_max: int,
               rng: np.random.Generator, start: Optional[int] = None) -> SchemePath:
    n0 = _start(seq, start)
    if n_max < n0:
        raise DomainError(f"n_max must be >= start index {n0}")
    xi = _draw(model, n_max, rng)
    return SchemePath(n0, direct_from_variates(seq, xi, n0)[0], seq)


def run_recursive(model: TailModel, seq: NormingSequence, n_max: int,
                  rng: np.random.Generator, start: Optional[int] = None) -> SchemePath:
    n0 = _start(seq, start)
    if n_max < n0:
        raise DomainError(f"n_max must be >= start index {n0}")
    xi = _draw(model, n_max, rng)
    return SchemePath(n0, recursive_from_variates(seq, xi, n0)[0], seq)


def euler_step(seq: NormingSequence, n: int, x: float, xi: float) -> float:
    """One update X_n = x -> X_{n+1} given the fresh variate xi_{n+1}."""
    g = float(seq.gamma(n + 1))
    rg = float(seq.rho(n + 1)) * g
    bg = float(seq.beta(n + 1)) * g
    a, b = seq.constants(n)
    return x + (rg * x + bg) + (1.0 + rg) * max((xi - b) / a - x, 0.0)


# -- stepwise process ----------------------------------------------------
def step_index(seq: NormingSequence, n: int, t: float) -> int:
    """N(n, t) = inf{k >= n : Gamma_{k+1} - Gamma_n > t}."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if not t >= 0:
        raise DomainError("t must be >= 0")
    upper = 2 * n + 16
    while True:
        if upper > seq.max_index:
            upper = seq.max_index
        table = seq.Gamma_table(upper)
        base = table[n]
        if table[upper] - base > t:
            break
        if upper == seq.max_index:
            raise HorizonError(f"t = {t} runs past the tabulated clock (index {seq.max_index})")
        upper *= 2
    j = int(np.searchsorted(table, base + t, side="right"))
    j = max(j, n + 1)
    while j > n + 1 and table[j - 1] - base > t:
        j -= 1
    while table[j] - base <= t:
        j += 1
    return j - 1


def stepwise_eval(path: SchemePath, n: int, t: float) -> float:
    """Value at time t of the process (X_k)_{k>=n} run on the clock Gamma: X_{N(n,t)}."""
    if n < path.start_index:
        raise DomainError(f"n must be >= the path start index {path.start_index}")
    k = step_index(path.seq, n, t)
    if k > path.last_index:
        raise HorizonError(f"N({n}, {t}) = {k} beyond the simulated index {path.last_index}")
    return path[k]


# -- many paths ----------------------------------------------------------
def simulate_paths(model: TailModel, seq: NormingSequence, n_max: int, n_paths: int,
                   seed: int, record_at: Sequence[int], method: str = "direct",
                   first_path: int = 0, threads: Optional[int] = None,
                   chunk: Optional[int] = None) -> np.ndarray:
    """X at the indices ``record_at`` for paths first_path .. first_path+n_paths-1.

    Path i draws from its own stream (seed, i).  The direct route uses that
    the quantile function is nondecreasing: the running maximum of the
    variates is the quantile of the running maximum of the uniforms, so only
    the recorded maxima are transformed.
    """
    rec = np.asarray(sorted(set(int(r) for r in record_at)))
    if list(rec) != [int(r) for r in record_at]:
        raise DomainError("record_at must be strictly increasing")
    n0 = seq.min_index
    if rec.size == 0 or rec[0] < n0 or rec[-1] > n_max:
        raise DomainError(f"record indices must lie in [{n0}, {n_max}]")
    a = np.asarray(seq.a(rec))
    b = np.asarray(seq.b(rec))

    if method == "direct":
        def work(lo, hi):
            u = path_uniforms(seed, range(first_path + lo, first_path + hi), n_max)
            cols = []
            running = np.zeros(hi - lo)
            prev = 0
            for r in rec:
                running = np.maximum(running, u[:, prev:r].max(axis=1))
                prev = r
                cols.append(running)
            m = model._quantile(np.stack(cols, axis=1))
            return (m - b) / a
        size = chunk or max(1, min(n_paths, 2 ** 22 // max(n_max, 1)))
    elif method == "recursive":
        col = rec - n0

        def work(lo, hi):
            u = path_uniforms(seed, range(first_path + lo, first_path + hi), n_max)
            x = recursive_from_variates(seq, model._quantile(u), n0)
            return x[:, col]
        size = chunk or max(1, min(n_paths, 2 ** 23 // max(n_max, 1)))
    else:
        raise DomainError(f"unknown method {method!r}")
    return map_chunks(work, n_paths, size, threads)
