# %% [markdown]
# # The Euler scheme against its jump-process limit
#
# X_n = (max(xi_1..xi_n) - b_n) / a_n follows a decreasing-step Euler
# recursion.  Its marginal law approaches G, and the stepwise-constant
# interpolation on the clock Gamma_n approaches the stationary piecewise
# deterministic limit process.  Path counts here are reduced for speed; the
# acceptance tests use 1e5 paths.

# %%
import numpy as np

from maxscheme import NormingSequence, limit_autocovariance, parse_model, parse_type
from maxscheme import pdmp, scheme
from maxscheme.stats import autocovariance, ks_distance

PATHS = 20000
PAIRS = (("exponential", "gumbel"), ("pareto:3", "frechet:3"), ("uniform01", "weibull:1"),
         ("boundedpower:2", "weibull:2"))

# %% [markdown]
# ## Marginal convergence: KS(X_n, G)

# %%
rec = [10, 100, 1000, 10000]
for j, (spec, _) in enumerate(PAIRS):
    model = parse_model(spec)
    seq = NormingSequence(model)
    x = scheme.simulate_paths(model, seq, rec[-1], PATHS, seed=100 + j, record_at=rec)
    ks = [ks_distance(x[:, c], seq.extreme_type.g_cdf) for c in range(len(rec))]
    print(f"{spec:16s}" + "".join(f"  n={n}: {k:.4f}" for n, k in zip(rec, ks)))
print(f"(sampling noise at {PATHS} paths is about {0.87 / np.sqrt(PATHS):.4f})")

# %% [markdown]
# ## Stationarity of the limit process started from G

# %%
times = [0.5, 1.0, 2.0, 5.0]
for j, (_, tspec) in enumerate(PAIRS):
    et = parse_type(tspec)
    x = pdmp.simulate_paths(et, "stationary", times, PATHS, seed=200 + j)
    print(f"{tspec:10s}" + "".join(f"  t={t:g}: {ks_distance(x[:, c + 1], et.g_cdf):.4f}"
                                    for c, t in enumerate(times)))

# %% [markdown]
# ## Lag covariance: scheme from n = 1e4, limit process, exact value
#
# The exact covariance comes from S_t = min(e^t S_0, W) in tau-coordinates.
# For Frechet(3) the sample covariance has infinite variance, so expect
# occasional large excursions of both Monte Carlo columns.

# %%
n = 10 ** 4
for j, (spec, tspec) in enumerate(PAIRS):
    model = parse_model(spec)
    seq = NormingSequence(model)
    et = parse_type(tspec)
    for t in (0.5, 1.0, 2.0):
        k = scheme.step_index(seq, n, t)
        xs = scheme.simulate_paths(model, seq, k, PATHS, seed=300 + j, record_at=[n, k])
        xp = pdmp.simulate_paths(et, "stationary", [t], PATHS, seed=400 + j)
        print(f"{spec:16s} t={t:<4g} scheme={autocovariance(xs[:, 0], xs[:, 1]):.4f} "
              f"limit={autocovariance(xp[:, 0], xp[:, 1]):.4f} exact={limit_autocovariance(et, t):.4f}")
