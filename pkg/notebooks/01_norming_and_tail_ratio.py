# %% [markdown]
# # Norming constants, drift coefficients and the tail ratio
#
# For each built-in model we tabulate the norming constants (a_n, b_n), the
# drift coefficients (rho_n, beta_n) of the Euler recursion and the sup-grid
# gap between the tail ratio (1 - F(a_n x + b_n)) / (1 - F(theta_n)) and the
# limiting tail function tau_G.  Run with ``python notebooks/01_norming_and_tail_ratio.py``.

# %%
import numpy as np

from maxscheme import NormingSequence, StandardNormal, builtin_models, limit_check, tail_ratio_gap

NS = [10 ** 2, 10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6]

# %% [markdown]
# ## Drift coefficients approach (rho_G, beta_G)

# %%
for model in builtin_models():
    seq = NormingSequence(model)
    rho_G, beta_G = seq.extreme_type.rho_beta
    print(f"{model.spec:16s} -> {seq.extreme_type.spec:10s} (rho_G, beta_G) = ({rho_G:+.4f}, {beta_G:+.1f})")
    for n in NS:
        rep = limit_check(seq, n)
        print(f"    n={n:>8d}  rho_n={rep.rho_n:+.6f}  beta_n={rep.beta_n:+.6f}")

# %% [markdown]
# ## Uniform tail-ratio convergence on a compact grid
#
# For pareto:3 at n = 100 the left end of the grid, a_n x + b_n with x = 0.2,
# falls below the Pareto lower bound 1, where the tail is exactly 1; once
# a_n x >= 1 on the whole grid the ratio equals x^-3 up to rounding.

# %%
print(f"{'model':16s}" + "".join(f"{n:>12d}" for n in NS))
for model in builtin_models():
    seq = NormingSequence(model)
    gaps = [tail_ratio_gap(model, seq, n) for n in NS]
    print(f"{model.spec:16s}" + "".join(f"{g:12.2e}" for g in gaps))

# %% [markdown]
# ## The normal centring
#
# The default normal centring uses 2 sqrt(log n) in the correction term.  It
# gives the right drift limits, but the centred tail ratio drifts away from
# exp(-x) like ((sqrt 2 - 1)/2) log log n.  The classical centring with
# 2 sqrt(2 log n) converges, slowly.

# %%
m = StandardNormal()


def a(n):
    return 1 / np.sqrt(2 * np.log(n))


def b(n):
    return np.sqrt(2 * np.log(n)) - (np.log(np.log(n)) + np.log(4 * np.pi)) / (2 * np.sqrt(2 * np.log(n)))


classical = NormingSequence(m, a=a, b=b, min_index=3)
for name, seq in (("default", NormingSequence(m)), ("classical", classical)):
    gaps = [tail_ratio_gap(m, seq, n) for n in NS]
    print(f"{name:10s}" + "".join(f"{g:10.3f}" for g in gaps))
