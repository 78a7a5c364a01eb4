# %% [markdown]
# # The generator of the limit process
#
# A f(x) = (rho_G x + beta_G) f'(x) + int_x^inf (f(z) - f(x)) phi_G(z) dz.
# We check that its two quadrature forms agree, that G is invariant
# (int A f dG = 0) and that the one-step increment rate of the scheme
# converges to A f.

# %%
import numpy as np

from maxscheme import NormingSequence, generator_apply, parse_model, parse_type
from maxscheme.stats import generator_residual, invariance_integral
from maxscheme.testfunctions import bump_family, placed_bump

TYPES = ("gumbel", "frechet:3", "weibull:2")

# %% [markdown]
# ## tau-form against phi-form

# %%
for spec in TYPES:
    et = parse_type(spec)
    f = placed_bump(et, 1.0)
    lo, hi = f.support
    xs = np.linspace(lo - 0.5 if spec == "gumbel" else lo * 0.5, hi, 9)
    gap = max(abs(generator_apply(et, f, x, form="tau") - generator_apply(et, f, x, form="phi")) for x in xs)
    print(f"{spec:10s} max |tau-form - phi-form| = {gap:.2e}")

# %% [markdown]
# ## Invariance of G

# %%
for spec in TYPES:
    et = parse_type(spec)
    vals = [invariance_integral(et, placed_bump(et, t)) for t in (0, 1, 5)]
    print(f"{spec:10s}" + "".join(f"  t={t}: {v:+.1e}" for t, v in zip((0, 1, 5), vals)))

# %% [markdown]
# ## Scheme increment rate against A f
#
# For the exponential model, x = 0 and the bump f_1, the residual
# (1/gamma) E[f(X_{k+1}) - f(x) | X_k = x] - A f(x) shrinks as k grows.

# %%
model = parse_model("exponential")
seq = NormingSequence(model)
et = seq.extreme_type
f = bump_family(1.0)
for k in (10, 100, 1000, 10 ** 4, 10 ** 5):
    r = generator_residual(model, seq, et, f, 0.0, k, 10 ** 6, np.random.default_rng(k))
    print(f"k={k:>6d}  rate={r.increment_rate:+.5f}  A f={r.generator:+.5f}  "
          f"residual={r.estimate:+.2e} +- {r.std_err:.1e}")
