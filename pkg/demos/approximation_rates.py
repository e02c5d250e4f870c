# %% [markdown]
# # Approximation rates on sets with gaps
#
# The best uniform approximation error A_sigma of f by functions of type
# sigma decays like sigma^-alpha exactly when the modulus of continuity of f,
# measured in the conformal distance rho, behaves like delta^alpha.
#
# Run with `python demos/approximation_rates.py` (about a minute).

# %%
import numpy as np

from levinapprox import (ExperimentConfig, abs_pow, four_gap, gap_free, kernel_approximant,
                         kernel_error, minimax_approx, rate_fit, run_rates)

sigmas = [4.0, 8.0, 16.0, 32.0, 64.0]

# %% [markdown]
# ## The classical case
# On a set without gaps, |x|^(1/2) is approximated at rate sigma^(-1/2).

# %%
E = gap_free(-3, 3)
f = abs_pow(E, 0.0, 0.5)
mm, kr = [], []
for s in sigmas:
    approx, err = minimax_approx(f, E, s)
    mm.append(err)
    kr.append(kernel_error(kernel_approximant(f, E, s), f, E))
    print(f"sigma={s:5.0f}  minimax={err:.4e}  (lower bound {approx.info['lower_bound']:.4e})"
          f"  kernel(type {100 * s:.0f})={kr[-1]:.4e}")
print("slopes: minimax %.3f, kernel %.3f" % (rate_fit(sigmas, mm)[0], rate_fit(sigmas, kr)[0]))

# %% [markdown]
# ## Four gaps, f = tau(0, x)^alpha
# The measured exponent of A_sigma matches the exponent of omega*(delta).

# %%
E4 = four_gap()
for alpha in (0.3, 0.7):
    cfg = ExperimentConfig(fn=f"tau-pow:x0=0,alpha={alpha}", sigmas=sigmas, kernel=False)
    result = run_rates(cfg, E4)
    print(f"alpha={alpha}")
    print("  errors:", np.round(result.approx.errors, 5))
    for line in result.summary_lines():
        print("  " + line)
    for c in result.checks():
        print("  " + c.line())
