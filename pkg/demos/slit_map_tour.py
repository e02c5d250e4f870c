# %% [markdown]
# # The slit map and the two distances
#
# A finite-gap set E is mapped to a comb domain: each gap becomes a vertical
# slit. Distances between points of E measured through the map (rho) are
# compared with the explicit formula tau.
#
# Run with `python demos/slit_map_tour.py`.

# %%
import numpy as np

from levinapprox import (ExperimentConfig, example1, run_lemma36, run_theorem1,
                         single_gap, solve_parameters, tau, validate_geometry)

# %% [markdown]
# ## One gap: compare with the closed form
# For E = R minus (-1, 1) the map is sqrt((z^2 - 1) / 2).

# %%
E = single_gap()
m = solve_parameters(E)
z = np.array([0.3 + 0.2j, -4.0 + 1e-3j, 2.0 + 5.0j])
exact = np.sqrt(z - 1) * np.sqrt(z + 1) / np.sqrt(2)
print("tip c =", m.tips[0], " slit height v =", m.heights[0], " (2^-1/2 =", 2 ** -0.5, ")")
print("max deviation from closed form:", np.max(np.abs(m.evaluate(z) - exact)))

# %% [markdown]
# ## Six equal gaps
# Geometry constants first, then the solved slits. Slit heights scale with
# gap lengths, so v_j / |J_j| stays nearly constant.

# %%
E6 = example1((-3, 3))
print("\n".join(validate_geometry(E6).as_lines()))
m6 = solve_parameters(E6)
for (a, b), u, v in zip(E6.gaps, m6.bases, m6.heights):
    print(f"gap ({a:5.1f}, {b:5.1f})  base u={u:8.4f}  height v={v:.4f}")
print("closure residuals:", m6.residuals)

# %% [markdown]
# ## rho against tau
# Near a gap endpoint both grow like a square root of the separation.

# %%
for d in [1e-6, 1e-4, 1e-2, 0.5]:
    x1, x2 = 1.0, 1.0 + d
    print(f"d={d:8.1e}  tau={tau(E, x1, x2):.4e}  rho={m.rho(x1, x2):.4e}")

report = run_theorem1(ExperimentConfig(set="example1:-3,3", pairs=1000))
print("\n".join(report.summary_lines()))

# %% [markdown]
# ## Vertical displacement regimes
# |phi(x + i delta) - phi(x)| grows like delta far from the gap, like
# sqrt(delta) at the endpoint and like delta again once delta exceeds |J|.

# %%
lem = run_lemma36(ExperimentConfig(set="single:-1,1"))
for r in lem.regimes:
    print(f"regime {r.regime:>3}  x={r.x:.4f}  slope={r.slope:.4f}  expected {r.expected_slope}")
for c in lem.checks():
    print(c.line())
