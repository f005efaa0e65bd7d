"""
Which equations do the solutions satisfy?
=========================================

Each solution family is plugged back into its PDE. Time derivatives come
from finite differences or the L1 Caputo scheme, spatial operators act
exactly on eigenfunction data.
"""

# %%
import subordination as sb

f = sb.Eigenfunction(lam=-1.0)

# %%
# Brownian time: du/dt = L f / sqrt(pi t) + L^2 u.

r = sb.residual_ibm_pde(f, [0.1, 1.0, 10.0], 0.0)
print("Brownian-time PDE     :", f"{r.max_rel_residual:.2e}")

# %%
# Fractional: Caputo D^beta u = L u.

for beta in (1 / 3, 0.5):
    r = sb.residual_fractional(f, beta, [0.5, 1.0, 2.0], 0.0)
    print(f"Caputo PDE beta={beta:.3f}:", f"{r.max_rel_residual:.2e}")

# %%
# n-th order equation for beta = 1/n. The time weights t^(j/n - 1) / Gamma(j/n)
# make the residual vanish; the reversed power t^(1 - j/n) does not, except at t = 1.

r = sb.residual_n_order(f, 3)
print("n=3, t^(j/n-1)        :", f"{r.max_rel_residual:.2e}")
print("n=3, t^(1-j/n)        :", f"{r.details['printed_max_rel_residual']:.2e}")

# %%
# Stable time, alpha = 1 and alpha = 1/2.

for alpha in (1.0, 0.5):
    r = sb.residual_alpha_time_pde(f, alpha, 1.0, 0.0)
    print(f"alpha-time PDE a={alpha}  :", f"{r.max_rel_residual:.2e}")

# %%
# A wrong candidate is rejected: the plain heat solution in the Caputo equation.

wrong = lambda spec, t, x: spec.apply(t, x)
print("planted heat solution :", f"{sb.residual_fractional(f, 0.5, 1.0, 0.0, solution=wrong).max_rel_residual:.2e}")
