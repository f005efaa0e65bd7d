"""
Two clocks, one solution
========================

Running a heat semigroup on the clock |B_t| (Brownian time) or on the inverse
of a 1/2-stable subordinator gives the same function u(t, x). Here we check
that numerically, and compare both against the Mittag-Leffler closed form.
"""

# %%
# Eigenfunction data
# ------------------
# For f = cos(kx) the semigroup acts by a scalar, T(s) f = exp(lam s) f, so
# the fractional solution is f(x) E_beta(lam t^beta).

import math

import numpy as np

import subordination as sb

f = sb.Eigenfunction(lam=-1.0)
t = np.array([0.1, 1.0, 10.0])

u_bt = sb.solve_brownian_time(f, t, 0.0).value
u_fr = sb.solve_fractional_subordination(f, 0.5, t, 0.0).value
u_ml = np.array([sb.mittag_leffler(0.5, -math.sqrt(s)) for s in t])

print(" t      Brownian time      inverse stable      Mittag-Leffler")
for row in zip(t, u_bt, u_fr, u_ml):
    print("{:5.1f}  {:.15f}  {:.15f}  {:.15f}".format(*row))

# %%
# At t = 1 both equal e erfc(1).

print("e*erfc(1) =", math.e * math.erfc(1.0))

# %%
# General data
# ------------
# The same agreement holds for data that is not an eigenfunction. The heat
# kernel variant evaluates T(s) f spectrally on a periodic grid.

grid = sb.SpatialGrid(-8 * math.pi, 8 * math.pi, 256)
g = sb.HeatKernel.from_function(lambda x: np.exp(-np.sin(x / 4) ** 2), grid)
for x in (0.0, 1.0):
    a = sb.solve_brownian_time(g, t, x).value
    b = sb.solve_fractional_subordination(g, 0.5, t, x).value
    print(f"x={x}: max |difference| = {np.max(np.abs(a - b)):.2e}")

# %%
# Other indices
# -------------
# For beta != 1/2 there is no Brownian-time counterpart, but the Mittag-Leffler
# oracle still applies.

for beta in (1 / 3, 2 / 3, 0.9):
    u = sb.solve_fractional_subordination(sb.Eigenfunction(lam=-4.0), beta, 2.0, 0.0).value
    print(f"beta={beta:.3f}: u={u:.12f}  E_beta={sb.mittag_leffler(beta, -4.0 * 2.0**beta):.12f}")
