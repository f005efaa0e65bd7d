"""
Densities of the random clocks
==============================

The stable subordinator D_t, its inverse E_t and the symmetric stable law
all have densities that are only available through series, contour
integrals or oscillatory quadrature. This script evaluates them and checks
their Laplace transforms and total mass.
"""

# %%
import math

import numpy as np

import subordination as sb

# %%
# One-sided stable density g_beta
# -------------------------------
# For beta = 1/2 this is the Levy density u^(-3/2) exp(-1/(4u)) / (2 sqrt(pi)).

u = np.array([0.05, 0.2, 1.0, 5.0])
levy = np.exp(-1 / (4 * u)) / (2 * math.sqrt(math.pi) * u**1.5)
print("g_1/2      :", sb.stable_subordinator_density(0.5, u))
print("Levy form  :", levy)

# %%
# Its Laplace transform is exp(-s^beta).

for beta in (1 / 3, 0.5, 2 / 3, 0.9):
    lt = sb.laplace_transform_of_density(lambda v: sb.stable_subordinator_density(beta, v), 1.0)
    mass = sb.integrate_density(lambda v: sb.stable_subordinator_density(beta, v))
    print(f"beta={beta:.3f}: LT(1)={lt:.10f} (exp(-1)={math.exp(-1):.10f}), mass={mass:.10f}")

# %%
# Inverse subordinator
# --------------------
# E_t = (t / D_1)^beta, so its density is a change of variables of g_beta.
# For beta = 1/2 it is the half-normal law of |B_t| with Var B_t = 2t.

x = np.linspace(0.25, 3.0, 4)
print("f_E (beta=1/2):", sb.inverse_subordinator_density(0.5, 1.0, x))
print("half-normal   :", np.exp(-x * x / 4) / math.sqrt(math.pi))
mass = sb.integrate_density(lambda v: sb.inverse_subordinator_density(1 / 3, 1.0, v))
print("f_E mass (beta=1/3):", mass)

# %%
# Symmetric stable kernel
# -----------------------
# alpha=1 is Cauchy, alpha=2 is Gaussian with variance 2t; other values come
# from the Fourier integral.

for alpha in (0.5, 1.0, 1.5, 2.0):
    print(f"p_1^{alpha}(0) = {sb.symmetric_stable_density(alpha, 1.0, 0.0):.10f}",
          f"(Gamma(1+1/alpha)/pi = {math.gamma(1 + 1 / alpha) / math.pi:.10f})")
