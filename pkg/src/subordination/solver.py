"""Solution formulas as quadratures over the random clock.

Each solver returns ``u(t, x) = E[T(tau_t) f (x)]`` for a different clock ``tau_t``:

* :func:`solve_fractional_subordination` -- ``tau_t = E_t``, the first passage
  time of a beta-stable subordinator (fractional Cauchy problem).
* :func:`solve_brownian_time` -- ``tau_t = |Y_t|`` for Brownian ``Y`` with
  variance ``2 t`` (the Gaussian weight ``exp(-s^2 / 4t)``).
* :func:`solve_alpha_time` -- ``tau_t = |S_t|`` for symmetric alpha-stable ``S``.

``t`` may be a scalar or an array; an array is integrated in one adaptive pass
with shared nodes, so the result is a smooth function of ``t`` (useful for
finite differences in time).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import integrate
from scipy.special import erfcinv, gamma

from .density import (
    StableDensityParams,
    inverse_subordinator_density,
    stable_subordinator_density,
    symmetric_stable_density,
)
from .errors import DomainError, EvaluationError, ParameterError

__all__ = [
    "QuadratureConfig",
    "SolutionValue",
    "solve_fractional_subordination",
    "solve_brownian_time",
    "solve_alpha_time",
]

# below this clock value the semigroup is replaced by the identity
_T_ZERO = 1e-14


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances for the clock integrals on ``(0, inf)``.

    The clock law is truncated so that at most ``1 - truncation_quantile`` of
    its mass is dropped; that must not exceed ``abs_tol``.
    """

    rel_tol: float = 1e-11
    abs_tol: float = 1e-13
    max_subdivisions: int = 2000
    truncation_quantile: float = 1.0 - 1e-14

    def __post_init__(self):
        if not self.rel_tol >= 1e-12:
            raise ParameterError("rel_tol must be at least 1e-12")
        if not self.abs_tol > 0:
            raise ParameterError("abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise ParameterError("max_subdivisions must be positive")
        if not 0.0 < self.truncation_quantile < 1.0:
            raise ParameterError("truncation_quantile must lie in (0, 1)")
        if 1.0 - self.truncation_quantile > self.abs_tol:
            raise ParameterError("the truncated clock mass 1 - truncation_quantile exceeds abs_tol")

    @property
    def tail_mass(self) -> float:
        return 1.0 - self.truncation_quantile


@dataclass(frozen=True)
class SolutionValue:
    value: Union[float, complex, np.ndarray]
    est_error: float
    nodes_used: int


def _times(t):
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if t_arr.ndim != 1 or np.any(~(t_arr > 0)) or np.any(~np.isfinite(t_arr)):
        raise DomainError("t must be positive and finite")
    return t_arr, np.ndim(t) == 0


def _integrate(fn, a, b, q: QuadratureConfig, scalar, what):
    res, err, info = integrate.quad_vec(
        fn,
        a,
        b,
        epsabs=q.abs_tol,
        epsrel=q.rel_tol,
        norm="max",
        limit=q.max_subdivisions,
        full_output=True,
    )
    if info.status != 0 or not np.all(np.isfinite(res)):
        raise EvaluationError(
            f"{what}: adaptive quadrature did not converge "
            f"(status={info.status}, evaluations={info.neval}, intervals={len(info.intervals)}, "
            f"error estimate={err:.3g}); loosen QuadratureConfig or raise max_subdivisions"
        )
    value = res[0] if scalar else res
    if scalar and np.ndim(value) == 0:
        value = complex(value) if np.iscomplexobj(value) else float(value)
    return SolutionValue(value, float(err) + q.tail_mass * _data_bound(fn), int(info.neval))


def _data_bound(fn):
    return getattr(fn, "sup_norm", 1.0)


def _semigroup(spec, tau, x):
    tau = np.where(tau < _T_ZERO, 0.0, tau)
    return spec.apply(tau, x)


def _log_lower_cut(weight_in_y, tail_mass, start=0.0, step=0.25):
    """Scan left from ``start`` until the log-scale weight is negligible."""
    y = start
    for _ in range(4000):
        if weight_in_y(y) < 1e-3 * tail_mass:
            return y
        y -= step
    raise EvaluationError("could not locate the lower truncation point of the clock law")


def _subordinator_lower_cut(beta, tail_mass, params):
    return _log_lower_cut(lambda y: math.exp(y) * stable_subordinator_density(beta, math.exp(y), params), tail_mass)


def solve_fractional_subordination(
    spec,
    beta: float,
    t,
    x: float,
    q: QuadratureConfig = QuadratureConfig(),
    form: str = "subordinator",
    density_params: StableDensityParams = None,
) -> SolutionValue:
    """``u(t, x) = int_0^inf T((t/s)^beta) f (x) g_beta(s) ds``.

    ``form="hitting_time"`` evaluates the equivalent change of variables
    ``(t/beta) int_0^inf T(r) f (x) g_beta(t r^(-1/beta)) r^(-1/beta - 1) dr``,
    i.e. the expectation against the density of ``E_t``. Both forms run on a
    logarithmic variable so the algebraic tail of ``g_beta`` decays exponentially.
    """
    if not 0.0 < beta < 1.0:
        raise ParameterError(f"beta must lie in (0, 1), got {beta}")
    t_arr, scalar = _times(t)
    params = density_params or StableDensityParams.default(beta)
    tail = q.tail_mass
    y_lo = _subordinator_lower_cut(beta, tail, params)

    if form == "subordinator":
        # P[D_1 > s] ~ s^(-beta) / Gamma(1 - beta)
        y_hi = -math.log(tail * gamma(1.0 - beta)) / beta

        def integrand(y):
            s = math.exp(y)
            w = s * stable_subordinator_density(beta, s, params)
            return _semigroup(spec, (t_arr / s) ** beta, x) * w

    elif form == "hitting_time":
        # E_t has density t^(-beta)/Gamma(1 - beta) at 0+ and P[E_t > r] = P[D_1 < t r^(-1/beta)]
        y_lo, y_hi = (
            math.log(tail * gamma(1.0 - beta) * t_arr.min() ** beta),
            math.log(t_arr.max() ** beta) - beta * y_lo,
        )

        def integrand(y):
            r = math.exp(y)
            w = r * inverse_subordinator_density(beta, 1.0, r * t_arr ** (-beta), params) * t_arr ** (-beta)
            return _semigroup(spec, np.full_like(t_arr, r), x) * w

    else:
        raise ParameterError(f"unknown form {form!r}; expected 'subordinator' or 'hitting_time'")

    integrand.sup_norm = getattr(spec, "sup_norm", 1.0)
    return _integrate(integrand, y_lo, y_hi, q, scalar, "fractional subordination")


def solve_brownian_time(spec, t, x: float, q: QuadratureConfig = QuadratureConfig()) -> SolutionValue:
    """``u(t, x) = (4 pi t)^(-1/2) * 2 int_0^inf T(s) f (x) exp(-s^2 / 4t) ds``.

    Integrated in ``v = s / (2 sqrt(t))`` against the half-normal weight
    ``(2 / sqrt(pi)) exp(-v^2)``.
    """
    t_arr, scalar = _times(t)
    v_max = float(erfcinv(q.tail_mass))
    scale = 2.0 * np.sqrt(t_arr)

    def integrand(v):
        return _semigroup(spec, scale * v, x) * (2.0 / math.sqrt(math.pi)) * math.exp(-v * v)

    integrand.sup_norm = getattr(spec, "sup_norm", 1.0)
    return _integrate(integrand, 0.0, v_max, q, scalar, "Brownian-time")


def _stable_tail_constant(alpha):
    # P[S_1 > v] ~ Gamma(alpha) sin(pi alpha / 2) / pi * v^(-alpha)
    return gamma(alpha) * math.sin(math.pi * alpha / 2.0) / math.pi


def solve_alpha_time(spec, alpha: float, t, x: float, q: QuadratureConfig = QuadratureConfig()) -> SolutionValue:
    """``u(t, x) = int_0^inf T(s) f (x) 2 p_t(0, s) ds`` with ``p_t`` the symmetric alpha-stable kernel.

    Scaling ``s = t^(1/alpha) v`` makes the weight ``2 p_1(0, v)`` independent of
    ``t``. ``alpha = 2`` is accepted and uses the Gaussian kernel, so it
    coincides with :func:`solve_brownian_time`.
    """
    if not 0.0 < alpha <= 2.0:
        raise ParameterError(f"alpha must lie in (0, 2], got {alpha}")
    t_arr, scalar = _times(t)
    tail = q.tail_mass
    p0 = symmetric_stable_density(alpha, 1.0, 0.0)
    y_lo = math.log(tail / (2.0 * p0))
    if alpha == 2.0:
        y_hi = math.log(2.0 * float(erfcinv(tail)))
    else:
        y_hi = math.log(2.0 * _stable_tail_constant(alpha) / tail) / alpha
    clock_scale = t_arr ** (1.0 / alpha)

    def integrand(y):
        v = math.exp(y)
        w = 2.0 * v * symmetric_stable_density(alpha, 1.0, v)
        return _semigroup(spec, clock_scale * v, x) * w

    integrand.sup_norm = getattr(spec, "sup_norm", 1.0)
    return _integrate(integrand, y_lo, y_hi, q, scalar, "alpha-time")
