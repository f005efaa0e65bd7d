"""Densities and special functions.

* ``stable_subordinator_density``: the density ``g_beta`` of ``D_1``, whose
  Laplace transform is ``exp(-s^beta)``.
* ``inverse_subordinator_density``: the density of the first passage time ``E_t``.
* ``symmetric_stable_density``: the kernel ``p_t(0, s)`` with Fourier transform
  ``exp(-t |xi|^alpha)``.
* ``mittag_leffler``: ``E_beta(z) = sum_k z^k / Gamma(beta k + 1)`` for real ``z``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from .errors import DomainError, EvaluationError, ParameterError, RangeError

__all__ = [
    "StableDensityParams",
    "MittagLefflerParams",
    "talbot_inverse",
    "stable_subordinator_density",
    "inverse_subordinator_density",
    "symmetric_stable_density",
    "mittag_leffler",
]

_EPS = np.finfo(float).eps
_LOG_TINY = math.log(np.finfo(float).tiny)

# Trefethen-Weideman-Schmelzer optimized Talbot contour
# z(theta) = mu * (A + B theta cot(C theta) + i D theta), theta in (-pi, pi)
_TALBOT_A, _TALBOT_B, _TALBOT_C, _TALBOT_D = -0.6122, 0.5017, 0.6407, 0.2645
_TALBOT_RIGHT = _TALBOT_A + _TALBOT_B / _TALBOT_C  # real-axis crossing, in units of mu


def talbot_inverse(
    laplace: Callable[[np.ndarray], np.ndarray],
    u,
    n_nodes: int = 64,
    scale=None,
) -> np.ndarray:
    """Invert a Laplace transform on a Talbot contour by the trapezoidal rule.

    ``laplace`` must accept complex arrays and be analytic off the negative
    real axis. ``scale`` sets the contour size ``mu`` for each ``u``; by default
    ``mu = n_nodes / (2 u)``, which keeps roundoff growth below ``exp(0.09 n)``.
    """
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0):
        raise DomainError("Laplace inversion needs positive abscissae")
    mu = 0.5 * n_nodes / u if scale is None else np.broadcast_to(np.asarray(scale, float), u.shape)
    theta = -np.pi + (np.arange(n_nodes) + 0.5) * (2.0 * np.pi / n_nodes)
    ct = _TALBOT_C * theta
    w = _TALBOT_A + _TALBOT_B * theta / np.tan(ct) + 1j * _TALBOT_D * theta
    dw = _TALBOT_B * (1.0 / np.tan(ct) - ct / np.sin(ct) ** 2) + 1j * _TALBOT_D
    z = mu[..., None] * w
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        terms = np.exp(z * u[..., None]) * laplace(z) * (mu[..., None] * dw)
    terms = np.where(np.isfinite(terms), terms, 0.0)
    return (terms.sum(axis=-1) / (1j * n_nodes)).real


# -- stable subordinator density ------------------------------------------------

_DENSITY_METHODS = ("series", "closed_form_half", "laplace_inversion")


def _default_crossover(beta):
    return 1.0 if beta <= 0.7 else 2.0


@dataclass(frozen=True)
class StableDensityParams:
    """How to evaluate ``g_beta``.

    ``series`` uses the convergent power series in ``u^(-beta)`` for
    ``u >= crossover_t`` and Talbot inversion of ``exp(-s^beta)`` below it
    (Zolotarev's integral instead when ``beta > 0.85``);
    ``laplace_inversion`` uses Talbot everywhere; ``closed_form_half`` is the
    Levy density and needs ``beta == 1/2``.
    """

    beta: float
    method: str = "series"
    series_terms: int = 400
    crossover_t: Optional[float] = None
    talbot_nodes: int = 64

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ParameterError(f"beta must lie in (0, 1), got {self.beta}")
        if self.method not in _DENSITY_METHODS:
            raise ParameterError(f"unknown method {self.method!r}; expected one of {_DENSITY_METHODS}")
        if self.method == "closed_form_half" and self.beta != 0.5:
            raise ParameterError("closed_form_half is only valid for beta = 1/2")
        if self.series_terms < 10:
            raise ParameterError("series_terms must be at least 10")
        if self.crossover_t is None:
            object.__setattr__(self, "crossover_t", _default_crossover(self.beta))
        if not self.crossover_t > 0:
            raise ParameterError("crossover_t must be positive")

    @classmethod
    def default(cls, beta: float) -> "StableDensityParams":
        return cls(beta, "closed_form_half" if beta == 0.5 else "series")


def _levy_density(u):
    return u ** -1.5 * np.exp(-0.25 / u) / (2.0 * math.sqrt(math.pi))


def _subordinator_series(beta, u, n_terms):
    k = np.arange(1, n_terms + 1)
    logu = np.log(u)[..., None]
    logmag = gammaln(k * beta + 1) - gammaln(k + 1) - (k * beta + 1) * logu
    sign = np.where(k % 2 == 1, 1.0, -1.0) * np.sin(k * np.pi * beta)
    terms = sign * np.exp(logmag)
    total = terms.sum(axis=-1) / np.pi
    # convergence: the tail beyond n_terms must be negligible
    last = np.exp(logmag[..., -1]) / np.pi
    if np.any(last > 1e-15 * np.abs(total) + 1e-300):
        raise EvaluationError(
            f"g_beta series did not converge within {n_terms} terms (beta={beta}, min u={u.min():.3g}); "
            "raise crossover_t or series_terms"
        )
    return total


def _subordinator_talbot(beta, u, n_nodes):
    # place the contour through the saddle of z u - z^beta when it lies far right
    # overflow at tiny u only hits entries masked out by `alive`
    with np.errstate(over="ignore", invalid="ignore"):
        saddle = (beta / u) ** (1.0 / (1.0 - beta))
        mu = np.maximum(0.5 * n_nodes / u, saddle / _TALBOT_RIGHT)
        # density below the underflow threshold: exponent at the saddle
        alive = saddle * u * (1.0 - 1.0 / beta) > _LOG_TINY
    out = np.zeros_like(u)
    if np.any(alive):
        out[alive] = talbot_inverse(lambda z: np.exp(-(z**beta)), u[alive], n_nodes, mu[alive])
    return np.maximum(out, 0.0)


# above this index the 64-node Talbot contour loses accuracy near the narrow mode
_TALBOT_MAX_BETA = 0.85


def _log_kanter_a(beta, phi):
    r = math.sin(beta * phi) / math.sin(phi)
    return math.log(r) / (1.0 - beta) + math.log(math.sin((1.0 - beta) * phi) / math.sin(beta * phi))


def _subordinator_zolotarev(beta, u):
    """``g_beta`` from P[D_1 <= u] = (1/pi) int_0^pi exp(-A(phi) u^(-beta/(1-beta))) dphi.

    The integrand is positive on a finite interval, so there is no cancellation
    as beta -> 1, where the density concentrates near its mode.
    """
    out = np.empty_like(u)
    log_cap = math.log(745.0)
    for i, x in enumerate(u):
        log_c = -beta / (1.0 - beta) * math.log(x)

        def f(phi):
            la = _log_kanter_a(beta, phi) + log_c
            if la > log_cap:
                return 0.0
            a = math.exp(la)
            return a * math.exp(-a)

        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, _ = integrate.quad(f, 0.0, math.pi, epsabs=0.0, epsrel=1e-13, limit=200)
        out[i] = beta / ((1.0 - beta) * math.pi * x) * val
    return out


def stable_subordinator_density(beta: float, u, params: Optional[StableDensityParams] = None):
    """Density ``g_beta(u)`` of ``D_1`` with ``int exp(-s u) g_beta(u) du = exp(-s^beta)``."""
    if params is None:
        params = StableDensityParams.default(beta)
    elif params.beta != beta:
        raise ParameterError("params.beta does not match beta")
    scalar = np.ndim(u) == 0
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if np.any(~(u > 0)):
        raise DomainError("g_beta is evaluated on u > 0 only")

    if params.method == "closed_form_half":
        out = _levy_density(u)
    elif params.method == "laplace_inversion":
        out = _subordinator_talbot(beta, u, params.talbot_nodes)
    else:
        out = np.empty_like(u)
        big = u >= params.crossover_t
        if np.any(big):
            out[big] = _subordinator_series(beta, u[big], params.series_terms)
        if np.any(~big):
            if beta <= _TALBOT_MAX_BETA:
                out[~big] = _subordinator_talbot(beta, u[~big], params.talbot_nodes)
            else:
                out[~big] = _subordinator_zolotarev(beta, u[~big])
    return float(out[0]) if scalar else out


def inverse_subordinator_density(beta: float, t: float, x, params: Optional[StableDensityParams] = None):
    """Density of ``E_t``: ``(t / beta) x^(-1 - 1/beta) g_beta(t x^(-1/beta))``."""
    if not 0.0 < beta < 1.0:
        raise ParameterError(f"beta must lie in (0, 1), got {beta}")
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(~(x > 0)):
        raise DomainError("the first passage density is evaluated on x > 0 only")
    u = t * x ** (-1.0 / beta)
    out = np.zeros_like(x)
    # u underflows only where g_beta(u) is far below the smallest double
    live = u > 0
    if np.any(live):
        g = stable_subordinator_density(beta, u[live], params)
        out[live] = (t / beta) * x[live] ** (-1.0 - 1.0 / beta) * g
    return float(out[0]) if scalar else out


# -- symmetric stable kernel ----------------------------------------------------

_TAIL_SERIES_FROM = 20.0


def _stable_tail_series(alpha, x, max_terms=200):
    """Tail expansion of the standard symmetric stable density at ``|x|``.

    Convergent for alpha < 1, asymptotic for alpha > 1; returns ``None`` when
    the smallest term is not negligible.
    """
    k = np.arange(1, max_terms + 1)
    logmag = gammaln(alpha * k + 1) - gammaln(k + 1) - (alpha * k + 1) * math.log(x)
    mag = np.exp(logmag)
    stop = int(np.argmin(mag)) if alpha > 1 else max_terms - 1
    sign = np.where(k % 2 == 1, 1.0, -1.0) * np.sin(k * np.pi * alpha / 2)
    total = float(np.sum((sign * mag)[: stop + 1])) / np.pi
    if mag[stop] / np.pi > 1e-15 * abs(total):
        return None
    return total


def _stable_fourier(alpha, x, cutoff):
    xi_max = (-math.log(cutoff)) ** (1.0 / alpha)
    f = lambda xi: math.exp(-(xi**alpha))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        if x == 0.0:
            val, _ = integrate.quad(f, 0.0, xi_max, epsabs=1e-15, epsrel=1e-13, limit=500)
        else:
            val, _ = integrate.quad(f, 0.0, xi_max, weight="cos", wvar=x, epsabs=1e-15, epsrel=1e-13, limit=500)
    return val / math.pi


def _standard_stable_density(alpha, x, cutoff=1e-12, tail_series=True):
    x = abs(x)
    if tail_series and x >= _TAIL_SERIES_FROM:
        val = _stable_tail_series(alpha, x)
        if val is not None:
            return val
    return _stable_fourier(alpha, x, cutoff)


def symmetric_stable_density(
    alpha: float, t: float, s, *, cutoff: float = 1e-12, tail_series: bool = True, closed_form: bool = True
):
    """Kernel ``p_t(0, s) = (1/pi) int_0^inf cos(s xi) exp(-t xi^alpha) d xi``.

    Closed forms at ``alpha = 1`` (Cauchy) and ``alpha = 2`` (Gaussian with
    variance ``2 t``); otherwise Fourier quadrature truncated where
    ``exp(-t xi^alpha) < cutoff``, with the tail expansion in ``|s|^(-alpha k - 1)``
    used far out when it resolves the value to machine precision.
    ``closed_form=False`` forces the quadrature at ``alpha`` in ``{1, 2}`` too.
    """
    if not (0.0 < alpha <= 2.0):
        raise ParameterError(f"alpha must lie in (0, 2], got {alpha}")
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    scalar = np.ndim(s) == 0
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if closed_form and alpha == 1.0:
        out = t / (math.pi * (t * t + s * s))
    elif closed_form and alpha == 2.0:
        out = np.exp(-s * s / (4.0 * t)) / math.sqrt(4.0 * math.pi * t)
    else:
        scale = t ** (-1.0 / alpha)
        out = scale * np.array([_standard_stable_density(alpha, v * scale, cutoff, tail_series) for v in s])
    return float(out[0]) if scalar else out


# -- Mittag-Leffler -----------------------------------------------------------------


@dataclass(frozen=True)
class MittagLefflerParams:
    """Evaluation controls for :func:`mittag_leffler`.

    For ``z <= 0`` the power series is summed when ``|z| <= asymptotic_threshold``;
    beyond it the completely monotone integral representation is used.
    """

    beta: float
    series_terms: int = 500
    asymptotic_threshold: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.beta <= 1.0:
            raise ParameterError(f"beta must lie in (0, 1], got {self.beta}")
        if self.series_terms < 20:
            raise ParameterError("series_terms must be at least 20")
        if not self.asymptotic_threshold > 0:
            raise ParameterError("asymptotic_threshold must be positive")


def _ml_series(beta, z, n_terms, max_terms=50000):
    if z == 0.0:
        return 1.0
    while True:
        k = np.arange(n_terms)
        logmag = k * math.log(abs(z)) - gammaln(beta * k + 1)
        mag = np.exp(logmag)
        sign = np.where(k % 2 == 1, -1.0, 1.0) if z < 0 else 1.0
        total = float(np.sum(sign * mag))
        if mag[-1] <= 1e-17 * abs(total):
            return total
        if n_terms >= max_terms:
            raise EvaluationError(f"Mittag-Leffler series did not converge in {n_terms} terms at z={z}")
        n_terms = min(2 * n_terms, max_terms)


def _ml_negative_integral(beta, x):
    # E_beta(-x) = int_0^inf exp(-r x^(1/beta)) K(r) dr, substituted r = exp(y)
    c = x ** (1.0 / beta)
    sb, cb = math.sin(beta * math.pi), math.cos(beta * math.pi)

    def integrand(y):
        rb = math.exp(beta * y)
        arg = c * math.exp(y)
        if arg > 745.0:
            return 0.0
        return math.exp(-arg) * rb * sb / (math.pi * (rb * rb + 2.0 * rb * cb + 1.0))

    y_hi = math.log(800.0 / c)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(integrand, -np.inf, y_hi, epsabs=1e-16, epsrel=1e-13, limit=400)
    if not np.isfinite(val) or err > 1e-9:
        raise EvaluationError(f"Mittag-Leffler integral failed at z={-x}: error estimate {err:g}")
    return val


def _ml_scalar(p, z):
    if z > 0 and z ** (1.0 / p.beta) > 700.0:
        raise RangeError(f"E_{p.beta}({z}) overflows a double")
    if p.beta == 1.0:
        return math.exp(z)
    if z > 0:
        n_terms = max(p.series_terms, int(3.0 * z ** (1.0 / p.beta) / p.beta) + 50)
        return _ml_series(p.beta, z, n_terms)
    if -z <= p.asymptotic_threshold:
        return _ml_series(p.beta, z, p.series_terms)
    return _ml_negative_integral(p.beta, -z)


def mittag_leffler(beta: float, z, params: Optional[MittagLefflerParams] = None):
    """One-parameter Mittag-Leffler function ``E_beta(z)`` for real ``z``."""
    if params is None:
        params = MittagLefflerParams(beta)
    elif params.beta != beta:
        raise ParameterError("params.beta does not match beta")
    if np.ndim(z) == 0:
        return _ml_scalar(params, float(z))
    z = np.asarray(z, dtype=float)
    return np.array([_ml_scalar(params, v) for v in z.ravel()]).reshape(z.shape)
