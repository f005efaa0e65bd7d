"""Markov semigroups ``T(s)`` and generators ``L`` on the real line.

Three representatives:

* :class:`Eigenfunction` -- data ``f`` with ``L f = lam f`` exactly, so
  ``T(s) f = exp(lam s) f``.
* :class:`HeatKernel` -- ``L = Δ`` acting on gridded data (periodic extension).
* :class:`FourierMultiplier` -- ``L`` with symbol ``-|xi|^alpha_sym`` on gridded data.

Every semigroup exposes :meth:`apply`, :meth:`generator_power`, :meth:`initial`
and :meth:`power`; the last returns the same semigroup with data ``L^j f``,
which is how ``L^j u(t, .)`` is formed for any solution built from ``T``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import AccuracyError, DomainError, GridError, ParameterError

__all__ = [
    "SpatialGrid",
    "Eigenfunction",
    "HeatKernel",
    "FourierMultiplier",
    "apply_semigroup",
    "apply_generator_power",
]

_PROFILES = {
    "cos": np.cos,
    "sin": np.sin,
    "complex_exponential": lambda y: np.exp(1j * y),
}


def _check_time(s):
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise DomainError("semigroup time must be non-negative")
    return s


@dataclass(frozen=True)
class Eigenfunction:
    """``f(x) = amplitude * profile(k x)`` with ``L f = lam f``.

    With the heat generator ``L = Δ`` (``alpha_sym = 2``) the eigenvalue is
    ``-k^2``; under a Fourier multiplier it is ``-|k|^alpha_sym``. Give either
    ``lam`` or ``k``; the other is derived. ``lam = 0`` gives constant data for
    the ``cos`` profile.
    """

    lam: Optional[float] = None
    k: Optional[float] = None
    profile: str = "cos"
    alpha_sym: float = 2.0
    amplitude: complex = 1.0

    def __post_init__(self):
        if self.profile not in _PROFILES:
            raise ParameterError(f"unknown profile {self.profile!r}; expected one of {tuple(_PROFILES)}")
        if not 0.0 < self.alpha_sym <= 2.0:
            raise ParameterError(f"alpha_sym must lie in (0, 2], got {self.alpha_sym}")
        if self.lam is None and self.k is None:
            raise ParameterError("give lam or k")
        if self.lam is not None and self.lam > 0:
            raise ParameterError(f"eigenvalue must be non-positive, got {self.lam}")
        k = (-self.lam) ** (1.0 / self.alpha_sym) if self.k is None else float(self.k)
        lam = -abs(k) ** self.alpha_sym
        if self.lam is not None and not math.isclose(lam, self.lam, rel_tol=1e-12, abs_tol=1e-300):
            raise ParameterError(f"lam={self.lam} is not -|k|^alpha_sym for k={k}")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "lam", float(lam if self.lam is None else self.lam))

    def initial(self, x):
        return self.amplitude * _PROFILES[self.profile](self.k * np.asarray(x, dtype=float))

    def apply(self, s, x):
        s = _check_time(s)
        return np.exp(self.lam * s) * self.initial(x)

    def generator_power(self, j, x):
        return self.lam**j * self.initial(x)

    def power(self, j) -> "Eigenfunction":
        return Eigenfunction(self.lam, self.k, self.profile, self.alpha_sym, self.amplitude * self.lam**j)

    @property
    def sup_norm(self) -> float:
        return abs(self.amplitude)


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform periodic grid on ``[x_min, x_max)``."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise GridError("x_min must be below x_max")
        if self.n_points < 16:
            raise GridError("a spatial grid needs at least 16 points")

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def nodes(self) -> np.ndarray:
        return self.x_min + self.length * np.arange(self.n_points) / self.n_points

    @property
    def wavenumbers(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.length / self.n_points)


@dataclass(frozen=True)
class FourierMultiplier:
    """Semigroup with symbol ``exp(-s |xi|^alpha_sym)`` acting on gridded data.

    Data are sampled on a :class:`SpatialGrid` and extended periodically; the
    semigroup and generator act exactly on the resulting trigonometric
    interpolant. Modes with negligible amplitude are dropped, so evaluation
    costs one short sum per point.
    """

    grid: SpatialGrid
    values: np.ndarray
    alpha_sym: float = 2.0
    _coeffs: np.ndarray = field(init=False, repr=False, compare=False)
    _xi: np.ndarray = field(init=False, repr=False, compare=False)
    _all_coeffs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0.0 < self.alpha_sym <= 2.0:
            raise ParameterError(f"alpha_sym must lie in (0, 2], got {self.alpha_sym}")
        values = np.asarray(self.values)
        if values.shape != (self.grid.n_points,):
            raise GridError("initial data must have one value per grid point")
        if not np.all(np.isfinite(values)):
            raise ParameterError("initial data must be finite")
        object.__setattr__(self, "values", values)
        coeffs = np.fft.fft(values) / values.size
        xi = self.grid.wavenumbers
        keep = np.abs(coeffs) > 1e-16 * max(np.abs(coeffs).max(), 1e-300)
        object.__setattr__(self, "_coeffs", coeffs[keep])
        object.__setattr__(self, "_xi", xi[keep])
        object.__setattr__(self, "_all_coeffs", coeffs)

    @classmethod
    def from_function(cls, f: Callable, grid: SpatialGrid, alpha_sym: float = 2.0):
        return cls(grid, f(grid.nodes), alpha_sym)

    @property
    def symbol(self) -> np.ndarray:
        return np.abs(self._xi) ** self.alpha_sym

    @property
    def _real(self) -> bool:
        return np.isrealobj(self.values)

    def _evaluate(self, weights, x):
        x = np.asarray(x, dtype=float)
        phase = np.exp(1j * np.multiply.outer(x - self.grid.x_min, self._xi))
        out = phase @ weights if weights.ndim == 1 else np.einsum("...k,xk->...x", weights, phase)
        return out.real if self._real else out

    def initial(self, x):
        return self._evaluate(self._coeffs, x)

    def apply(self, s, x):
        """``T(s) f (x)``; ``s`` may be an array, giving an array of the same shape."""
        s = _check_time(s)
        if np.ndim(x) == 0:
            phase = np.exp(1j * (float(x) - self.grid.x_min) * self._xi) * self._coeffs
            decay = np.exp(-np.multiply.outer(s, self.symbol))
            out = decay @ phase
            return out.real if self._real else out
        return self._evaluate(np.exp(-np.multiply.outer(s, self.symbol)) * self._coeffs, x)

    def _check_resolution(self, j):
        # energy of L^j f carried by the top third of the band must be negligible
        xi = self.grid.wavenumbers
        weighted = np.abs(self._all_coeffs) * np.abs(xi) ** (self.alpha_sym * j)
        band = np.abs(xi) > (2.0 / 3.0) * np.abs(xi).max()
        total = weighted.sum()
        if total > 0 and weighted[band].sum() > 1e-8 * total:
            raise AccuracyError(
                f"L^{j} f is not resolved on {self.grid.n_points} points: "
                f"{weighted[band].sum() / total:.2e} of its spectral weight sits in the top third of the band"
            )

    def generator_power(self, j, x):
        if j < 1:
            raise ParameterError("generator power must be a positive integer")
        self._check_resolution(j)
        return self._evaluate((-self.symbol) ** j * self._coeffs, x)

    def power(self, j) -> "FourierMultiplier":
        if j == 0:
            return self
        self._check_resolution(j)
        xi = self.grid.wavenumbers
        values = np.fft.ifft((-(np.abs(xi) ** self.alpha_sym)) ** j * np.fft.fft(self.values))
        return type(self)(self.grid, values.real if self._real else values, self.alpha_sym)

    @property
    def sup_norm(self) -> float:
        return float(np.abs(self.values).max())


@dataclass(frozen=True)
class HeatKernel(FourierMultiplier):
    """``L = Δ``: ``T(s) f`` is ``f`` convolved with ``(4 pi s)^(-1/2) exp(-y^2 / 4 s)``.

    The convolution is taken against the periodic extension of the data and
    evaluated spectrally; :meth:`convolve` evaluates it directly in space as
    an independent check.
    """

    alpha_sym: float = field(default=2.0)

    def __post_init__(self):
        if self.alpha_sym != 2.0:
            raise ParameterError("the heat semigroup has alpha_sym = 2")
        super().__post_init__()

    @classmethod
    def from_function(cls, f: Callable, grid: SpatialGrid, alpha_sym: float = 2.0):
        return cls(grid, f(grid.nodes))

    def power(self, j) -> "HeatKernel":
        out = super().power(j)
        return HeatKernel(out.grid, out.values)

    def convolve(self, s: float, x: float, n_images: Optional[int] = None) -> float:
        """Real-space Gaussian convolution over periodic images of the data."""
        if s < 0:
            raise DomainError("semigroup time must be non-negative")
        if s == 0:
            return complex(self.initial(x)) if not self._real else float(self.initial(x))
        h = self.grid.length / self.grid.n_points
        if n_images is None:
            n_images = int(math.ceil(12.0 * math.sqrt(s) / self.grid.length)) + 1
        shifts = self.grid.length * np.arange(-n_images, n_images + 1)
        y = (self.grid.nodes[None, :] + shifts[:, None]).ravel()
        kernel = np.exp(-((x - y) ** 2) / (4.0 * s)) / math.sqrt(4.0 * math.pi * s)
        return h * kernel @ np.tile(self.values, shifts.size)


def apply_semigroup(spec, s, x):
    """``T(s) f (x)`` for any semigroup representative."""
    return spec.apply(s, x)


def apply_generator_power(spec, j: int, x):
    """``L^j f (x)``."""
    if int(j) != j or j < 1:
        raise ParameterError(f"generator power must be a positive integer, got {j}")
    return spec.generator_power(int(j), x)
