"""Random variates and sample paths for Brownian, stable and subordinated processes.

Conventions used throughout the package:

* Brownian motion has generator ``L = Δ``, so ``Var(X_t) = 2 t``.
* A symmetric alpha-stable variable ``S_t`` has characteristic function
  ``exp(-t |xi|^alpha)``; at ``alpha = 2`` this is the Brownian law above.
* A beta-stable subordinator ``D_t`` has Laplace transform ``exp(-t s^beta)``.

Every sampler is a pure function of its parameters and an :class:`RngStream`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Union

import numpy as np

from .errors import (
    EmptyRequestError,
    GridError,
    InsufficientHorizonError,
    ParameterError,
)

_UINT64_MAX = 2**64 - 1


@dataclass(frozen=True)
class RngStream:
    """A reproducible, splittable source of randomness.

    ``(seed, stream_id)`` identifies the stream; :meth:`child` derives
    statistically independent substreams through ``numpy.random.SeedSequence``
    spawn keys, so no two distinct keys share state.
    """

    seed: int = 0
    stream_id: int = 0
    path: tuple = field(default=(), repr=False)

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or not 0 <= v <= _UINT64_MAX:
                raise ParameterError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    def child(self, k: int) -> "RngStream":
        return RngStream(self.seed, self.stream_id, self.path + (int(k),))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream_id),) + self.path)
        return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing time nodes starting at 0."""

    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise GridError("a time grid needs at least two nodes")
        if nodes[0] != 0.0:
            raise GridError(f"time grid must start at 0, starts at {nodes[0]}")
        if not np.all(np.diff(nodes) > 0):
            raise GridError("time grid nodes must be strictly increasing")
        if not np.all(np.isfinite(nodes)):
            raise GridError("time grid nodes must be finite")
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def uniform(cls, t_max: float, n_steps: int) -> "TimeGrid":
        if not t_max > 0:
            raise GridError(f"t_max must be positive, got {t_max}")
        if int(n_steps) < 1:
            raise GridError(f"n_steps must be a positive integer, got {n_steps}")
        return cls(np.linspace(0.0, float(t_max), int(n_steps) + 1))

    @property
    def t_max(self) -> float:
        return float(self.nodes[-1])

    @property
    def n_steps(self) -> int:
        return self.nodes.size - 1


@dataclass(frozen=True)
class SamplePath:
    """Process values on a :class:`TimeGrid`.

    ``values`` has shape ``(n_nodes,)`` for a single path or
    ``(n_paths, n_nodes)`` for a batch of independent replicates.
    """

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape[-1] != self.grid.nodes.size:
            raise GridError(
                f"path has {values.shape[-1]} values for {self.grid.nodes.size} grid nodes"
            )
        object.__setattr__(self, "values", values)

    def at(self, time) -> np.ndarray:
        """Linear interpolation of every replicate at ``time``."""
        time = np.asarray(time, dtype=float)
        if np.any(time < 0) or np.any(time > self.grid.t_max):
            raise InsufficientHorizonError(
                f"requested time outside the simulated window [0, {self.grid.t_max}]"
            )
        if self.values.ndim == 1:
            return np.interp(time, self.grid.nodes, self.values)
        return np.stack([np.interp(time, self.grid.nodes, v) for v in self.values])


class TwoSidedPath(NamedTuple):
    """Two independent one-sided paths glued at time 0.

    ``plus`` carries ``X(s)`` for ``s >= 0`` and ``minus`` carries ``X(-s)``.
    """

    plus: SamplePath
    minus: SamplePath

    def at(self, time) -> np.ndarray:
        time = np.asarray(time, dtype=float)
        return np.where(time >= 0, self.plus.at(np.abs(time)), self.minus.at(np.abs(time)))


# -- subordination kinds ------------------------------------------------------


@dataclass(frozen=True)
class BrownianTime:
    """Outer process run at ``|Y_t|`` for an independent Brownian motion ``Y``."""


@dataclass(frozen=True)
class InverseStable:
    """Outer process run at the first passage time ``E_t`` of a beta-stable subordinator."""

    beta: float

    def __post_init__(self):
        _check_beta(self.beta)


@dataclass(frozen=True)
class AlphaTime:
    """Outer process run at ``|S_t|`` for an independent symmetric alpha-stable ``S``."""

    alpha: float

    def __post_init__(self):
        _check_alpha(self.alpha)


@dataclass(frozen=True)
class IteratedBM:
    """``z + X(Y_t)`` with ``X`` a two-sided process and ``Y`` a Brownian clock."""

    z: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.z):
            raise ParameterError(f"start point must be finite, got {self.z}")


SubordinationKind = Union[BrownianTime, InverseStable, AlphaTime, IteratedBM]


def _check_beta(beta):
    if not (np.isfinite(beta) and 0.0 < beta < 1.0):
        raise ParameterError(f"beta must lie in the open interval (0, 1), got {beta}")


def _check_alpha(alpha):
    if not (np.isfinite(alpha) and 0.0 < alpha <= 2.0):
        raise ParameterError(f"alpha must lie in (0, 2], got {alpha}")


def _check_time(t):
    if not (np.isfinite(t) and t > 0):
        raise ParameterError(f"time must be positive and finite, got {t}")


def _check_count(n):
    if int(n) != n or n < 1:
        raise EmptyRequestError(f"sample count must be a positive integer, got {n}")
    return int(n)


# -- one-dimensional samplers -------------------------------------------------


def sample_gaussian(n: int, stream: RngStream) -> np.ndarray:
    """``n`` i.i.d. standard normal variates."""
    n = _check_count(n)
    return stream.generator().standard_normal(n)


def _standard_symmetric_stable(alpha, size, rng):
    # Chambers-Mallows-Stuck, symmetric case: characteristic function exp(-|xi|^alpha)
    v = rng.uniform(-0.5 * np.pi, 0.5 * np.pi, size)
    w = rng.standard_exponential(size)
    if alpha == 1.0:
        return np.tan(v)
    return (
        np.sin(alpha * v)
        / np.cos(v) ** (1.0 / alpha)
        * (np.cos((1.0 - alpha) * v) / w) ** ((1.0 - alpha) / alpha)
    )


def sample_symmetric_stable(alpha: float, t: float, n: int, stream: RngStream) -> np.ndarray:
    """Samples of ``S_t`` with ``E exp(i xi S_t) = exp(-t |xi|^alpha)``."""
    _check_alpha(alpha)
    _check_time(t)
    n = _check_count(n)
    return t ** (1.0 / alpha) * _standard_symmetric_stable(alpha, n, stream.generator())


def _kanter_factor(beta, u):
    return (np.sin(beta * u) / np.sin(u)) ** (1.0 / (1.0 - beta)) * np.sin((1.0 - beta) * u) / np.sin(beta * u)


def _standard_one_sided_stable(beta, size, rng):
    # Kanter's representation of the law with Laplace transform exp(-s^beta)
    u = np.pi * (1.0 - rng.random(size))  # (0, pi]
    u = np.where(u >= np.pi, np.nextafter(np.pi, 0.0), u)
    w = rng.standard_exponential(size)
    return (_kanter_factor(beta, u) / w) ** ((1.0 - beta) / beta)


def sample_stable_subordinator(beta: float, t: float, n: int, stream: RngStream) -> np.ndarray:
    """Samples of ``D_t`` with ``E exp(-s D_t) = exp(-t s^beta)``; strictly positive."""
    _check_beta(beta)
    _check_time(t)
    n = _check_count(n)
    d1 = _standard_one_sided_stable(beta, n, stream.generator())
    return t ** (1.0 / beta) * d1


def sample_inverse_subordinator(beta: float, t: float, n: int, stream: RngStream) -> np.ndarray:
    """Exact samples of the first passage time ``E_t = inf{x > 0 : D(x) > t}``.

    Uses ``P[E_t <= x] = P[D(x) >= t]`` together with ``D(x) = x^(1/beta) D_1`` in
    law, which gives ``E_t = (t / D_1)^beta``.
    """
    _check_beta(beta)
    _check_time(t)
    n = _check_count(n)
    d1 = _standard_one_sided_stable(beta, n, stream.generator())
    return (t / d1) ** beta


# -- paths --------------------------------------------------------------------

PATH_KINDS = ("brownian", "two_sided_brownian", "subordinator", "symmetric_stable")


def simulate_path(
    kind: str,
    grid: TimeGrid,
    stream: RngStream,
    *,
    beta: Optional[float] = None,
    alpha: Optional[float] = None,
    n_paths: Optional[int] = None,
):
    """Simulate a path (or ``n_paths`` replicates) from independent increments.

    ``kind`` is one of ``"brownian"`` (increments of variance ``2 dt``),
    ``"two_sided_brownian"`` (returns a :class:`TwoSidedPath`),
    ``"subordinator"`` (needs ``beta``) or ``"symmetric_stable"`` (needs ``alpha``).
    """
    if not isinstance(grid, TimeGrid):
        grid = TimeGrid(grid)
    shape = (grid.n_steps,) if n_paths is None else (_check_count(n_paths), grid.n_steps)
    dt = np.diff(grid.nodes)

    if kind == "two_sided_brownian":
        plus = simulate_path("brownian", grid, stream.child(0), n_paths=n_paths)
        minus = simulate_path("brownian", grid, stream.child(1), n_paths=n_paths)
        return TwoSidedPath(plus, minus)

    rng = stream.generator()
    if kind == "brownian":
        inc = np.sqrt(2.0 * dt) * rng.standard_normal(shape)
    elif kind == "subordinator":
        if beta is None:
            raise ParameterError("subordinator paths need beta")
        _check_beta(beta)
        inc = dt ** (1.0 / beta) * _standard_one_sided_stable(beta, shape, rng)
    elif kind == "symmetric_stable":
        if alpha is None:
            raise ParameterError("symmetric stable paths need alpha")
        _check_alpha(alpha)
        inc = dt ** (1.0 / alpha) * _standard_symmetric_stable(alpha, shape, rng)
    else:
        raise ParameterError(f"unknown path kind {kind!r}; expected one of {PATH_KINDS}")

    values = np.zeros(shape[:-1] + (grid.nodes.size,))
    np.cumsum(inc, axis=-1, out=values[..., 1:])
    return SamplePath(grid, values)


def invert_subordinator_path(path: SamplePath, t: float):
    """First passage of level ``t`` by a non-decreasing path.

    Returns the abscissa where the path first exceeds ``t``, interpolated
    linearly inside the bracketing grid step. Works row-wise on a batch.
    """
    _check_time(t)
    values = np.atleast_2d(path.values)
    nodes = path.grid.nodes
    if np.any(np.diff(values, axis=-1) < 0):
        raise ParameterError("subordinator path must be non-decreasing")
    if np.any(values[:, -1] <= t):
        raise InsufficientHorizonError(
            f"path terminal value does not exceed t={t}; simulate a longer horizon"
        )
    i = np.argmax(values > t, axis=-1)  # first node strictly above t; i >= 1 since values[:, 0] = 0 < t
    rows = np.arange(values.shape[0])
    v0, v1 = values[rows, i - 1], values[rows, i]
    x0, x1 = nodes[i - 1], nodes[i]
    x = x0 + (t - v0) / (v1 - v0) * (x1 - x0)
    return float(x[0]) if path.values.ndim == 1 else x


# -- subordinated compositions ------------------------------------------------


def _outer_at(tau, outer_alpha, rng):
    """Outer process started at 0, evaluated once at each inner time ``tau``."""
    if outer_alpha == 2.0:
        return np.sqrt(2.0 * tau) * rng.standard_normal(tau.shape)
    return tau ** (1.0 / outer_alpha) * _standard_symmetric_stable(outer_alpha, tau.shape, rng)


def _parse_outer(outer):
    if outer in ("brownian", None):
        return 2.0
    if isinstance(outer, tuple) and len(outer) == 2 and outer[0] == "symmetric_stable":
        outer = outer[1]
    try:
        alpha = float(outer)
    except (TypeError, ValueError):
        raise ParameterError(f"outer must be 'brownian' or a stable index, got {outer!r}") from None
    _check_alpha(alpha)
    return alpha


def sample_subordinated(
    kind: SubordinationKind,
    t: float,
    n: int,
    stream: RngStream,
    outer="brownian",
    x0: float = 0.0,
) -> np.ndarray:
    """One-dimensional marginal of a subordinated process at time ``t``.

    ``outer`` is ``"brownian"`` or a symmetric stable index (a float, or the
    tuple ``("symmetric_stable", alpha)``). Inner and outer processes draw from
    independent child streams of ``stream``.
    """
    _check_time(t)
    n = _check_count(n)
    outer_alpha = _parse_outer(outer)
    inner_stream, outer_stream = stream.child(0), stream.child(1)

    if isinstance(kind, BrownianTime):
        tau = np.abs(np.sqrt(2.0 * t) * sample_gaussian(n, inner_stream))
    elif isinstance(kind, InverseStable):
        tau = sample_inverse_subordinator(kind.beta, t, n, inner_stream)
    elif isinstance(kind, AlphaTime):
        tau = np.abs(sample_symmetric_stable(kind.alpha, t, n, inner_stream))
    elif isinstance(kind, IteratedBM):
        y = np.sqrt(2.0 * t) * sample_gaussian(n, inner_stream)
        x_plus = _outer_at(np.abs(y), outer_alpha, outer_stream.generator())
        x_minus = _outer_at(np.abs(y), outer_alpha, stream.child(2).generator())
        return x0 + kind.z + np.where(y >= 0, x_plus, x_minus)
    else:
        raise ParameterError(f"unknown subordination kind {kind!r}")

    return x0 + _outer_at(tau, outer_alpha, outer_stream.generator())
