"""Photonic link model and the algebra of fidelity-vs-capacity curves.

Curves are sampled on a shared geometric capacity grid
``c_k = 0.5 * 2**(-k/m)``, ``k = 0 .. m*depth``.  Capacity decreases with the
index, so a curve that is non-increasing in capacity is non-decreasing in
``k``.  Values stored on a curve are Werner parameters clamped to ``[0, 1]``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

import numpy as np

from .errors import (
    ConfigurationError,
    ParameterDomainError,
    UnreachableCapacityError,
)

#: Largest single-ebit generation probability of the channel.
C_TOP = 0.5

#: Probabilities this close to 1/2 are treated as unreachable.
P_GUARD = 1e-9


class Model(str, enum.Enum):
    """Entanglement distribution model."""

    SINGLE = "single"
    FLOW = "flow"

    @classmethod
    def parse(cls, value: "Model | str") -> "Model":
        try:
            return cls(value)
        except ValueError:
            raise ConfigurationError(
                f"unknown model {value!r}; expected 'single' or 'flow'"
            ) from None


@dataclass(frozen=True)
class LinkParams:
    """Channel parameters of one link.

    ``epsilon`` is the collection efficiency, ``p_dark`` the dark-count
    probability, ``beta`` the fidelity-ceiling offset and ``n_e`` the
    relative number of ebits of the link.
    """

    epsilon: float
    p_dark: float = 0.0
    beta: float = 0.0
    n_e: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon < 1.0:
            raise ParameterDomainError(f"epsilon must be in (0, 1), got {self.epsilon}")
        if not 0.0 <= self.p_dark < 1.0:
            raise ParameterDomainError(f"p_dark must be in [0, 1), got {self.p_dark}")
        if not 0.0 <= self.beta < 1.0:
            raise ParameterDomainError(f"beta must be in [0, 1), got {self.beta}")
        if not 0.0 < self.n_e <= 1.0:
            raise ParameterDomainError(f"n_e must be in (0, 1], got {self.n_e}")


@dataclass(frozen=True)
class CapacityGrid:
    """Geometric capacity grid with ``m`` points per octave over ``depth`` octaves."""

    m: int = 32
    depth: int = 40

    def __post_init__(self) -> None:
        if not (isinstance(self.m, (int, np.integer)) and self.m > 0):
            raise ConfigurationError(f"steps per octave must be a positive integer, got {self.m!r}")
        if not (isinstance(self.depth, (int, np.integer)) and self.depth > 0):
            raise ConfigurationError(f"depth must be a positive integer, got {self.depth!r}")

    @property
    def size(self) -> int:
        return self.m * self.depth + 1

    @cached_property
    def capacities(self) -> np.ndarray:
        c = C_TOP * np.exp2(-np.arange(self.size) / self.m)
        c.flags.writeable = False
        return c

    def capacity(self, k: int) -> float:
        return float(self.capacities[k])

    def index_at_or_below(self, c: float) -> int:
        """Index of the largest grid capacity that does not exceed ``c``."""
        if not c > 0.0:
            raise ParameterDomainError(f"capacity must be positive, got {c}")
        if c >= C_TOP:
            return 0
        k = math.ceil(self.m * math.log2(C_TOP / c) - 1e-9)
        if k >= self.size:
            raise ParameterDomainError(
                f"capacity {c:g} lies below the grid floor {self.capacities[-1]:g}"
            )
        return k

    def coarsen(self, m_coarse: int) -> "CapacityGrid":
        if m_coarse <= 0 or self.m % m_coarse:
            raise ConfigurationError(
                f"coarse resolution {m_coarse} must divide the grid resolution {self.m}"
            )
        return CapacityGrid(m_coarse, self.depth)

    def to_dict(self) -> dict[str, int]:
        return {"m": int(self.m), "depth": int(self.depth)}


@dataclass(frozen=True, eq=False)
class FidelityCurve:
    """Werner parameter sampled on every point of a :class:`CapacityGrid`."""

    grid: CapacityGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.size,):
            raise ConfigurationError(
                f"curve has {v.shape} values, grid expects ({self.grid.size},)"
            )
        if not np.all((v >= 0.0) & (v <= 1.0)):
            raise ParameterDomainError("curve values must be Werner parameters in [0, 1]")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FidelityCurve):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.values, other.values)

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def _trusted(cls, grid: CapacityGrid, values: np.ndarray) -> "FidelityCurve":
        # for results of curve algebra on valid curves: skips re-validation
        values.flags.writeable = False
        curve = object.__new__(cls)
        object.__setattr__(curve, "grid", grid)
        object.__setattr__(curve, "values", values)
        return curve

    def __len__(self) -> int:
        return self.grid.size

    @classmethod
    def constant(cls, grid: CapacityGrid, gamma: float) -> "FidelityCurve":
        return cls(grid, np.full(grid.size, float(gamma)))

    @classmethod
    def zeros(cls, grid: CapacityGrid) -> "FidelityCurve":
        return cls(grid, np.zeros(grid.size))

    @classmethod
    def ones(cls, grid: CapacityGrid) -> "FidelityCurve":
        return cls(grid, np.ones(grid.size))

    def at(self, c: float) -> float:
        """Value at the grid point nearest below capacity ``c``."""
        return float(self.values[self.grid.index_at_or_below(c)])

    def fidelities(self) -> np.ndarray:
        return fidelity_from_werner(self.values)

    def to_dict(self) -> dict[str, Any]:
        return {"grid": self.grid.to_dict(), "values": [float(x) for x in self.values]}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "FidelityCurve":
        try:
            grid = CapacityGrid(int(data["grid"]["m"]), int(data["grid"]["depth"]))
            return cls(grid, np.asarray(data["values"], dtype=float))
        except (KeyError, TypeError) as exc:
            raise ConfigurationError(f"malformed curve record: {exc}") from exc


# -- channel model ---------------------------------------------------------


def success_probability(p_em, epsilon: float):
    """Probability that one generation attempt heralds an ebit."""
    p_em = np.asarray(p_em, dtype=float)
    if np.any(p_em < 0):
        raise ParameterDomainError("emission probability must be non-negative")
    if not 0.0 < epsilon < 1.0:
        raise ParameterDomainError(f"epsilon must be in (0, 1), got {epsilon}")
    p = -0.5 * np.expm1(-p_em * epsilon / 2.0)
    return float(p) if p.ndim == 0 else p


def emission_for_probability(p, epsilon: float):
    """Inverse of :func:`success_probability` in the emission probability."""
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise ParameterDomainError("success probability must be non-negative")
    if np.any(p >= C_TOP - P_GUARD):
        raise UnreachableCapacityError(
            f"success probability must be below {C_TOP} (guard {P_GUARD:g})"
        )
    if not 0.0 < epsilon < 1.0:
        raise ParameterDomainError(f"epsilon must be in (0, 1), got {epsilon}")
    p_em = -(2.0 / epsilon) * np.log1p(-2.0 * p)
    return float(p_em) if p_em.ndim == 0 else p_em


def link_fidelity(p_em, params: LinkParams):
    """Raw fidelity of an ebit generated at emission probability ``p_em``.

    No clamping is applied; dark counts can push the value far below 1/4 at
    small emission probabilities.
    """
    p_em = np.asarray(p_em, dtype=float)
    p = np.asarray(success_probability(p_em, params.epsilon))
    if params.p_dark > 0.0:
        if np.any(p <= 0.0):
            raise ParameterDomainError(
                "dark-count term is undefined at zero success probability"
            )
        dark = params.p_dark / p
    else:
        dark = 0.0
    f = 0.5 * (1.0 + np.exp(-p_em * (1.0 - params.epsilon))) - dark - params.beta
    f = np.asarray(f, dtype=float)
    return float(f) if f.ndim == 0 else f


def werner_from_fidelity(f):
    return (4.0 * f - 1.0) / 3.0


def fidelity_from_werner(gamma):
    return (3.0 * gamma + 1.0) / 4.0


def clamp_werner(gamma):
    """Storage form of a Werner parameter: negative values mark useless points."""
    return np.clip(gamma, 0.0, 1.0)


def _raw_link_values(params: LinkParams, grid: CapacityGrid) -> np.ndarray:
    p = grid.capacities / params.n_e
    reachable = p < C_TOP - P_GUARD
    gamma = np.zeros(grid.size)
    if np.any(reachable):
        p_em = emission_for_probability(p[reachable], params.epsilon)
        gamma[reachable] = clamp_werner(werner_from_fidelity(link_fidelity(p_em, params)))
    return gamma


def build_link_curve(
    params: LinkParams, grid: CapacityGrid, *, repair: bool = True
) -> FidelityCurve:
    """Fidelity curve of one link at every grid capacity ``c = n_e * p``.

    Capacities whose generation probability would reach 1/2 get the value 0.
    With ``repair=False`` the raw, possibly non-monotone curve is returned.
    """
    curve = FidelityCurve(grid, _raw_link_values(params, grid))
    return monotone_repair(curve) if repair else curve


def operating_indices(raw: FidelityCurve | np.ndarray) -> np.ndarray:
    """For every grid index, the index whose raw value the repaired curve reuses.

    Below the plateau edge this points at ``c_min``; ties resolve to the
    largest capacity.
    """
    v = raw.values if isinstance(raw, FidelityCurve) else np.asarray(raw)
    running = np.maximum.accumulate(v)
    fresh = np.empty(v.shape, dtype=bool)
    fresh[0] = True
    fresh[1:] = v[1:] > running[:-1]
    return np.maximum.accumulate(np.where(fresh, np.arange(v.size), 0))


def link_operating_indices(params: LinkParams, grid: CapacityGrid) -> np.ndarray:
    return operating_indices(_raw_link_values(params, grid))


# -- curve algebra ---------------------------------------------------------


def _same_grid(a: FidelityCurve, b: FidelityCurve) -> CapacityGrid:
    if a.grid != b.grid:
        raise ConfigurationError(f"grid mismatch: {a.grid} vs {b.grid}")
    return a.grid


def monotone_repair(curve: FidelityCurve) -> FidelityCurve:
    """Replace each value by the best value at any capacity at or above it."""
    return FidelityCurve._trusted(curve.grid, np.maximum.accumulate(curve.values))


def is_monotone(curve: FidelityCurve) -> bool:
    """True when the curve is non-increasing in capacity."""
    return bool(np.all(np.diff(curve.values) >= 0.0))


def concat_flow(a: FidelityCurve, b: FidelityCurve) -> FidelityCurve:
    grid = _same_grid(a, b)
    return FidelityCurve._trusted(grid, a.values * b.values)


def _maxtimes_full(x: np.ndarray, y: np.ndarray, shift: int) -> np.ndarray:
    n = x.size
    out = np.zeros(n)
    for i in range(max(n - shift, 0)):
        seg = out[i + shift :]
        np.maximum(seg, x[i] * y[: n - shift - i], out=seg)
    return out


def _maxtimes(x: np.ndarray, y: np.ndarray, shift: int) -> np.ndarray:
    """``out[k] = max_{i + j + shift = k} x[i] * y[j]``.

    For monotone inputs only indices up to each argument's first maximum
    can win, which bounds the search box; ties never change the result
    because both sequences are non-decreasing.
    """
    n = x.size
    span = n - shift
    out = np.zeros(n)
    if span <= 0:
        return out
    if np.any(np.diff(x) < 0) or np.any(np.diff(y) < 0):
        return _maxtimes_full(x, y, shift)
    ta, tb = int(np.argmax(x)), int(np.argmax(y))
    if ta > tb:
        x, y, ta, tb = y, x, tb, ta
    if x[ta] == 0.0 or y[tb] == 0.0:
        return out
    # leading zeros contribute nothing
    la, lb = int(np.argmax(x > 0.0)), int(np.argmax(y > 0.0))
    lo, hi = la + lb, min(ta + tb, span - 1)
    if lo <= hi:
        kk = np.arange(lo, hi + 1)[:, None]
        ii = np.arange(la, ta + 1)[None, :]
        jj = kk - ii
        prod = np.where(jj >= lb, x[ii] * y[np.clip(jj, 0, span - 1)], 0.0)
        out[shift + lo : shift + hi + 1] = prod.max(axis=1)
    out[shift + hi + 1 : shift + span] = x[ta] * y[tb]
    return out


def concat_single(a: FidelityCurve, b: FidelityCurve) -> FidelityCurve:
    """Best split of an end-to-end capacity over two segments (single-ebit model).

    Capacities multiply, so on the geometric grid index ``i`` and ``j`` land
    on index ``i + j + m``.  Products below the grid floor are dropped.
    """
    grid = _same_grid(a, b)
    return FidelityCurve._trusted(grid, _maxtimes(a.values, b.values, grid.m))


def single_split(a: FidelityCurve, b: FidelityCurve, k: int) -> tuple[int, int]:
    """Index pair ``(i, j)`` realising ``concat_single(a, b)`` at index ``k``.

    The first maximiser in order of increasing ``i`` is returned.
    """
    grid = _same_grid(a, b)
    s = k - grid.m
    if s < 0:
        raise ParameterDomainError(f"index {k} has no split on this grid")
    i = np.arange(s + 1)
    prod = a.values[i] * b.values[s - i]
    best = int(np.argmax(prod))
    return best, s - best


def concat(a: FidelityCurve, b: FidelityCurve, model: Model | str) -> FidelityCurve:
    if Model.parse(model) is Model.FLOW:
        return concat_flow(a, b)
    return concat_single(a, b)


def dominates(a: FidelityCurve, b: FidelityCurve) -> bool:
    """``a`` is at least ``b`` everywhere and the two curves differ."""
    _same_grid(a, b)
    return bool(np.all(a.values >= b.values)) and not np.array_equal(a.values, b.values)


@dataclass(frozen=True, eq=False)
class EnvelopeEntry:
    """Pointwise best value per grid point and the id of the path achieving it.

    A path id of ``-1`` marks a point no path has reached.
    """

    values: np.ndarray
    path_ids: np.ndarray

    @classmethod
    def empty(cls, grid: CapacityGrid) -> "EnvelopeEntry":
        return cls(np.zeros(grid.size), np.full(grid.size, -1, dtype=np.int64))

    def curve(self, grid: CapacityGrid) -> FidelityCurve:
        return FidelityCurve(grid, self.values)


def merge_envelope(
    entry: EnvelopeEntry, candidate: FidelityCurve, candidate_path_id: int
) -> EnvelopeEntry:
    """Pointwise maximum of ``entry`` and ``candidate``; the incumbent wins ties."""
    if entry.values.shape != candidate.values.shape:
        raise ConfigurationError("envelope and candidate sample different grids")
    better = candidate.values > entry.values
    values = np.where(better, candidate.values, entry.values)
    ids = np.where(better, np.int64(candidate_path_id), entry.path_ids)
    return EnvelopeEntry(values, ids)
