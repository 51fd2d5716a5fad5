"""Three-party GHZ distribution over a star of three paths.

For every candidate center ``s`` the three envelopes ``s -> T1, T2, T3`` are
combined into a GHZ fidelity-vs-rate curve and the best center is kept per
grid point.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .curves import CapacityGrid, FidelityCurve, Model
from .errors import ConfigurationError, NoStarError, ParameterDomainError
from .network import Network
from .routing import CurveRegistry, route_from_source

#: Capacity reported for a path of zero links (center coincides with a target).
EMPTY_PATH_CAPACITY = 1.0


def _ghz(a, b, c):
    return 0.5 * ((1 + a) * (1 + b) * (1 + c) / 8 + (1 - a) * (1 - b) * (1 - c) / 8 + a * b * c)


def ghz_fidelity(g1, g2, g3):
    """GHZ fidelity of a star whose three arms have Werner parameters ``g1, g2, g3``."""
    arrs = [np.asarray(g, dtype=float) for g in (g1, g2, g3)]
    for g in arrs:
        if np.any((g < 0.0) | (g > 1.0)) or np.any(np.isnan(g)):
            raise ParameterDomainError("Werner parameters must lie in [0, 1]")
    f = _ghz(*arrs)
    return float(f) if np.ndim(f) == 0 else f


@dataclass(eq=False)
class StarCurve:
    """GHZ fidelity per grid point plus the arm capacities realising it.

    ``arm_index[k]`` holds the grid index used by each arm, ``-1`` for an
    empty arm; rows of an unreachable point are all ``-2``.
    """

    grid: CapacityGrid
    values: np.ndarray
    arm_index: np.ndarray

    def arm_capacities(self, k: int) -> tuple[float, float, float]:
        caps = self.grid.capacities
        return tuple(
            EMPTY_PATH_CAPACITY if i == -1 else float(caps[i]) if i >= 0 else 0.0
            for i in self.arm_index[k]
        )


def _coarse(values: np.ndarray, grid: CapacityGrid, star_grid: CapacityGrid) -> np.ndarray:
    return np.asarray(values)[:: grid.m // star_grid.m]


def _best_pair(y: np.ndarray, z: np.ndarray, weight_fn) -> tuple[np.ndarray, np.ndarray]:
    """Per index sum ``s = j + l``, the best ``weight_fn(y_j, z_l)`` and its ``j``.

    Only ``j`` up to the first maximum of ``y`` and ``l`` up to the first
    maximum of ``z`` need to be searched because both are non-decreasing.
    Returns arrays over ``s`` in ``[0, len(y) + len(z) - 2]``; entries with no
    positive value are 0 with ``j = -1``.
    """
    n = y.size + z.size - 1
    best = np.zeros(n)
    arg = np.full(n, -1, dtype=np.int64)
    ty, tz = int(np.argmax(y)), int(np.argmax(z))
    ly, lz = int(np.argmax(y > 0)), int(np.argmax(z > 0))
    if y[ty] <= 0 or z[tz] <= 0:
        return best, arg
    jj = np.arange(ly, ty + 1)
    ll = np.arange(lz, tz + 1)
    w = weight_fn(y[jj][:, None], z[ll][None, :])
    nj, nl = w.shape
    skew = np.full((nj, nj + nl - 1), -1.0)
    rows = np.arange(nj)[:, None]
    skew[rows, rows + np.arange(nl)[None, :]] = w
    pos = np.argmax(skew, axis=0)
    val = skew[pos, np.arange(nj + nl - 1)]
    lo = ly + lz
    best[lo : lo + val.size] = val
    arg[lo : lo + val.size] = jj[pos]
    # past the box every arm sits on its maximum
    tail = lo + val.size
    best[tail:] = weight_fn(y[ty], z[tz])
    arg[tail:] = np.maximum(ty, np.arange(tail, n) - (z.size - 1))
    return best, arg


def _star_single(arms: list[np.ndarray | None], m: int) -> tuple[np.ndarray, np.ndarray]:
    present = [i for i, a in enumerate(arms) if a is not None]
    K = next(a.size for a in arms if a is not None)
    values = np.zeros(K)
    index = np.full((K, 3), -2, dtype=np.int64)
    shift = (len(present) - 1) * m

    if len(present) == 2:
        p, q = present
        (e,) = [i for i in range(3) if arms[i] is None]

        def weight(y, z):
            g = [None, None, None]
            g[e], g[p], g[q] = 1.0, y, z
            return _ghz(*g)

        best, arg = _best_pair(arms[p], arms[q], weight)
        span = min(best.size, K - shift)
        ok = best[:span] > 0
        ks = np.flatnonzero(ok)
        values[ks + shift] = best[ks]
        index[ks + shift, e] = -1
        index[ks + shift, p] = arg[ks]
        index[ks + shift, q] = ks - arg[ks]
        return values, index

    x, y, z = arms
    tx, lx = int(np.argmax(x)), int(np.argmax(x > 0))
    if x[tx] <= 0:
        return values, index
    for i in range(lx, tx + 1):
        xi = x[i]
        best, arg = _best_pair(y, z, lambda b, c: _ghz(xi, b, c))
        # T = i + s + 2m
        lo = i + shift
        span = K - lo
        if span <= 0:
            break
        cand = best[:span]
        upd = cand > values[lo:]
        if upd.any():
            ks = np.flatnonzero(upd)
            values[lo + ks] = cand[ks]
            index[lo + ks, 0] = i
            index[lo + ks, 1] = arg[ks]
            index[lo + ks, 2] = ks - arg[ks]
    # any split using i > tx is matched by one using i = tx; nothing more to do
    return values, index


def star_curve(
    c1: FidelityCurve | None,
    c2: FidelityCurve | None,
    c3: FidelityCurve | None,
    model: Model | str,
    *,
    m_star: int | None = None,
) -> StarCurve:
    """Best GHZ fidelity per end-to-end rate for one star center.

    Pass ``None`` for an arm whose target is the center itself.  Points where
    any arm has a zero Werner parameter carry no value.  The single-ebit
    search runs on a grid coarsened to ``m_star`` points per octave.
    """
    model = Model.parse(model)
    curves = [c for c in (c1, c2, c3) if c is not None]
    if len(curves) < 2:
        raise ConfigurationError("a star needs at least two non-empty arms")
    grid = curves[0].grid
    for c in curves[1:]:
        if c.grid != grid:
            raise ConfigurationError(f"grid mismatch: {grid} vs {c.grid}")

    if model is Model.FLOW:
        arms = [np.ones(grid.size) if c is None else c.values for c in (c1, c2, c3)]
        values = _ghz(*arms)
        feasible = np.all([a > 0 for a in arms], axis=0)
        values = np.where(feasible, values, 0.0)
        k = np.arange(grid.size)
        index = np.where(feasible[:, None], np.stack([k, k, k], axis=1), -2)
        for i, c in enumerate((c1, c2, c3)):
            if c is None:
                index[feasible, i] = -1
        return StarCurve(grid, values, index)

    star_grid = grid.coarsen(m_star) if m_star is not None else grid
    arms = [None if c is None else _coarse(c.values, grid, star_grid) for c in (c1, c2, c3)]
    values, index = _star_single(arms, star_grid.m)
    return StarCurve(star_grid, values, index)


@dataclass(eq=False)
class StarResult:
    """Best star over all centers: fidelity, center and arm capacities per point."""

    grid: CapacityGrid
    model: Model
    targets: tuple[int, int, int]
    values: np.ndarray
    sources: np.ndarray
    arm_index: np.ndarray
    registries: tuple[CurveRegistry, ...] = field(default=(), repr=False)

    def arm_capacities(self, k: int) -> tuple[float, float, float]:
        return StarCurve(self.grid, self.values, self.arm_index).arm_capacities(k)

    def rows(self) -> list[tuple[float, float, int, float, float, float]]:
        caps = self.grid.capacities
        return [
            (float(caps[k]), float(self.values[k]), int(self.sources[k]), *self.arm_capacities(k))
            for k in np.flatnonzero(self.sources >= 0)
        ]

    def to_dict(self) -> dict[str, Any]:
        return {
            "model": self.model.value,
            "targets": list(self.targets),
            "grid": self.grid.to_dict(),
            "rows": [
                {"capacity": c, "fidelity": f, "source": s, "c1": a, "c2": b, "c3": d}
                for c, f, s, a, b, d in self.rows()
            ],
        }

    def write_csv(self, target: str | Path | io.TextIOBase) -> None:
        if isinstance(target, (str, Path)):
            with open(target, "w", newline="", encoding="utf-8") as fh:
                self.write_csv(fh)
            return
        out = csv.writer(target, lineterminator="\n")
        out.writerow(["capacity", "fidelity", "source", "c1", "c2", "c3"])
        for c, f, s, a, b, d in self.rows():
            out.writerow([repr(c), repr(f), s, repr(a), repr(b), repr(d)])


def select_star(
    network: Network,
    t1: int,
    t2: int,
    t3: int,
    model: Model | str = Model.FLOW,
    grid: CapacityGrid | None = None,
    *,
    m_star: int | None = 8,
    registries: Sequence[CurveRegistry] | None = None,
) -> StarResult:
    """Best three-party star for targets ``t1, t2, t3``.

    Ties between centers go to the smaller node id.  ``m_star`` coarsens the
    single-ebit search (ignored for the flow model and when it equals the
    grid resolution).
    """
    model = Model.parse(model)
    grid = grid or CapacityGrid()
    targets = (t1, t2, t3)
    if len(set(targets)) != 3:
        raise ConfigurationError(f"targets must be distinct, got {targets}")
    for t in targets:
        if not 0 <= t < network.V:
            raise ParameterDomainError(f"target {t} is not a node of the network")
    if registries is None:
        links = network.link_curves(grid)
        registries = tuple(
            route_from_source(network, t, model, grid, link_curves=links)[0] for t in targets
        )
    if model is Model.SINGLE and m_star is not None and m_star != grid.m:
        star_grid = grid.coarsen(m_star)
    else:
        star_grid = grid
        m_star = None

    K = star_grid.size
    values = np.zeros(K)
    sources = np.full(K, -1, dtype=np.int64)
    arm_index = np.full((K, 3), -2, dtype=np.int64)
    for s in range(network.V):
        arms = [None if s == t else reg.curve(s) for t, reg in zip(targets, registries)]
        if any(a is not None and not np.any(a.values > 0) for a in arms):
            continue
        sc = star_curve(*arms, model, m_star=m_star)
        better = sc.values > values
        values[better] = sc.values[better]
        sources[better] = s
        arm_index[better] = sc.arm_index[better]
    if not np.any(sources >= 0):
        raise NoStarError(f"no center reaches all of the targets {targets}")
    return StarResult(star_grid, model, targets, values, sources, arm_index, tuple(registries))
