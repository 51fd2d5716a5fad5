"""Source-to-all routing over fidelity curves.

Paths are expanded in order of hop count; among paths of equal length the
one with the larger curve (summed over the grid) goes first, which keeps
later arrivals from superseding it.  Each node keeps an envelope: the
pointwise best Werner parameter found so far together with the id of the
path that achieves it.  A popped path that improves no point of its node's
envelope is dropped; otherwise it is merged and extended to every neighbour
not already on it.  Extensions that could not improve their node's current
envelope are never queued, since envelopes only grow.
"""

from __future__ import annotations

import csv
import heapq
import io
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from .curves import (
    CapacityGrid,
    EnvelopeEntry,
    FidelityCurve,
    Model,
    concat,
    fidelity_from_werner,
    link_operating_indices,
    single_split,
)
from .errors import NoRouteError, ParameterDomainError
from .network import Network


@dataclass(frozen=True, eq=False)
class PathRecord:
    """A simple path from the source, with its end-to-end curve.

    ``edges`` lists the network edge indices in travel order.
    """

    nodes: tuple[int, ...]
    curve: FidelityCurve
    edges: tuple[int, ...] = ()

    @property
    def hops(self) -> int:
        return len(self.nodes) - 1


@dataclass
class RoutingStats:
    visited_paths: int = 0
    elapsed: float = 0.0


@dataclass(eq=False)
class CurveRegistry:
    """Per-node envelopes produced by :func:`route_from_source`.

    ``gamma[v, k]`` is the best Werner parameter at grid index ``k`` towards
    node ``v`` and ``path_ids[v, k]`` the id of the path achieving it
    (``-1`` where nothing is reachable).
    """

    network: Network
    source: int
    model: Model
    grid: CapacityGrid
    link_curves: list[FidelityCurve] = field(repr=False)
    gamma: np.ndarray = field(repr=False)
    path_ids: np.ndarray = field(repr=False)
    paths: dict[int, PathRecord] = field(repr=False)

    def entry(self, node: int) -> EnvelopeEntry:
        return EnvelopeEntry(self.gamma[node].copy(), self.path_ids[node].copy())

    def curve(self, node: int) -> FidelityCurve:
        return FidelityCurve(self.grid, self.gamma[node])

    def reachable(self) -> list[int]:
        return [int(v) for v in np.flatnonzero(self.gamma.max(axis=1) > 0.0)]

    def to_dict(self) -> dict[str, Any]:
        return {
            "source": self.source,
            "model": self.model.value,
            "grid": self.grid.to_dict(),
            "nodes": {
                str(v): {
                    "gamma": [float(x) for x in self.gamma[v]],
                    "path_ids": [int(i) for i in self.path_ids[v]],
                }
                for v in range(self.network.V)
            },
            "paths": {str(pid): list(rec.nodes) for pid, rec in sorted(self.paths.items())},
        }

    def write_csv(self, target: str | Path | io.TextIOBase) -> None:
        """Write ``node,capacity,gamma,fidelity`` rows for every node and grid point."""
        if isinstance(target, (str, Path)):
            with open(target, "w", newline="", encoding="utf-8") as fh:
                self.write_csv(fh)
            return
        out = csv.writer(target, lineterminator="\n")
        out.writerow(["node", "capacity", "gamma", "fidelity"])
        caps = self.grid.capacities
        for v in range(self.network.V):
            for c, g in zip(caps, self.gamma[v]):
                out.writerow([v, repr(float(c)), repr(float(g)), repr(float(fidelity_from_werner(g)))])


Priority = Callable[[int, FidelityCurve], Any]


def hop_priority(hops: int, curve: FidelityCurve) -> tuple[int, float]:
    """Default queue order: fewer hops first, then the larger curve."""
    return hops, -float(curve.values.sum())


def plain_hop_priority(hops: int, curve: FidelityCurve) -> int:
    """Hop count alone; equal-length paths leave in insertion order."""
    return hops


def route_from_source(
    network: Network,
    source: int,
    model: Model | str = Model.FLOW,
    grid: CapacityGrid | None = None,
    max_hops: int | None = None,
    *,
    prune: bool = True,
    link_curves: Sequence[FidelityCurve] | None = None,
    priority: Priority = hop_priority,
) -> tuple[CurveRegistry, RoutingStats]:
    """Envelope of all simple paths from ``source`` to every node.

    With ``prune=False`` every path up to ``max_hops`` is expanded; the
    envelopes are the same, only the visit count grows.  ``priority`` maps
    ``(hops, curve)`` of a queued path to its sort key; any order yields the
    same envelopes, only the work differs.
    """
    model = Model.parse(model)
    grid = grid or CapacityGrid()
    if not 0 <= source < network.V:
        raise ParameterDomainError(f"source {source} is not a node of a {network.V}-node network")
    if max_hops is not None and max_hops < 0:
        raise ParameterDomainError(f"max_hops must be non-negative, got {max_hops}")

    t0 = time.perf_counter()
    links = list(link_curves) if link_curves is not None else network.link_curves(grid)
    adjacency = network.adjacency
    K = grid.size
    gamma = np.zeros((network.V, K))
    ids = np.full((network.V, K), -1, dtype=np.int64)
    records: dict[int, PathRecord] = {}
    single = model is Model.SINGLE

    # (priority key, insertion order, hops, path)
    start = PathRecord((source,), FidelityCurve.ones(grid))
    queue: list[tuple[Any, int, int, PathRecord]] = [(priority(0, start.curve), 0, 0, start)]
    pushed = 1
    visited = 0
    while queue:
        _, _, hops, rec = heapq.heappop(queue)
        visited += 1
        node = rec.nodes[-1]
        env = gamma[node]
        better = rec.curve.values > env
        if prune and not better.any():
            continue
        pid = len(records)
        records[pid] = rec
        env[better] = rec.curve.values[better]
        ids[node, better] = pid

        if max_hops is not None and hops >= max_hops:
            continue
        on_path = set(rec.nodes)
        for nbr, e in adjacency[node]:
            if nbr in on_path:
                continue
            link = links[e]
            target = gamma[nbr]
            # an extension never exceeds either of its factors
            if prune and single and hops and not np.any(np.minimum(rec.curve.values, link.values) > target):
                continue
            curve = link if hops == 0 else concat(rec.curve, link, model)
            if prune and not np.any(curve.values > target):
                continue
            child = PathRecord(rec.nodes + (nbr,), curve, rec.edges + (e,))
            heapq.heappush(queue, (priority(hops + 1, curve), pushed, hops + 1, child))
            pushed += 1

    used = np.unique(ids[ids >= 0])
    registry = CurveRegistry(
        network=network,
        source=source,
        model=model,
        grid=grid,
        link_curves=links,
        gamma=gamma,
        path_ids=ids,
        paths={int(p): records[int(p)] for p in used},
    )
    return registry, RoutingStats(visited, time.perf_counter() - t0)


@dataclass(frozen=True, eq=False)
class RouteChoice:
    """An extracted route and how to operate it at the queried capacity.

    ``link_capacities`` is the per-link allocation realising ``gamma``;
    ``operating_capacities`` replaces allocations that fall on a repaired
    plateau with the plateau edge actually worth running at.
    """

    path: PathRecord
    capacity: float
    gamma: float
    link_capacities: tuple[float, ...]
    operating_capacities: tuple[float, ...]

    @property
    def fidelity(self) -> float:
        return fidelity_from_werner(self.gamma)


def extract_path(registry: CurveRegistry, target: int, c: float) -> RouteChoice:
    """Read back the path attributed to ``target`` at capacity ``c``."""
    if not 0 <= target < registry.network.V:
        raise ParameterDomainError(f"target {target} is not a node of the network")
    grid = registry.grid
    k = grid.index_at_or_below(c)
    if target == registry.source:
        return RouteChoice(registry.paths[int(registry.path_ids[target, k])], grid.capacity(k), 1.0, (), ())
    g = float(registry.gamma[target, k])
    if g <= 0.0:
        raise NoRouteError(f"node {target} is unreachable from {registry.source} at capacity {c:g}")
    path = registry.paths[int(registry.path_ids[target, k])]
    links = [registry.link_curves[e] for e in path.edges]

    if registry.model is Model.FLOW:
        alloc = [k] * len(links)
    else:
        prefixes = [links[0]]
        for link in links[1:]:
            prefixes.append(concat(prefixes[-1], link, Model.SINGLE))
        alloc = [0] * len(links)
        kk = k
        for pos in range(len(links) - 1, 0, -1):
            kk, alloc[pos] = single_split(prefixes[pos - 1], links[pos], kk)
        alloc[0] = kk

    edges = registry.network.edges
    operating = [
        int(link_operating_indices(edges[e].params, grid)[a]) for e, a in zip(path.edges, alloc)
    ]
    caps = grid.capacities
    return RouteChoice(
        path=path,
        capacity=grid.capacity(k),
        gamma=g,
        link_capacities=tuple(float(caps[a]) for a in alloc),
        operating_capacities=tuple(float(caps[a]) for a in operating),
    )
