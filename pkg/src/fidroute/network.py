"""Undirected networks of photonic links, random generators and JSON persistence."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .curves import CapacityGrid, FidelityCurve, LinkParams, build_link_curve
from .errors import (
    ConfigurationError,
    NetworkFormatError,
    ParameterDomainError,
    ValidationError,
)

SeedLike = int | Sequence[int] | np.random.Generator | None


def _rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    params: LinkParams


@dataclass(frozen=True, eq=False)
class Network:
    """Simple undirected graph on nodes ``0 .. V-1``.

    Each edge carries the :class:`LinkParams` used in both directions.
    ``coords`` holds planar positions for geometric graphs, ``None`` otherwise.
    """

    V: int
    edges: tuple[Edge, ...]
    coords: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", tuple(self.edges))
        if self.coords is not None:
            xy = np.array(self.coords, dtype=float)
            if xy.shape != (self.V, 2):
                raise ValidationError(f"coords must have shape ({self.V}, 2), got {xy.shape}")
            xy.flags.writeable = False
            object.__setattr__(self, "coords", xy)
        self.validate()

    def validate(self) -> None:
        if not isinstance(self.V, (int, np.integer)) or self.V < 1:
            raise ValidationError(f"node count must be a positive integer, got {self.V!r}")
        seen: set[tuple[int, int]] = set()
        for n, e in enumerate(self.edges):
            if not (0 <= e.u < self.V and 0 <= e.v < self.V):
                raise ValidationError(f"edge {n} ({e.u}, {e.v}) has a node id outside [0, {self.V})")
            if e.u == e.v:
                raise ValidationError(f"edge {n} is a self-loop on node {e.u}")
            key = (min(e.u, e.v), max(e.u, e.v))
            if key in seen:
                raise ValidationError(f"edge {n} duplicates undirected edge {key}")
            seen.add(key)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        if self.coords is None or other.coords is None:
            same_xy = self.coords is None and other.coords is None
        else:
            same_xy = np.array_equal(self.coords, other.coords)
        return self.V == other.V and self.edges == other.edges and same_xy

    __hash__ = None  # type: ignore[assignment]

    @property
    def L(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per node, ``(neighbour, edge index)`` pairs sorted by neighbour id."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.V)]
        for idx, e in enumerate(self.edges):
            adj[e.u].append((e.v, idx))
            adj[e.v].append((e.u, idx))
        return tuple(tuple(sorted(a)) for a in adj)

    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency])

    def link_curves(self, grid: CapacityGrid) -> list[FidelityCurve]:
        return [build_link_curve(e.params, grid) for e in self.edges]

    def edge_between(self, u: int, v: int) -> int:
        for w, idx in self.adjacency[u]:
            if w == v:
                return idx
        raise KeyError(f"no edge between {u} and {v}")

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "V": int(self.V),
            "edges": [
                {
                    "u": int(e.u),
                    "v": int(e.v),
                    "eps": e.params.epsilon,
                    "p_dark": e.params.p_dark,
                    "beta": e.params.beta,
                    "n_e": e.params.n_e,
                }
                for e in self.edges
            ],
        }
        if self.coords is not None:
            data["coords"] = [[float(x), float(y)] for x, y in self.coords]
        return data

    @classmethod
    def from_dict(cls, data: Any) -> "Network":
        if not isinstance(data, dict):
            raise NetworkFormatError("network record must be a JSON object")
        V = _field(data, "V", int, "network")
        raw_edges = _field(data, "edges", list, "network")
        edges = []
        for n, rec in enumerate(raw_edges):
            where = f"edges[{n}]"
            if not isinstance(rec, dict):
                raise NetworkFormatError(f"{where}: expected an object")
            try:
                params = LinkParams(
                    epsilon=_field(rec, "eps", float, where),
                    p_dark=_field(rec, "p_dark", float, where),
                    beta=_field(rec, "beta", float, where),
                    n_e=_field(rec, "n_e", float, where),
                )
            except ParameterDomainError as exc:
                raise ValidationError(f"{where}: {exc}") from exc
            edges.append(Edge(_field(rec, "u", int, where), _field(rec, "v", int, where), params))
        coords = data.get("coords")
        if coords is not None:
            try:
                coords = np.asarray(coords, dtype=float)
            except (TypeError, ValueError) as exc:
                raise NetworkFormatError(f"coords: {exc}") from exc
        return cls(V, tuple(edges), coords)


def _field(rec: dict, key: str, kind: type, where: str) -> Any:
    if key not in rec:
        raise NetworkFormatError(f"{where}: missing field '{key}'")
    val = rec[key]
    if isinstance(val, bool):
        raise NetworkFormatError(f"{where}.{key}: expected {kind.__name__}, got bool")
    if kind is int and not isinstance(val, int):
        raise NetworkFormatError(f"{where}.{key}: expected int, got {type(val).__name__}")
    if kind is float and not isinstance(val, (int, float)):
        raise NetworkFormatError(f"{where}.{key}: expected number, got {type(val).__name__}")
    if kind is list and not isinstance(val, list):
        raise NetworkFormatError(f"{where}.{key}: expected list, got {type(val).__name__}")
    return float(val) if kind is float else val


def save(network: Network, path: str | Path) -> None:
    Path(path).write_text(json.dumps(network.to_dict(), indent=1) + "\n", encoding="utf-8")


def load(path: str | Path) -> Network:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return Network.from_dict(data)


# -- generators ------------------------------------------------------------


def sample_link_params(seed: SeedLike = None) -> LinkParams:
    """Draw link parameters from the benchmark distributions (``n_e = 1``)."""
    rng = _rng(seed)
    return LinkParams(
        epsilon=float(rng.uniform(0.3, 0.4)),
        p_dark=float(rng.uniform(0.0, 1e-3)),
        beta=float(rng.uniform(0.0, 1e-3)),
        n_e=1.0,
    )


def _with_params(pairs: Iterable[tuple[int, int]], rng: np.random.Generator) -> tuple[Edge, ...]:
    return tuple(Edge(int(u), int(v), sample_link_params(rng)) for u, v in pairs)


def generate_er(V: int, avg_degree: float, seed: SeedLike = None) -> Network:
    """Uniform simple graph with exactly ``round(avg_degree * V / 2)`` edges."""
    if V < 2:
        raise ConfigurationError(f"need at least two nodes, got V={V}")
    if avg_degree <= 0:
        raise ConfigurationError(f"average degree must be positive, got {avg_degree}")
    L = int(round(avg_degree * V / 2))
    total = V * (V - 1) // 2
    if L > total:
        raise ConfigurationError(f"{L} edges do not fit in a simple graph on {V} nodes")
    rng = _rng(seed)
    picks = np.sort(rng.choice(total, size=L, replace=False))
    iu, iv = np.triu_indices(V, k=1)
    return Network(V, _with_params(zip(iu[picks], iv[picks]), rng))


def rgg_radius(V: int, avg_degree: float) -> float:
    return math.sqrt(avg_degree / (V * math.pi))


def generate_rgg(V: int, avg_degree: float, seed: SeedLike = None) -> Network:
    """Random geometric graph in the unit square, no wrap-around.

    Nodes closer than ``r = sqrt(avg_degree / (V pi))`` are linked.
    """
    if V < 2:
        raise ConfigurationError(f"need at least two nodes, got V={V}")
    if avg_degree <= 0:
        raise ConfigurationError(f"average degree must be positive, got {avg_degree}")
    r = rgg_radius(V, avg_degree)
    if r >= 1.0:
        raise ConfigurationError(f"radius {r:.3f} must be below 1 (V={V}, <k>={avg_degree})")
    rng = _rng(seed)
    xy = rng.random((V, 2))
    pairs = sorted(
        (u, v)
        for u, v in cKDTree(xy).query_pairs(r)
        if math.dist(xy[u], xy[v]) < r
    )
    return Network(V, _with_params(pairs, rng), xy)


def generate(topology: str, V: int, avg_degree: float, seed: SeedLike = None) -> Network:
    if topology == "er":
        return generate_er(V, avg_degree, seed)
    if topology == "rgg":
        return generate_rgg(V, avg_degree, seed)
    raise ConfigurationError(f"unknown topology {topology!r}; expected 'er' or 'rgg'")
