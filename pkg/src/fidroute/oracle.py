"""Brute-force references for the routing engine and the curve algebra.

Nothing here shares code with the priority-queue search: paths are
enumerated depth-first, single-ebit concatenation is an explicit outer
product, and split optimality is checked against exhaustive capacity
assignments.  Only tiny instances and coarse grids are practical.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .curves import CapacityGrid, FidelityCurve, LinkParams, Model, build_link_curve, concat_single
from .errors import ConfigurationError, NoStarError, OracleInfeasibleError, ParameterDomainError
from .multipartite import _ghz, select_star
from .network import Network, generate
from .routing import route_from_source


class OracleMismatchError(AssertionError):
    """Two exhaustive computations that must agree did not."""


@dataclass(frozen=True)
class OracleConfig:
    max_hops: int = 7
    grid: CapacityGrid = field(default_factory=lambda: CapacityGrid(8, 20))
    #: enumeration guard
    max_paths: int = 200_000
    #: largest tensor built by the exhaustive split search
    max_tensor: int = 2_000_000

    def __post_init__(self) -> None:
        if self.max_hops < 1:
            raise ConfigurationError(f"max_hops must be at least 1, got {self.max_hops}")


def simple_paths(
    network: Network, source: int, max_hops: int, max_paths: int = 200_000
) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Every simple path from ``source`` with 1..max_hops links as ``(nodes, edges)``."""
    count = 0
    stack = [((source,), ())]
    while stack:
        nodes, edges = stack.pop()
        if edges:
            count += 1
            if count > max_paths:
                raise OracleInfeasibleError(f"more than {max_paths} simple paths from {source}")
            yield nodes, edges
        if len(edges) == max_hops:
            continue
        for nbr, e in network.adjacency[nodes[-1]]:
            if nbr not in nodes:
                stack.append((nodes + (nbr,), edges + (e,)))


def _antidiagonal_max(mat: np.ndarray) -> np.ndarray:
    """``out[s] = max_{i + j = s} mat[i, j]`` for a non-negative matrix."""
    n, m = mat.shape
    out = np.zeros(n + m - 1)
    for i in range(n):
        np.maximum(out[i : i + m], mat[i], out=out[i : i + m])
    return out


def outer_concat_single(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    """Reference single-ebit concatenation from the full outer product."""
    K = a.size
    diag = _antidiagonal_max(np.multiply.outer(a, b))
    out = np.zeros(K)
    n = max(K - m, 0)
    out[m:] = diag[:n]
    return out


def path_curve(links: Sequence[np.ndarray], model: Model | str, m: int) -> np.ndarray:
    """Curve of a path by sequential concatenation from its first link."""
    model = Model.parse(model)
    cur = np.asarray(links[0], dtype=float)
    for nxt in links[1:]:
        cur = cur * nxt if model is Model.FLOW else outer_concat_single(cur, nxt, m)
    return cur


@functools.lru_cache(maxsize=16)
def _index_sum_groups(K: int, L: int, m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sort order of all ``K**L`` index tuples by ``sum + (L-1) m``, on-grid keys only."""
    key = np.zeros((K,) * L, dtype=np.int64)
    for axis in range(L):
        shape = [1] * L
        shape[axis] = K
        key = key + np.arange(K).reshape(shape)
    key = key.ravel() + (L - 1) * m
    order = np.argsort(key, kind="stable")
    order = order[key[order] < K]
    keys, starts = np.unique(key[order], return_index=True)
    return order, keys, starts


def _max_by_index_sum(values: np.ndarray, K: int, L: int, m: int) -> np.ndarray:
    order, keys, starts = _index_sum_groups(K, L, m)
    out = np.zeros(K)
    if order.size:
        out[keys] = np.maximum.reduceat(values.ravel()[order], starts)
    return out


def joint_single_curve(links: Sequence[FidelityCurve | np.ndarray], grid: CapacityGrid) -> np.ndarray:
    """Best product over every assignment of grid capacities to the links.

    Capacities multiply along the path, so the assignment ``(i_1 .. i_L)``
    lands on index ``sum(i) + (L - 1) m``; points below the grid floor are
    dropped.
    """
    vals = [np.asarray(l.values if isinstance(l, FidelityCurve) else l, dtype=float) for l in links]
    K, L = grid.size, len(vals)
    if K**L > 50_000_000:
        raise OracleInfeasibleError(f"{K}^{L} capacity assignments exceed the enumeration guard")
    prod = vals[0]
    for v in vals[1:]:
        prod = np.multiply.outer(prod, v)
    return _max_by_index_sum(prod, K, L, grid.m)


def joint_single_gamma(links: Sequence[FidelityCurve | np.ndarray], c: float, grid: CapacityGrid) -> float:
    try:
        k = grid.index_at_or_below(c)
    except ParameterDomainError:
        return 0.0
    return float(joint_single_curve(links, grid)[k])


def uniform_flow_check(
    links: Sequence[FidelityCurve | np.ndarray], grid: CapacityGrid, tol: float = 1e-12
) -> bool:
    """True when running every link at the path rate is optimal for the flow model.

    Every assignment whose smallest capacity equals the path rate is
    compared against the uniform assignment.
    """
    vals = [np.asarray(l.values if isinstance(l, FidelityCurve) else l, dtype=float) for l in links]
    K = grid.size
    if K ** len(vals) > 50_000_000:
        raise OracleInfeasibleError("too many capacity assignments to enumerate")
    uniform = np.prod(np.stack(vals), axis=0)
    prod = vals[0]
    deepest = np.arange(K)
    for v in vals[1:]:
        prod = np.multiply.outer(prod, v)
        deepest = np.maximum.outer(deepest, np.arange(K))
    return bool(np.all(prod <= uniform[deepest] + tol))


def brute_force_envelope(
    network: Network,
    source: int,
    model: Model | str,
    config: OracleConfig | None = None,
    *,
    check_joint: bool = True,
) -> np.ndarray:
    """Pointwise best Werner parameter over all simple paths, shape ``(V, K)``.

    For the single-ebit model the sequential curve of every path short
    enough to enumerate is also checked against :func:`joint_single_curve`.
    """
    model = Model.parse(model)
    config = config or OracleConfig()
    grid = config.grid
    links = [np.maximum.accumulate(_link_values(e.params, grid)) for e in network.edges]
    env = np.zeros((network.V, grid.size))
    env[source] = 1.0
    for nodes, edges in simple_paths(network, source, config.max_hops, config.max_paths):
        seq = [links[e] for e in edges]
        curve = path_curve(seq, model, grid.m)
        if model is Model.SINGLE and check_joint and grid.size ** len(seq) <= config.max_tensor:
            joint = joint_single_curve(seq, grid)
            if not np.allclose(joint, curve, rtol=0, atol=1e-12):
                raise OracleMismatchError(f"sequential concatenation is not optimal on path {nodes}")
        np.maximum(env[nodes[-1]], curve, out=env[nodes[-1]])
    return env


def _link_values(params, grid: CapacityGrid) -> np.ndarray:
    # direct evaluation of the channel formulas, independent of curves.py
    with np.errstate(divide="ignore", invalid="ignore"):
        p = grid.capacities / params.n_e
        p_em = -(2.0 / params.epsilon) * np.log(1.0 - 2.0 * p)
        succ = (1.0 - np.exp(-p_em * params.epsilon / 2.0)) / 2.0
        dark = params.p_dark / succ if params.p_dark > 0 else 0.0
        f = 0.5 * (1.0 + np.exp(-p_em * (1.0 - params.epsilon))) - dark - params.beta
        gamma = np.clip((4.0 * f - 1.0) / 3.0, 0.0, 1.0)
    return np.where(p < 0.5 - 1e-9, gamma, 0.0)


def star_exhaustive(arms: Sequence[np.ndarray | None], model: Model | str, m: int) -> np.ndarray:
    """Best GHZ fidelity per rate over every triple of arm capacities.

    ``None`` marks an empty arm (center equals that target).
    """
    model = Model.parse(model)
    present = [a for a in arms if a is not None]
    K = present[0].size
    full = [np.ones(K) if a is None else np.asarray(a, dtype=float) for a in arms]
    if model is Model.FLOW:
        ok = np.all([a > 0 for a in full], axis=0)
        return np.where(ok, _ghz(*full), 0.0)
    if K ** len(present) > 50_000_000:
        raise OracleInfeasibleError("too many capacity triples to enumerate")
    grids = np.meshgrid(*[np.arange(K)] * len(present), indexing="ij")
    gam = [a[g] for a, g in zip(present, grids)]
    it = iter(gam)
    f = _ghz(*[1.0 if a is None else next(it) for a in arms])
    ok = np.all([g > 0 for g in gam], axis=0)
    return _max_by_index_sum(np.where(ok, f, 0.0), K, len(present), m)


def brute_force_star(
    network: Network,
    targets: tuple[int, int, int],
    model: Model | str,
    config: OracleConfig | None = None,
    *,
    per_path: bool = False,
) -> np.ndarray:
    """Best star fidelity per grid point over all centers, paths and splits.

    With ``per_path=True`` every triple of simple paths is scored on its
    own; otherwise each arm uses the oracle envelope from its target, which
    gives the same maximum because the GHZ fidelity is non-decreasing in
    every arm.
    """
    model = Model.parse(model)
    config = config or OracleConfig()
    grid = config.grid
    best = np.zeros(grid.size)
    if not per_path:
        envs = [brute_force_envelope(network, t, model, config, check_joint=False) for t in targets]
        for s in range(network.V):
            arms = [None if s == t else env[s] for t, env in zip(targets, envs)]
            if any(a is not None and not np.any(a > 0) for a in arms):
                continue
            np.maximum(best, star_exhaustive(arms, model, grid.m), out=best)
        return best

    links = [np.maximum.accumulate(_link_values(e.params, grid)) for e in network.edges]
    curves: list[dict[int, list[np.ndarray]]] = []
    for t in targets:
        per_node: dict[int, list[np.ndarray]] = {}
        for nodes, edges in simple_paths(network, t, config.max_hops, config.max_paths):
            per_node.setdefault(nodes[-1], []).append(
                path_curve([links[e] for e in edges], model, grid.m)
            )
        curves.append(per_node)
    for s in range(network.V):
        options = [[None] if s == t else per.get(s, []) for t, per in zip(targets, curves)]
        for arms in itertools.product(*options):
            np.maximum(best, star_exhaustive(list(arms), model, grid.m), out=best)
    return best


# -- verification suites ---------------------------------------------------


def random_link_params(rng: np.random.Generator):
    """Link parameters over a wider range than the benchmarks, for stress tests."""
    return LinkParams(
        epsilon=float(rng.uniform(0.05, 0.95)),
        p_dark=float(10 ** rng.uniform(-6, -2)),
        beta=float(rng.uniform(0.0, 0.05)),
        n_e=float(rng.choice([1.0, rng.uniform(0.2, 1.0)])),
    )


def parenthesizations(n: int) -> list:
    """All binary bracketings of ``n`` leaves as nested tuples of leaf indices."""

    def build(lo: int, hi: int) -> list:
        if hi - lo == 1:
            return [lo]
        out = []
        for mid in range(lo + 1, hi):
            out += [(a, b) for a in build(lo, mid) for b in build(mid, hi)]
        return out

    return build(0, n)


def evaluate_bracketing(tree, curves: Sequence[FidelityCurve]) -> FidelityCurve:
    if isinstance(tree, int):
        return curves[tree]
    return concat_single(evaluate_bracketing(tree[0], curves), evaluate_bracketing(tree[1], curves))


def grid_for_path_length(L: int) -> CapacityGrid:
    """Largest oracle grid whose exhaustive assignment tensor stays small."""
    return CapacityGrid(8, 20) if L <= 3 else CapacityGrid(4, 10)


def sequential_split_check(curves: Sequence[FidelityCurve], tol: float = 1e-12) -> tuple[float, float]:
    """Deviation of iterated concatenation from the joint optimum and across bracketings."""
    grid = curves[0].grid
    joint = joint_single_curve(curves, grid)
    results = [evaluate_bracketing(t, curves).values for t in parenthesizations(len(curves))]
    to_joint = max(float(np.max(np.abs(r - joint))) for r in results)
    spread = max(float(np.max(np.abs(r - results[0]))) for r in results)
    return to_joint, spread


def verify(instances: int = 50, seed: int = 0, star_instances: int = 5) -> list[tuple[bool, str]]:
    """Run every oracle suite; returns ``(passed, description)`` per instance."""
    results: list[tuple[bool, str]] = []
    config = OracleConfig()
    grid = config.grid

    for n in range(instances):
        rng = np.random.default_rng([seed, 1, n])
        topology = ("er", "rgg")[n % 2]
        model = (Model.FLOW, Model.SINGLE)[(n // 2) % 2]
        V = int(rng.integers(5, 11))
        net = generate(topology, V, 4.0, rng)
        source = int(rng.integers(V))
        hops = min(V - 1, config.max_hops)
        reg, _ = route_from_source(net, source, model, grid, max_hops=hops)
        ref = brute_force_envelope(net, source, model, OracleConfig(max_hops=hops, grid=grid))
        err = float(np.max(np.abs(reg.gamma - ref)))
        results.append(
            (err <= 1e-12, f"bipartite {topology} {model.value} V={V} seed={seed}/{n} maxerr={err:.2e}")
        )

    for n in range(instances):
        rng = np.random.default_rng([seed, 2, n])
        L = int(rng.integers(2, 5))
        g = grid_for_path_length(L)
        curves = [build_link_curve(random_link_params(rng), g) for _ in range(L)]
        to_joint, spread = sequential_split_check(curves)
        ok = to_joint <= 1e-12 and spread <= 1e-12
        results.append((ok, f"sequential-split L={L} seed={seed}/{n} joint={to_joint:.2e} bracketing={spread:.2e}"))

    for n in range(instances):
        rng = np.random.default_rng([seed, 3, n])
        curves = [build_link_curve(random_link_params(rng), grid) for _ in range(3)]
        results.append((uniform_flow_check(curves, grid), f"uniform-flow L=3 seed={seed}/{n}"))

    for n in range(star_instances):
        rng = np.random.default_rng([seed, 4, n])
        model = (Model.FLOW, Model.SINGLE)[n % 2]
        net = generate("er", 8, 4.0, rng)
        targets = tuple(int(t) for t in rng.choice(8, size=3, replace=False))
        ref = brute_force_star(net, targets, model, config)
        try:
            got = select_star(net, *targets, model, grid, m_star=grid.m).values
        except NoStarError:
            got = np.zeros(grid.size)
        err = float(np.max(np.abs(got - ref)))
        results.append((err <= 1e-12, f"star {model.value} targets={targets} seed={seed}/{n} maxerr={err:.2e}"))
    return results
