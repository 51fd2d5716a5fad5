from __future__ import annotations

import io

import numpy as np
import pytest

from fidroute.curves import CapacityGrid, FidelityCurve, LinkParams, Model, build_link_curve
from fidroute.errors import NoRouteError, ParameterDomainError
from fidroute.network import Edge, Network, generate_er, generate_rgg
from fidroute.oracle import OracleConfig, brute_force_envelope
from fidroute.routing import extract_path, plain_hop_priority, route_from_source

GRID = CapacityGrid(8, 20)
P = LinkParams(0.35, 1e-4, 1e-4)


def chain(*params: LinkParams) -> Network:
    return Network(len(params) + 1, tuple(Edge(i, i + 1, p) for i, p in enumerate(params)))


@pytest.mark.parametrize("model", list(Model))
def test_single_link(model):
    net = chain(P)
    reg, stats = route_from_source(net, 0, model, GRID)
    assert reg.curve(1) == build_link_curve(P, GRID)
    assert stats.visited_paths == 2
    assert np.all(reg.gamma[0] == 1.0)


@pytest.mark.parametrize("model", list(Model))
def test_ideal_direct_link_takes_every_point(model):
    net = Network(3, (Edge(0, 1, P), Edge(1, 2, P), Edge(0, 2, LinkParams(0.35))))
    reg, _ = route_from_source(net, 0, model, GRID)
    ids = set(reg.path_ids[2][reg.path_ids[2] >= 0].tolist())
    assert {reg.paths[i].nodes for i in ids} == {(0, 2)}


@pytest.mark.parametrize("model", list(Model))
def test_matches_oracle_on_small_er(model):
    for seed in range(10):
        net = generate_er(8, 4, seed=seed)
        reg, _ = route_from_source(net, 0, model, GRID)
        ref = brute_force_envelope(net, 0, model, OracleConfig(max_hops=7, grid=GRID), check_joint=False)
        assert np.max(np.abs(reg.gamma - ref)) <= 1e-12


@pytest.mark.parametrize("model", list(Model))
def test_pruning_keeps_envelopes(model):
    net = generate_er(8, 4, seed=3)
    pruned, s1 = route_from_source(net, 0, model, GRID)
    full, s2 = route_from_source(net, 0, model, GRID, prune=False)
    assert np.array_equal(pruned.gamma, full.gamma)
    assert s1.visited_paths <= s2.visited_paths


def test_max_hops_limits_paths():
    net = chain(P, P, P)
    reg, _ = route_from_source(net, 0, Model.FLOW, GRID, max_hops=2)
    assert reg.reachable() == [0, 1, 2]
    with pytest.raises(ParameterDomainError):
        route_from_source(net, 0, Model.FLOW, GRID, max_hops=-1)


def test_invalid_source():
    with pytest.raises(ParameterDomainError):
        route_from_source(chain(P), 5, Model.FLOW, GRID)


def test_extract_source_is_empty_path():
    reg, _ = route_from_source(chain(P), 0, Model.FLOW, GRID)
    choice = extract_path(reg, 0, 0.01)
    assert choice.path.nodes == (0,)
    assert choice.gamma == 1.0 and choice.fidelity == 1.0


def test_extract_flow_chain_runs_links_uniformly():
    net = chain(P, P, P)
    reg, _ = route_from_source(net, 0, Model.FLOW, GRID)
    c = GRID.capacity(40)
    choice = extract_path(reg, 3, c)
    assert choice.path.nodes == (0, 1, 2, 3)
    assert choice.link_capacities == (c, c, c)


def test_extract_single_split_matches_brute_force():
    a, b = LinkParams(0.3, 1e-4, 1e-3), LinkParams(0.4, 1e-5, 0.0)
    net = chain(a, b)
    reg, _ = route_from_source(net, 0, Model.SINGLE, GRID)
    ca, cb = build_link_curve(a, GRID).values, build_link_curve(b, GRID).values
    for k in (GRID.m + 3, 60, 120):
        choice = extract_path(reg, 2, GRID.capacity(k))
        c1, c2 = choice.link_capacities
        assert c1 * c2 == pytest.approx(GRID.capacity(k), rel=1e-12)
        best = max(ca[i] * cb[k - GRID.m - i] for i in range(k - GRID.m + 1))
        assert choice.gamma == best
        i, j = GRID.index_at_or_below(c1), GRID.index_at_or_below(c2)
        assert ca[i] * cb[j] == best


def test_extract_unreachable_point():
    reg, _ = route_from_source(chain(P), 0, Model.SINGLE, GRID)
    with pytest.raises(NoRouteError):
        extract_path(reg, 1, 0.5)
    isolated = Network(3, (Edge(0, 1, P),))
    reg, _ = route_from_source(isolated, 0, Model.FLOW, GRID)
    with pytest.raises(NoRouteError):
        extract_path(reg, 2, 0.01)


def test_operating_capacities_sit_on_plateau_edge():
    dark = LinkParams(0.35, p_dark=1e-3)
    reg, _ = route_from_source(chain(dark), 0, Model.FLOW, CapacityGrid(8, 40))
    choice = extract_path(reg, 1, 1e-11)
    assert choice.operating_capacities[0] > choice.link_capacities[0]


def test_registry_outputs():
    net = generate_er(6, 3, seed=1)
    reg, _ = route_from_source(net, 0, Model.FLOW, GRID)
    data = reg.to_dict()
    assert data["source"] == 0 and data["model"] == "flow"
    assert len(data["nodes"]["3"]["gamma"]) == GRID.size
    buf = io.StringIO()
    reg.write_csv(buf)
    rows = buf.getvalue().splitlines()
    assert rows[0] == "node,capacity,gamma,fidelity"
    assert len(rows) == 1 + net.V * GRID.size
    for row in rows[1:50]:
        _, _, g, f = row.split(",")
        assert float(f) == (3 * float(g) + 1) / 4


def test_link_curves_override_is_used():
    net = chain(P)
    fake = [FidelityCurve.constant(GRID, 0.5)]
    reg, _ = route_from_source(net, 0, Model.FLOW, GRID, link_curves=fake)
    assert np.all(reg.gamma[1] == 0.5)


@pytest.mark.parametrize("model", list(Model))
def test_queue_order_does_not_change_envelopes(model):
    net = generate_rgg(25, 5, seed=2)
    ref, _ = route_from_source(net, 0, model, GRID)
    for priority in (plain_hop_priority, lambda hops, curve: -float(curve.values.max())):
        reg, _ = route_from_source(net, 0, model, GRID, priority=priority)
        assert np.array_equal(reg.gamma, ref.gamma)
