from __future__ import annotations

import json

import numpy as np
import pytest

from fidroute.curves import LinkParams
from fidroute.errors import ConfigurationError, NetworkFormatError, ValidationError
from fidroute.network import (
    Edge,
    Network,
    generate,
    generate_er,
    generate_rgg,
    load,
    rgg_radius,
    sample_link_params,
    save,
)


def test_er_edge_count_and_simplicity():
    net = generate_er(100, 6, seed=11)
    assert net.L == 300
    pairs = {(min(e.u, e.v), max(e.u, e.v)) for e in net.edges}
    assert len(pairs) == 300
    assert all(e.u != e.v for e in net.edges)
    assert net.degrees().sum() == 600


def test_er_two_nodes():
    net = generate_er(2, 1, seed=0)
    assert [(e.u, e.v) for e in net.edges] == [(0, 1)]


def test_er_infeasible_edge_count():
    with pytest.raises(ConfigurationError):
        generate_er(4, 5, seed=0)


def test_generators_are_deterministic():
    assert generate_er(50, 4, seed=5) == generate_er(50, 4, seed=5)
    assert generate_er(50, 4, seed=5) != generate_er(50, 4, seed=6)
    a, b = generate_rgg(80, 6, seed=3), generate_rgg(80, 6, seed=3)
    assert a == b
    assert np.array_equal(a.coords, b.coords)


def test_rgg_edges_respect_radius():
    net = generate_rgg(200, 6, seed=1)
    r = rgg_radius(200, 6)
    for e in net.edges:
        assert np.hypot(*(net.coords[e.u] - net.coords[e.v])) < r
    # every close pair is linked
    d = np.hypot(*(net.coords[:, None, :] - net.coords[None, :, :]).transpose(2, 0, 1))
    assert int(np.sum(np.triu(d < r, k=1))) == net.L


def test_rgg_mean_degree():
    means = [generate_rgg(1000, 10, seed=s).degrees().mean() for s in range(20)]
    assert abs(np.mean(means) - 10) < 1.5


def test_rgg_radius_must_be_below_one():
    with pytest.raises(ConfigurationError):
        generate_rgg(2, 7, seed=0)


def test_unknown_topology():
    with pytest.raises(ConfigurationError):
        generate("ws", 10, 4, seed=0)


def test_sample_link_params_ranges():
    rng = np.random.default_rng(0)
    draws = [sample_link_params(rng) for _ in range(10_000)]
    eps = np.array([p.epsilon for p in draws])
    assert eps.min() >= 0.3 and eps.max() <= 0.4
    assert all(0 <= p.p_dark <= 1e-3 and 0 <= p.beta <= 1e-3 and p.n_e == 1 for p in draws)
    assert sample_link_params(9) == sample_link_params(9)


def test_sample_link_params_mean():
    rng = np.random.default_rng(1)
    eps = np.mean([sample_link_params(rng).epsilon for _ in range(100_000)])
    assert abs(eps - 0.35) < 0.001


def test_save_load_roundtrip(tmp_path):
    for net in (generate_er(30, 4, seed=2), generate_rgg(30, 4, seed=2)):
        path = tmp_path / "net.json"
        save(net, path)
        assert load(path) == net


def _write(tmp_path, data):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    return path


def _edge(u, v):
    return {"u": u, "v": v, "eps": 0.35, "p_dark": 0.0, "beta": 0.0, "n_e": 1.0}


def test_load_rejects_invariant_violations(tmp_path):
    with pytest.raises(ValidationError, match="duplicates"):
        load(_write(tmp_path, {"V": 3, "edges": [_edge(0, 1), _edge(1, 0)]}))
    with pytest.raises(ValidationError, match="outside"):
        load(_write(tmp_path, {"V": 3, "edges": [_edge(0, 3)]}))
    with pytest.raises(ValidationError, match="self-loop"):
        load(_write(tmp_path, {"V": 3, "edges": [_edge(2, 2)]}))
    bad = _edge(0, 1) | {"eps": 1.5}
    with pytest.raises(ValidationError, match=r"edges\[0\]"):
        load(_write(tmp_path, {"V": 3, "edges": [bad]}))


def test_load_reports_parse_context(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n "V": 3,\n "edges": [\n')
    with pytest.raises(NetworkFormatError, match="line 4"):
        load(path)
    missing = _edge(0, 1)
    del missing["beta"]
    with pytest.raises(NetworkFormatError, match=r"edges\[0\].*beta"):
        load(_write(tmp_path, {"V": 3, "edges": [missing]}))
    with pytest.raises(NetworkFormatError, match="V"):
        load(_write(tmp_path, {"V": "3", "edges": []}))


def test_adjacency_and_edge_lookup():
    p = LinkParams(0.35)
    net = Network(4, (Edge(0, 2, p), Edge(0, 1, p), Edge(2, 3, p)))
    assert net.adjacency[0] == ((1, 1), (2, 0))
    assert net.edge_between(3, 2) == 2
    with pytest.raises(KeyError):
        net.edge_between(1, 3)
