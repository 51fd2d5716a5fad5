from __future__ import annotations

import json

import numpy as np
import pytest

from fidroute.bench import (
    CSV_HEADER,
    ScalingConfig,
    fit_power_law,
    fit_rows,
    read_csv,
    run_scaling,
    write_csv,
    write_fits,
)
from fidroute.errors import ConfigurationError, ParameterDomainError


def test_exact_power_law():
    x = np.array([10.0, 20.0, 40.0, 80.0])
    fit = fit_power_law(zip(x, 2 * x**1.3))
    assert fit.k == pytest.approx(2.0, abs=1e-9)
    assert fit.alpha == pytest.approx(1.3, abs=1e-9)
    assert fit.r_squared == pytest.approx(1.0)


def test_constant_data_has_zero_exponent():
    fit = fit_power_law([(1, 5), (2, 5), (4, 5)])
    assert fit.alpha == pytest.approx(0.0, abs=1e-12)


def test_noisy_linear_law():
    x = np.logspace(1, 3, 10)
    for seed in range(20):
        noise = np.random.default_rng(seed).normal(1.0, 0.01, x.size)
        assert 0.9 <= fit_power_law(zip(x, 5 * x * noise)).alpha <= 1.1


def test_fit_rejects_bad_points():
    with pytest.raises(ParameterDomainError):
        fit_power_law([(1, 1), (2, 0), (3, 1)])
    with pytest.raises(ParameterDomainError):
        fit_power_law([(1, 1), (2, 2)])


def test_small_campaign_is_deterministic(tmp_path):
    cfg = ScalingConfig(models=("flow", "single"), nodes=(20, 40), samples=3, seed=4, m=8, depth=20, timing=False)
    rows = run_scaling(cfg)
    assert rows == run_scaling(cfg)
    assert [(r.model, r.V) for r in rows] == [("flow", 20), ("flow", 40), ("single", 20), ("single", 40)]
    assert all(r.samples == 3 and r.time_mean == 0.0 for r in rows)
    path = tmp_path / "rows.csv"
    write_csv(rows, path)
    assert path.read_text().splitlines()[0] == ",".join(CSV_HEADER)
    assert read_csv(path) == rows


def test_visited_at_least_one_per_reachable_node():
    rows = run_scaling(ScalingConfig(nodes=(100,), samples=5, seed=1))
    assert rows[0].visited_mean >= 100
    assert rows[0].time_mean > 0


def test_star_campaign():
    cfg = ScalingConfig(topologies=("rgg",), nodes=(30,), samples=2, star=True, m=8, depth=20, timing=False)
    (row,) = run_scaling(cfg)
    assert row.topology == "rgg" and row.visited_mean > 0


def test_fit_rows_report(tmp_path):
    cfg = ScalingConfig(nodes=(20, 40, 80), samples=2, m=8, depth=20, timing=False)
    report = fit_rows(run_scaling(cfg), "visited")
    (entry,) = report
    assert entry["cell"] == {"topology": "er", "model": "flow", "k_avg": 6.0, "metric": "visited"}
    assert fit_rows(run_scaling(cfg), "time") == []
    path = tmp_path / "fit.json"
    write_fits(report, path)
    assert json.loads(path.read_text()) == report


def test_bad_config():
    with pytest.raises(ConfigurationError):
        ScalingConfig(topologies=("grid",))
    with pytest.raises(ConfigurationError):
        ScalingConfig(models=("burst",))
    with pytest.raises(ConfigurationError, match="V=3"):
        run_scaling(ScalingConfig(nodes=(3,), samples=1))
