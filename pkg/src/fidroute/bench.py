"""Scaling experiments: visited paths and wall-clock time against network size."""

from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .curves import CapacityGrid, Model
from .errors import ConfigurationError, NoStarError, ParameterDomainError
from .multipartite import select_star
from .network import generate
from .routing import route_from_source

CSV_HEADER = [
    "model",
    "topology",
    "k_avg",
    "V",
    "samples",
    "visited_mean",
    "visited_var",
    "time_mean",
    "time_var",
]

TOPOLOGIES = ("er", "rgg")


@dataclass(frozen=True)
class ScalingRow:
    model: str
    topology: str
    k_avg: float
    V: int
    samples: int
    visited_mean: float
    visited_var: float
    time_mean: float
    time_var: float


@dataclass(frozen=True)
class PowerLawFit:
    k: float
    alpha: float
    r_squared: float


@dataclass
class ScalingConfig:
    """One benchmark campaign.

    With ``star=True`` each sample runs the three-target star selection
    instead of a single source-to-all search; visited paths then sum over
    the three searches.  ``timing=False`` writes zero times so that output
    files are reproducible byte for byte.
    """

    topologies: Sequence[str] = ("er",)
    models: Sequence[str] = ("flow",)
    k_avg: Sequence[float] = (6.0,)
    nodes: Sequence[int] = (100, 200, 400, 800)
    samples: int = 10
    seed: int = 0
    m: int = 32
    depth: int = 40
    star: bool = False
    m_star: int = 8
    timing: bool = True

    def __post_init__(self) -> None:
        for t in self.topologies:
            if t not in TOPOLOGIES:
                raise ConfigurationError(f"unknown topology {t!r}")
        for mdl in self.models:
            Model.parse(mdl)
        if self.samples < 1:
            raise ConfigurationError("samples must be at least 1")

    @property
    def grid(self) -> CapacityGrid:
        return CapacityGrid(self.m, self.depth)


def _variance(x: np.ndarray) -> float:
    return float(np.var(x, ddof=1)) if x.size > 1 else 0.0


def _sample_rng(seed: int, topology: str, k_avg: float, V: int, sample: int) -> np.random.Generator:
    # the model is left out on purpose: both models see the same networks
    cell = [TOPOLOGIES.index(topology), int(round(k_avg * 1000)), V]
    return np.random.default_rng([seed, *cell, sample])


def _one_sample(cfg: ScalingConfig, topology: str, model: Model, k_avg: float, V: int, sample: int):
    rng = _sample_rng(cfg.seed, topology, k_avg, V, sample)
    try:
        net = generate(topology, V, k_avg, rng)
    except ConfigurationError as exc:
        raise ConfigurationError(f"cell ({topology}, <k>={k_avg}, V={V}): {exc}") from exc
    grid = cfg.grid
    if not cfg.star:
        source = int(rng.integers(V))
        t0 = time.perf_counter()
        _, stats = route_from_source(net, source, model, grid)
        elapsed = time.perf_counter() - t0
        return stats.visited_paths, elapsed

    targets = [int(t) for t in rng.choice(V, size=3, replace=False)]
    t0 = time.perf_counter()
    links = net.link_curves(grid)
    runs = [route_from_source(net, t, model, grid, link_curves=links) for t in targets]
    try:
        select_star(net, *targets, model, grid, m_star=cfg.m_star, registries=[r for r, _ in runs])
    except NoStarError:
        pass
    elapsed = time.perf_counter() - t0
    return sum(s.visited_paths for _, s in runs), elapsed


def run_scaling(cfg: ScalingConfig) -> list[ScalingRow]:
    rows = []
    for topology in cfg.topologies:
        for model_name in cfg.models:
            model = Model.parse(model_name)
            for k_avg in cfg.k_avg:
                for V in cfg.nodes:
                    visited = np.empty(cfg.samples)
                    elapsed = np.empty(cfg.samples)
                    for s in range(cfg.samples):
                        visited[s], elapsed[s] = _one_sample(cfg, topology, model, k_avg, V, s)
                    if not cfg.timing:
                        elapsed[:] = 0.0
                    rows.append(
                        ScalingRow(
                            model=model.value,
                            topology=topology,
                            k_avg=float(k_avg),
                            V=int(V),
                            samples=cfg.samples,
                            visited_mean=float(visited.mean()),
                            visited_var=_variance(visited),
                            time_mean=float(elapsed.mean()),
                            time_var=_variance(elapsed),
                        )
                    )
    return rows


def fit_power_law(points: Iterable[tuple[float, float]]) -> PowerLawFit:
    """Least-squares fit of ``Y = k X**alpha`` in log-log space."""
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3:
        raise ParameterDomainError("a power-law fit needs at least three (X, Y) points")
    if np.any(pts <= 0):
        raise ParameterDomainError("power-law fit requires positive X and Y")
    lx, ly = np.log(pts[:, 0]), np.log(pts[:, 1])
    alpha, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (alpha * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return PowerLawFit(k=float(np.exp(intercept)), alpha=float(alpha), r_squared=r2)


def fit_rows(rows: Sequence[ScalingRow], metric: str = "visited") -> list[dict[str, Any]]:
    """One fit per (topology, model, <k>) over the rows with a positive mean."""
    column = {"visited": "visited_mean", "time": "time_mean"}[metric]
    cells: dict[tuple[str, str, float], list[tuple[float, float]]] = {}
    for r in rows:
        y = getattr(r, column)
        if y > 0:
            cells.setdefault((r.topology, r.model, r.k_avg), []).append((r.V, y))
    report = []
    for (topology, model, k_avg), pts in cells.items():
        if len(pts) < 3:
            continue
        fit = fit_power_law(pts)
        report.append(
            {
                "cell": {"topology": topology, "model": model, "k_avg": k_avg, "metric": metric},
                "k": fit.k,
                "alpha": fit.alpha,
                "r2": fit.r_squared,
            }
        )
    return report


def write_csv(rows: Sequence[ScalingRow], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(CSV_HEADER)
        for r in rows:
            d = asdict(r)
            out.writerow([repr(d[c]) if isinstance(d[c], float) else d[c] for c in CSV_HEADER])


def read_csv(path: str | Path) -> list[ScalingRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise ConfigurationError(f"unexpected benchmark header {reader.fieldnames}")
        return [
            ScalingRow(
                model=rec["model"],
                topology=rec["topology"],
                k_avg=float(rec["k_avg"]),
                V=int(rec["V"]),
                samples=int(rec["samples"]),
                visited_mean=float(rec["visited_mean"]),
                visited_var=float(rec["visited_var"]),
                time_mean=float(rec["time_mean"]),
                time_var=float(rec["time_var"]),
            )
            for rec in reader
        ]


def write_fits(report: Sequence[dict[str, Any]], path: str | Path) -> None:
    Path(path).write_text(json.dumps(list(report), indent=1) + "\n", encoding="utf-8")
