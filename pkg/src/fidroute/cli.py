"""Command-line entry point: ``fidroute {gen,route,star,verify,bench}``.

Every command accepts ``--config FILE`` (a JSON object keyed by option
name); explicit flags override file values.  The effective configuration is
echoed next to the primary output as ``<out>.config.json`` and can be fed
back through ``--config`` to regenerate the file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Callable, Sequence

from . import bench, network
from .curves import CapacityGrid, Model
from .errors import ConfigurationError, FidrouteError
from .multipartite import select_star
from .oracle import verify
from .routing import route_from_source

OUTPUT_DIR_ENV = "FIDROUTE_OUTPUT_DIR"

# option name -> (type tag, default); None default means required
SCHEMAS: dict[str, dict[str, tuple[str, Any]]] = {
    "gen": {
        "topology": ("str", "er"),
        "nodes": ("int", None),
        "avg_degree": ("float", None),
        "seed": ("int", 0),
        "out": ("str", None),
    },
    "route": {
        "net": ("str", None),
        "source": ("int", 0),
        "model": ("str", "flow"),
        "m": ("int", 32),
        "depth": ("int", 40),
        "max_hops": ("int?", None),
        "out": ("str", None),
    },
    "star": {
        "net": ("str", None),
        "targets": ("list[int]", None),
        "model": ("str", "flow"),
        "m": ("int", 32),
        "depth": ("int", 40),
        "m_star": ("int", 8),
        "out": ("str", None),
    },
    "verify": {
        "instances": ("int", 50),
        "star_instances": ("int", 5),
        "seed": ("int", 0),
        "out": ("str?", None),
    },
    "bench": {
        "topology": ("list[str]", ["er"]),
        "model": ("list[str]", ["flow"]),
        "avg_degree": ("list[float]", [6.0]),
        "nodes": ("list[int]", [100, 200, 400]),
        "samples": ("int", 10),
        "seed": ("int", 0),
        "m": ("int", 32),
        "depth": ("int", 40),
        "star": ("bool", False),
        "m_star": ("int", 8),
        "timing": ("bool", True),
        "out": ("str", None),
        "fit_out": ("str?", None),
    },
}

# options that are optional but may legitimately be null
_NULLABLE = {"int?", "str?"}


def _check_type(tag: str, value: Any, key: str) -> Any:
    def bad() -> ConfigurationError:
        return ConfigurationError(f"config key '{key}': expected {tag}, got {type(value).__name__}")

    if value is None and tag in _NULLABLE:
        return None
    base = tag.rstrip("?")
    if base == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise bad()
        return value
    if base == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise bad()
        return float(value)
    if base == "str":
        if not isinstance(value, str):
            raise bad()
        return value
    if base == "bool":
        if not isinstance(value, bool):
            raise bad()
        return value
    if base.startswith("list["):
        inner = base[5:-1]
        if not isinstance(value, list):
            raise bad()
        return [_check_type(inner, v, f"{key}[{i}]") for i, v in enumerate(value)]
    raise AssertionError(tag)


def load_config(path: str | Path | None, command: str) -> dict[str, Any]:
    """Validated option values from a JSON config file (empty when ``path`` is None)."""
    if path is None:
        return {}
    text = Path(path).read_text(encoding="utf-8").strip()
    if not text:
        return {}
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: config must be a JSON object")
    data = dict(data)
    declared = data.pop("command", command)
    if declared != command:
        raise ConfigurationError(f"{path}: config is for '{declared}', not '{command}'")
    schema = SCHEMAS[command]
    unknown = sorted(set(data) - set(schema))
    if unknown:
        raise ConfigurationError(f"{path}: unknown config keys: {', '.join(unknown)}")
    return {k: _check_type(schema[k][0], v, k) for k, v in data.items()}


def effective_config(command: str, file_values: dict[str, Any], flags: dict[str, Any]) -> dict[str, Any]:
    schema = SCHEMAS[command]
    merged = {k: default for k, (_, default) in schema.items()}
    merged.update(file_values)
    merged.update({k: v for k, v in flags.items() if k in schema and v is not None})
    missing = [k for k, (tag, _) in schema.items() if merged[k] is None and tag not in _NULLABLE]
    if missing:
        raise ConfigurationError(f"missing required options: {', '.join('--' + m.replace('_', '-') for m in missing)}")
    return merged


def _resolve(path: str) -> Path:
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def _write_json(path: Path, payload: Any) -> None:
    path.write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")


def _echo(out: Path, command: str, cfg: dict[str, Any]) -> None:
    _write_json(out.with_name(out.name + ".config.json"), {"command": command, **cfg})


# -- commands --------------------------------------------------------------


def _cmd_gen(cfg: dict[str, Any]) -> None:
    net = network.generate(cfg["topology"], cfg["nodes"], cfg["avg_degree"], cfg["seed"])
    network.save(net, _resolve(cfg["out"]))


def _cmd_route(cfg: dict[str, Any]) -> None:
    net = network.load(cfg["net"])
    grid = CapacityGrid(cfg["m"], cfg["depth"])
    reg, _ = route_from_source(net, cfg["source"], Model.parse(cfg["model"]), grid, cfg["max_hops"])
    out = _resolve(cfg["out"])
    if out.suffix == ".json":
        _write_json(out, reg.to_dict())
    else:
        reg.write_csv(out)


def _cmd_star(cfg: dict[str, Any]) -> None:
    if len(cfg["targets"]) != 3:
        raise ConfigurationError("--targets takes exactly three node ids")
    net = network.load(cfg["net"])
    grid = CapacityGrid(cfg["m"], cfg["depth"])
    res = select_star(net, *cfg["targets"], Model.parse(cfg["model"]), grid, m_star=cfg["m_star"])
    out = _resolve(cfg["out"])
    if out.suffix == ".json":
        _write_json(out, res.to_dict())
    else:
        res.write_csv(out)


def _cmd_verify(cfg: dict[str, Any]) -> bool:
    results = verify(cfg["instances"], cfg["seed"], cfg["star_instances"])
    lines = [f"1..{len(results)}"]
    lines += [f"{'ok' if ok else 'not ok'} {n} - {desc}" for n, (ok, desc) in enumerate(results, 1)]
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if cfg["out"]:
        _resolve(cfg["out"]).write_text(text, encoding="utf-8")
    return all(ok for ok, _ in results)


def _cmd_bench(cfg: dict[str, Any]) -> None:
    sc = bench.ScalingConfig(
        topologies=tuple(cfg["topology"]),
        models=tuple(cfg["model"]),
        k_avg=tuple(cfg["avg_degree"]),
        nodes=tuple(cfg["nodes"]),
        samples=cfg["samples"],
        seed=cfg["seed"],
        m=cfg["m"],
        depth=cfg["depth"],
        star=cfg["star"],
        m_star=cfg["m_star"],
        timing=cfg["timing"],
    )
    rows = bench.run_scaling(sc)
    bench.write_csv(rows, _resolve(cfg["out"]))
    if cfg["fit_out"]:
        report = bench.fit_rows(rows, "visited")
        if sc.timing:
            report += bench.fit_rows(rows, "time")
        bench.write_fits(report, _resolve(cfg["fit_out"]))


COMMANDS: dict[str, Callable[[dict[str, Any]], Any]] = {
    "gen": _cmd_gen,
    "route": _cmd_route,
    "star": _cmd_star,
    "verify": _cmd_verify,
    "bench": _cmd_bench,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fidroute",
        description="Entanglement routing over fidelity-vs-capacity curves.",
        epilog=f"Relative output paths are resolved against ${OUTPUT_DIR_ENV} when set.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON file of option values; flags override it")

    def grid_opts(p: argparse.ArgumentParser) -> None:
        p.add_argument("--m", type=int, help="grid points per octave of capacity (default 32)")
        p.add_argument("--depth", type=int, help="octaves spanned by the grid (default 40)")

    p = sub.add_parser("gen", help="generate a random network and write it as JSON")
    common(p)
    p.add_argument("--topology", choices=["er", "rgg"], help="Erdos-Renyi or random geometric (default er)")
    p.add_argument("--nodes", type=int, help="number of nodes V")
    p.add_argument("--avg-degree", type=float, help="average degree <k>")
    p.add_argument("--seed", type=int, help="RNG seed (default 0)")
    p.add_argument("--out", help="output network JSON")

    p = sub.add_parser("route", help="source-to-all routing; CSV rows or registry JSON")
    common(p)
    p.add_argument("--net", help="network JSON produced by 'gen'")
    p.add_argument("--source", type=int, help="source node (default 0)")
    p.add_argument("--model", choices=["single", "flow"], help="distribution model (default flow)")
    grid_opts(p)
    p.add_argument("--max-hops", type=int, help="longest path considered (default unlimited)")
    p.add_argument("--out", help="output file; .json writes the registry, anything else CSV")

    p = sub.add_parser("star", help="best three-party star for three targets")
    common(p)
    p.add_argument("--net", help="network JSON produced by 'gen'")
    p.add_argument("--targets", type=int, nargs=3, metavar="T", help="three distinct target nodes")
    p.add_argument("--model", choices=["single", "flow"], help="distribution model (default flow)")
    grid_opts(p)
    p.add_argument("--m-star", type=int, help="points per octave of the single-model star search (default 8)")
    p.add_argument("--out", help="output file; .json or CSV")

    p = sub.add_parser("verify", help="check the engine against brute-force oracles (TAP output)")
    common(p)
    p.add_argument("--instances", type=int, help="instances per bipartite and split suite (default 50)")
    p.add_argument("--star-instances", type=int, help="instances of the star suite (default 5)")
    p.add_argument("--seed", type=int, help="RNG seed (default 0)")
    p.add_argument("--out", help="also write the TAP report here")

    p = sub.add_parser("bench", help="scaling benchmark; CSV rows plus power-law fits")
    common(p)
    p.add_argument("--topology", nargs="+", choices=["er", "rgg"], help="topologies (default er)")
    p.add_argument("--model", nargs="+", choices=["single", "flow"], help="models (default flow)")
    p.add_argument("--avg-degree", type=float, nargs="+", help="average degrees (default 6)")
    p.add_argument("--nodes", type=int, nargs="+", help="network sizes (default 100 200 400)")
    p.add_argument("--samples", type=int, help="networks per cell (default 10)")
    p.add_argument("--seed", type=int, help="RNG seed (default 0)")
    grid_opts(p)
    p.add_argument("--star", action="store_const", const=True, help="benchmark star selection instead")
    p.add_argument("--m-star", type=int, help="points per octave of the single-model star search (default 8)")
    p.add_argument(
        "--no-timing",
        dest="timing",
        action="store_const",
        const=False,
        help="write zero times so reruns are byte-identical",
    )
    p.add_argument("--out", help="output CSV")
    p.add_argument("--fit-out", help="power-law fit report JSON")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    command = args.command
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        cfg = effective_config(command, load_config(args.config, command), flags)
        ok = COMMANDS[command](cfg)
        if cfg.get("out"):
            _echo(_resolve(cfg["out"]), command, cfg)
    except (FidrouteError, OSError) as exc:
        msg = " ".join(str(exc).split())
        print(f"error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return 1
    return 0 if ok is not False else 1


if __name__ == "__main__":
    sys.exit(main())
