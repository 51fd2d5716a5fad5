"""Entanglement routing over fidelity-vs-capacity curves."""

from __future__ import annotations

from .curves import (
    CapacityGrid,
    EnvelopeEntry,
    FidelityCurve,
    LinkParams,
    Model,
    build_link_curve,
    concat,
    concat_flow,
    concat_single,
    dominates,
    link_fidelity,
    merge_envelope,
    monotone_repair,
    success_probability,
)
from .errors import (
    ConfigurationError,
    FidrouteError,
    NetworkFormatError,
    NoRouteError,
    NoStarError,
    ParameterDomainError,
    UnreachableCapacityError,
    ValidationError,
)
from .multipartite import StarResult, ghz_fidelity, select_star, star_curve
from .network import Edge, Network, generate, generate_er, generate_rgg
from .routing import CurveRegistry, PathRecord, RoutingStats, extract_path, route_from_source

__version__ = "0.1.0"

__all__ = [
    "CapacityGrid",
    "ConfigurationError",
    "CurveRegistry",
    "Edge",
    "EnvelopeEntry",
    "FidelityCurve",
    "FidrouteError",
    "LinkParams",
    "Model",
    "Network",
    "NetworkFormatError",
    "NoRouteError",
    "NoStarError",
    "ParameterDomainError",
    "PathRecord",
    "RoutingStats",
    "StarResult",
    "UnreachableCapacityError",
    "ValidationError",
    "build_link_curve",
    "concat",
    "concat_flow",
    "concat_single",
    "dominates",
    "extract_path",
    "generate",
    "generate_er",
    "generate_rgg",
    "ghz_fidelity",
    "link_fidelity",
    "merge_envelope",
    "monotone_repair",
    "route_from_source",
    "select_star",
    "star_curve",
    "success_probability",
]
