"""Catalog self-maps: expression tree, parser, evaluation and Taylor services."""
from .expr import (
    AtomicInner,
    Blaschke,
    Compose,
    Const,
    HalfPlane,
    Identity,
    MapExpr,
    Mobius,
    Monomial,
    Poly,
    Rational,
    Scale,
)
from .parser import GRAMMAR, parse_map, print_map
from .selfmap import (
    CATALOG,
    RATIONAL_CATALOG,
    SelfMap,
    TaylorSeries,
    ValidationReport,
    as_selfmap,
    boundary_value,
    eval_map,
    map_derivative,
    taylor_coefficients,
    validate_self_map,
)

__all__ = [
    "AtomicInner", "Blaschke", "CATALOG", "Compose", "Const", "GRAMMAR", "HalfPlane",
    "Identity", "MapExpr", "Mobius", "Monomial", "Poly", "RATIONAL_CATALOG", "Rational",
    "Scale", "SelfMap", "TaylorSeries", "ValidationReport", "as_selfmap", "boundary_value",
    "eval_map", "map_derivative", "parse_map", "print_map", "taylor_coefficients",
    "validate_self_map",
]
