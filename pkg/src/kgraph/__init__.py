"""Finite locally convex k-graphs: validation, path arithmetic, and invariants of their graph algebras."""

from .core import (
    Ambiguous,
    Edge,
    FormatError,
    KGraph,
    Skeleton,
    Square,
    ValidationError,
    adjacency,
    export_dot,
    infer_squares,
    parse_skeleton,
    serialize_skeleton,
    validate,
)

__version__ = "0.1.0"
