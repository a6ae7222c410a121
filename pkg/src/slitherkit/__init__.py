"""Tools for slitherings, circle actions and their invariants."""
from .circle_homeo import (
    GroupRepresentation,
    InvalidMapError,
    LiftedCircleMap,
    canonical_equal,
    commutator,
    compose,
    evaluate,
    fixed_points,
    inverse,
    power,
    word_evaluate,
)

__version__ = "0.1.0"
