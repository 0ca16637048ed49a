"""Pairwise relations to global rank fields, scale/shift alignment and rasterization."""

from .comparisons import (
    BINARY_RELATIONS,
    NORMAL_AXES,
    TERNARY_RELATIONS,
    Axis,
    Comparison,
    ComparisonSet,
    Relation,
    relation_between,
)
from .objective import ObjectiveWeights, QuadraticObjective, assemble_objective
from .solver import RankField, solve_ranks
from .alignment import ScaleShift, scale_shift_fit
from .rasterize import floodfill_ranks, normalize_and_sphere, sphere_project

__all__ = [
    "BINARY_RELATIONS",
    "NORMAL_AXES",
    "TERNARY_RELATIONS",
    "Axis",
    "Comparison",
    "ComparisonSet",
    "Relation",
    "relation_between",
    "ObjectiveWeights",
    "QuadraticObjective",
    "assemble_objective",
    "RankField",
    "solve_ranks",
    "ScaleShift",
    "scale_shift_fit",
    "floodfill_ranks",
    "normalize_and_sphere",
    "sphere_project",
]
