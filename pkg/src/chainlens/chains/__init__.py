"""Task chains: each vision task reduced to a sequence of backend queries."""

from .base import (
    ChainContext,
    ChainOutcome,
    GridParams,
    Renderer,
    blind_variant,
)
from .classification import LIST_STRATEGIES, ListStrategy, classify_batch, list_objects
from .detection import detect, direct_boxes, edge_strips, grid_cells, locate_object, to_pixel_box
from .segmentation import IGNORE_INDEX, fill_segments, segment_direct, segment_image
from .grouping import group_point
from .ranking import NormalEstimate, RankEstimate, estimate_depth_ranks, estimate_normal_ranks

__all__ = [
    "ChainContext",
    "ChainOutcome",
    "GridParams",
    "Renderer",
    "blind_variant",
    "LIST_STRATEGIES",
    "ListStrategy",
    "classify_batch",
    "list_objects",
    "detect",
    "direct_boxes",
    "edge_strips",
    "grid_cells",
    "locate_object",
    "to_pixel_box",
    "IGNORE_INDEX",
    "fill_segments",
    "segment_direct",
    "segment_image",
    "group_point",
    "NormalEstimate",
    "RankEstimate",
    "estimate_depth_ranks",
    "estimate_normal_ranks",
]
