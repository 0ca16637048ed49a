"""Superpixels, adjacency, semantic pyramids and pair sampling."""

from .slic import SuperpixelMap, slic
from .graph import AdjacencyGraph, adjacency
from .pyramid import (
    MARKER_STYLES,
    MarkerSpec,
    MarkerStyle,
    SemanticPyramid,
    build_pyramid,
    context_window,
    draw_marker,
    draw_numbered_regions,
    marker_pixels,
)
from .pairs import PairSample, sample_pairs

__all__ = [
    "SuperpixelMap",
    "slic",
    "AdjacencyGraph",
    "adjacency",
    "MARKER_STYLES",
    "MarkerSpec",
    "MarkerStyle",
    "SemanticPyramid",
    "build_pyramid",
    "context_window",
    "draw_marker",
    "draw_numbered_regions",
    "marker_pixels",
    "PairSample",
    "sample_pairs",
]
