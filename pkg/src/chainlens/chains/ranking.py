"""Relative depth and surface normal estimation from pairwise segment comparisons."""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple
import logging

from ..backend import PairOrderQuery, QueryItem, Region
from ..errors import InvalidAnswer
from ..globalize import (
    BINARY_RELATIONS,
    NORMAL_AXES,
    TERNARY_RELATIONS,
    Axis,
    Comparison,
    ComparisonSet,
    ObjectiveWeights,
    RankField,
    Relation,
    assemble_objective,
    floodfill_ranks,
    normalize_and_sphere,
    solve_ranks,
)
from ..raster import FloatRaster, ImageBuffer
from ..superpixel import AdjacencyGraph, PairSample, SuperpixelMap, adjacency, sample_pairs, slic
from .base import ChainContext

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RankEstimate:
    """Globalized ranks along one axis.

    Attributes:
        axis: Compared quantity
        spmap: Superpixels the ranks belong to
        pairs: Sampled pairs in query order
        comparisons: Answered pairs (unanswered ones are dropped)
        field: Per-segment ranks
        raster: Ranks flood-filled to pixels
    """

    axis: Axis
    spmap: SuperpixelMap
    pairs: Tuple[PairSample, ...]
    comparisons: ComparisonSet
    field: RankField
    raster: FloatRaster


@dataclass(frozen=True, eq=False)
class NormalEstimate:
    """Rank fields for the three camera axes."""

    x: RankEstimate
    y: RankEstimate
    z: RankEstimate

    def rasters(self) -> Tuple[FloatRaster, FloatRaster, FloatRaster]:
        return (self.x.raster, self.y.raster, self.z.raster)

    def sphere(self) -> ImageBuffer:
        """Unit-sphere visualization of the three rank fields."""
        return normalize_and_sphere(self.rasters())


@dataclass(frozen=True)
class _Segments:
    """Superpixels of one image and the query items showing them."""

    image_id: str
    spmap: SuperpixelMap
    graph: AdjacencyGraph
    pairs: Tuple[PairSample, ...]
    items: Dict[int, QueryItem]


def _prepare(
    ctx: ChainContext,
    image_id: str,
    image: ImageBuffer,
    k: int,
    n_pairs: int,
    seed: int,
    compactness: float,
) -> _Segments:
    if k < 2:
        raise ValueError(f"Pairwise ranking needs k >= 2 (got {k})")
    canvas = ctx.renderer.canvas(image)
    spmap = slic(canvas, k, compactness=compactness)
    pairs = tuple(sample_pairs(spmap, n_pairs, seed))
    items = {}
    for segment in sorted({s for p in pairs for s in (p.i, p.j)}):
        bits = spmap.segment_mask(segment)
        items[segment] = QueryItem(
            Region(image_id, image.size, mask=bits), ctx.region_views(canvas, bits)
        )
    return _Segments(image_id, spmap, adjacency(spmap), pairs, items)


def _rank_axis(
    ctx: ChainContext,
    segments: _Segments,
    axis: Axis,
    relations: Tuple[Relation, ...],
    weights: ObjectiveWeights,
    template_id: str,
    order: Optional[Sequence[int]] = None,
) -> RankEstimate:
    pairs = segments.pairs if order is None else tuple(segments.pairs[n] for n in order)

    def compare(pair: PairSample) -> Optional[Comparison]:
        query = PairOrderQuery(
            segments.items[pair.i], segments.items[pair.j], axis, relations, template_id
        )
        try:
            return Comparison(pair.i, pair.j, ctx.ask(query).value)
        except InvalidAnswer as e:
            logger.warning(
                "Pair (%d, %d) of '%s' unanswered on %s: %s",
                pair.i,
                pair.j,
                segments.image_id,
                axis.value,
                e,
            )
            return None

    answered = [c for c in ctx.map(compare, pairs) if c is not None]
    comparisons = ComparisonSet.build(axis, segments.spmap.k, answered)
    field = solve_ranks(assemble_objective(comparisons, segments.graph, weights))
    logger.debug(
        "Ranked %d segments of '%s' on %s from %d comparisons",
        field.k,
        segments.image_id,
        axis.value,
        len(comparisons),
    )
    return RankEstimate(
        axis, segments.spmap, pairs, comparisons, field, floodfill_ranks(segments.spmap, field)
    )


def estimate_depth_ranks(
    ctx: ChainContext,
    image_id: str,
    image: ImageBuffer,
    k: int = 100,
    n_pairs: int = 200,
    weights: ObjectiveWeights = ObjectiveWeights(),
    seed: int = 0,
    ternary: bool = False,
    compactness: float = 10.0,
) -> RankEstimate:
    """Relative depth: larger ranks lie farther from the camera.

    Args:
        ctx: Chain context
        image_id: Dataset id of the image
        image: The image
        k: Target superpixel count, at least 2
        n_pairs: Pairs to compare (capped at k(k-1)/2)
        weights: Comparison and smoothness weights
        seed: Pair sampling seed
        ternary: Also allow "equal" answers
        compactness: SLIC compactness
    """
    segments = _prepare(ctx, image_id, image, k, n_pairs, seed, compactness)
    relations = TERNARY_RELATIONS if ternary else BINARY_RELATIONS
    return _rank_axis(ctx, segments, Axis.DEPTH, relations, weights, "depth_order")


def estimate_normal_ranks(
    ctx: ChainContext,
    image_id: str,
    image: ImageBuffer,
    k: int = 100,
    n_pairs: int = 200,
    weights: ObjectiveWeights = ObjectiveWeights(),
    seed: int = 0,
    ternary: bool = True,
    compactness: float = 10.0,
    pair_orders: Optional[Dict[Axis, List[int]]] = None,
) -> NormalEstimate:
    """Per-axis ranks of the surface normal components along the camera axes.

    The same sampled pairs are compared on x, y and z, and each axis is globalized on
    its own.

    Args:
        pair_orders: Optional per-axis permutation of the sampled pairs, changing the
            order in which that axis asks them
    """
    segments = _prepare(ctx, image_id, image, k, n_pairs, seed, compactness)
    relations = TERNARY_RELATIONS if ternary else BINARY_RELATIONS
    orders = pair_orders or {}

    def rank(axis: Axis) -> RankEstimate:
        return _rank_axis(
            ctx, segments, axis, relations, weights, "normal_order", orders.get(axis)
        )

    x, y, z = ctx.map(rank, NORMAL_AXES)
    return NormalEstimate(x, y, z)
