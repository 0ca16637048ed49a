"""Perceptual grouping: grow the object under a point one superpixel ring at a time."""

from typing import Set
import logging

from ..backend import QueryItem, Region, SameObjectQuery
from ..core.geometry import Point
from ..errors import InvalidAnswer
from ..raster import BinaryMask, ImageBuffer
from ..superpixel import adjacency, slic
from .base import ChainContext

logger = logging.getLogger(__name__)


def group_point(
    ctx: ChainContext,
    image_id: str,
    image: ImageBuffer,
    point: Point,
    k: int = 100,
    compactness: float = 10.0,
) -> BinaryMask:
    """Mask of the object under point.

    Starting from the superpixel holding the point, every round asks, for each
    frontier superpixel, whether it belongs with the cluster accepted so far. The
    cluster shown is the one from the start of the round, so answers within a round
    do not depend on their order. Rejected superpixels are never asked again.

    Raises:
        ValueError: If the point lies outside the image
    """
    if not point.within(image.size):
        raise ValueError(f"{point!r} lies outside {image.size!r}")
    canvas = ctx.renderer.canvas(image)
    spmap = slic(canvas, k, compactness=compactness)
    graph = adjacency(spmap)
    seed = spmap.segment_at(point)
    accepted: Set[int] = {seed}
    rejected: Set[int] = set()
    frontier = set(graph.neighbours(seed))
    rounds = 0
    while frontier:
        rounds += 1
        cluster_bits = spmap.region_mask(accepted)
        cluster = QueryItem(
            Region(image_id, image.size, mask=cluster_bits),
            ctx.region_views(canvas, cluster_bits),
        )

        def same(segment: int) -> bool:
            bits = spmap.segment_mask(segment)
            candidate = QueryItem(
                Region(image_id, image.size, mask=bits), ctx.region_views(canvas, bits)
            )
            try:
                return bool(ctx.ask(SameObjectQuery(candidate, cluster, point)).value)
            except InvalidAnswer as e:
                logger.warning("Segment %d of '%s' left out: %s", segment, image_id, e)
                return False

        candidates = sorted(frontier)
        joined = {s for s, yes in zip(candidates, ctx.map(same, candidates)) if yes}
        rejected |= frontier - joined
        accepted |= joined
        frontier = {n for s in joined for n in graph.neighbours(s)} - accepted - rejected
    logger.debug(
        "Grouped %d of %d superpixels around %r in %d rounds", len(accepted), spmap.k, point, rounds
    )
    return BinaryMask(spmap.region_mask(accepted))
