"""Image classification and object listing chains."""

from typing import List, Literal, Optional, Sequence, Tuple
import logging

from ..backend import MultiChoiceQuery, MultiLabelQuery, QueryItem, Region
from ..core.domain import ClassVocabulary
from ..core.geometry import PixelBox, RasterSize
from ..errors import InvalidAnswer
from ..raster import ImageBuffer
from .base import ChainContext

logger = logging.getLogger(__name__)

ListStrategy = Literal["whole", "regions"]
LIST_STRATEGIES: Tuple[str, ...] = ("whole", "regions")


def classify_batch(
    ctx: ChainContext,
    images: Sequence[Tuple[str, ImageBuffer]],
    vocab: ClassVocabulary,
    batch_size: int = 100,
) -> List[Optional[int]]:
    """Label every image with one vocabulary class.

    Images are sent batch_size at a time as one numbered multi-choice query. An image
    whose answer stays unparsable is labeled None.

    Args:
        ctx: Chain context
        images: (image id, image) pairs
        vocab: Class vocabulary; options are listed in id order
        batch_size: Images per query

    Returns:
        Class id (or None) per image, in input order
    """
    if batch_size < 1:
        raise ValueError(f"batch_size must be at least 1 (got {batch_size})")
    labels: List[Optional[int]] = []
    for start in range(0, len(images), batch_size):
        chunk = images[start : start + batch_size]
        items = []
        for image_id, image in chunk:
            canvas = ctx.renderer.canvas(image)
            views = (canvas,) if ctx.renders else ()
            items.append(QueryItem(Region(image_id, image.size), views))
        query = MultiChoiceQuery(tuple(items), vocab.names, template_id="classify")
        try:
            labels.extend(ctx.ask(query).value)
        except InvalidAnswer as e:
            logger.warning("Classification of '%s' failed: %s", chunk[0][0], e)
            labels.extend([None] * len(chunk))
    return labels


def _halves(extent: int) -> List[Tuple[int, int]]:
    middle = extent // 2
    return [(lo, hi) for lo, hi in ((0, middle), (middle, extent)) if hi > lo]


def listing_regions(size: RasterSize) -> List[PixelBox]:
    """The four quadrants followed by the centered half-size crop."""
    boxes = [
        PixelBox(x0, y0, x1, y1)
        for y0, y1 in _halves(size.height)
        for x0, x1 in _halves(size.width)
    ]
    cw, ch = max(size.width // 2, 1), max(size.height // 2, 1)
    cx, cy = (size.width - cw) // 2, (size.height - ch) // 2
    boxes.append(PixelBox(cx, cy, cx + cw, cy + ch))
    return boxes


def list_objects(
    ctx: ChainContext,
    image_id: str,
    image: ImageBuffer,
    vocab: ClassVocabulary,
    strategy: ListStrategy = "regions",
) -> frozenset:
    """Set of vocabulary classes present in an image.

    "whole" asks once about the full image. "regions" asks about each quadrant and
    the center crop, sending the full image as context, and returns the union.
    """
    if strategy not in LIST_STRATEGIES:
        raise ValueError(f"Unknown listing strategy '{strategy}'")
    canvas = ctx.renderer.canvas(image)
    if strategy == "whole":
        item = QueryItem(Region(image_id, image.size), (canvas,) if ctx.renders else ())
        return frozenset(ctx.ask(MultiLabelQuery(item, vocab.names)).value)

    def ask(box: PixelBox) -> frozenset:
        item = QueryItem(Region(image_id, image.size, box=box), ctx.cell_views(canvas, box))
        query = MultiLabelQuery(item, vocab.names, template_id="list_objects_region")
        return frozenset(ctx.ask(query).value)

    found: frozenset = frozenset()
    for labels in ctx.map(ask, listing_regions(image.size)):
        found |= labels
    return found
