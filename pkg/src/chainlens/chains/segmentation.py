"""Semantic segmentation by classifying superpixels."""

from typing import List, Optional, Tuple
import logging

import numpy as np

from ..backend import MultiChoiceQuery, QueryItem, Region
from ..core.domain import ClassVocabulary
from ..errors import InvalidAnswer
from ..raster import ImageBuffer, IndexMask
from ..superpixel import SuperpixelMap, draw_numbered_regions, slic
from .base import ChainContext

logger = logging.getLogger(__name__)

IGNORE_INDEX = 255


def fill_segments(
    spmap: SuperpixelMap, classes: List[Optional[int]], ignore_index: int = IGNORE_INDEX
) -> IndexMask:
    """Flood-fill every segment with its class; None becomes ignore_index."""
    if len(classes) != spmap.k:
        raise ValueError(f"Got {len(classes)} classes for {spmap.k} segments")
    lut = np.array([ignore_index if c is None else c for c in classes], dtype=np.int64)
    return IndexMask(lut[spmap.labels], ignore_index=ignore_index)


def _sentinel(vocab: ClassVocabulary, ignore_index: Optional[int]) -> int:
    if ignore_index is None:
        return vocab.ignore_index
    errors = vocab.ignore_index_errors(ignore_index)
    if errors:
        raise ValueError("; ".join(errors))
    return ignore_index


def segment_image(
    ctx: ChainContext,
    image_id: str,
    image: ImageBuffer,
    vocab: ClassVocabulary,
    k: int = 100,
    batch_size: int = 16,
    history: bool = True,
    compactness: float = 10.0,
    ignore_index: Optional[int] = None,
) -> IndexMask:
    """Label every pixel by classifying superpixels in sequential batches.

    Each batch query carries the answers of all earlier batches when history is on,
    so batches are never reordered or run concurrently.

    Args:
        ctx: Chain context; the renderer decides pyramid or single-image views
        image_id: Dataset id of the image
        image: The image
        vocab: Class vocabulary
        k: Target superpixel count
        batch_size: Superpixels per query
        history: Append earlier (region, class) answers to every query
        compactness: SLIC compactness
        ignore_index: Label for superpixels left unanswered; defaults to the
            vocabulary's sentinel

    Returns:
        Mask with every pixel labeled
    """
    if batch_size < 1:
        raise ValueError(f"batch_size must be at least 1 (got {batch_size})")
    ignore_index = _sentinel(vocab, ignore_index)
    canvas = ctx.renderer.canvas(image)
    spmap = slic(canvas, k, compactness=compactness)
    classes: List[Optional[int]] = []
    answered: List[Tuple[str, str]] = []
    for start in range(0, spmap.k, batch_size):
        segments = range(start, min(start + batch_size, spmap.k))
        items = []
        for segment in segments:
            bits = spmap.segment_mask(segment)
            region = Region(image_id, image.size, mask=bits)
            items.append(QueryItem(region, ctx.region_views(canvas, bits)))
        query = MultiChoiceQuery(
            tuple(items),
            vocab.names,
            history=tuple(answered) if history else (),
            template_id="segment",
        )
        try:
            values = list(ctx.ask(query).value)
        except InvalidAnswer as e:
            logger.warning(
                "Segments %d-%d of '%s' unanswered: %s", start, segments[-1], image_id, e
            )
            values = [None] * len(items)
        classes.extend(values)
        answered.extend(
            (f"region {segment + 1}", vocab.name_of(value))
            for segment, value in zip(segments, values)
            if value is not None
        )
    logger.debug("Segmented '%s' into %d superpixels", image_id, spmap.k)
    return fill_segments(spmap, classes, ignore_index)


def segment_direct(
    ctx: ChainContext,
    image_id: str,
    image: ImageBuffer,
    vocab: ClassVocabulary,
    k: int = 100,
    compactness: float = 10.0,
    ignore_index: Optional[int] = None,
) -> IndexMask:
    """Segmentation baseline that labels every superpixel in one question.

    The backend gets a single image with all superpixels outlined and numbered, and
    none of the crops or context views ``segment_image`` sends, and answers with
    one class per number. Superpixels left unanswered get ignore_index.

    Args:
        ctx: Chain context; only its marker color is used for rendering
        image_id: Dataset id of the image
        image: The image
        vocab: Class vocabulary
        k: Target superpixel count
        compactness: SLIC compactness
        ignore_index: Label for unanswered superpixels; defaults to the vocabulary's

    Returns:
        Mask with every pixel labeled
    """
    ignore_index = _sentinel(vocab, ignore_index)
    canvas = ctx.renderer.canvas(image)
    spmap = slic(canvas, k, compactness=compactness)
    shared: Tuple[ImageBuffer, ...] = ()
    if ctx.renders:
        shared = (draw_numbered_regions(canvas, spmap.labels, ctx.renderer.marker),)
    items = tuple(
        QueryItem(Region(image_id, image.size, mask=spmap.segment_mask(segment)))
        for segment in range(spmap.k)
    )
    query = MultiChoiceQuery(items, vocab.names, template_id="segment_direct", shared=shared)
    try:
        classes: List[Optional[int]] = list(ctx.ask(query).value)
    except InvalidAnswer as e:
        logger.warning("Direct segmentation of '%s' unanswered: %s", image_id, e)
        classes = [None] * spmap.k
    logger.debug("Segmented '%s' directly into %d superpixels", image_id, spmap.k)
    return fill_segments(spmap, classes, ignore_index)
