"""Shared chain plumbing: grid parameters, rendering, execution context and outcomes."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from decimal import Decimal
from functools import wraps
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple, TypeVar
import logging

import numpy as np
import numpy.typing as npt

from ..backend import Answer, Query, Session, Transcript
from ..core.geometry import PixelBox
from ..raster import ImageBuffer
from ..raster.buffers import RGB
from ..superpixel import MarkerSpec, build_pyramid, draw_marker

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


@dataclass(frozen=True)
class GridParams:
    """Recursive grid search settings.

    Attributes:
        coarse: (rows, cols) of the coarse grid
        fine: (rows, cols) of the fine strip layout; its transpose alternates with it
        adaptive_fine: Use thin outer strips whose width halves on every fine step
            instead of an even partition
        max_iterations: Cap on query rounds (coarse and fine together)
        min_window: Stop once both window sides are at most this many pixels
    """

    coarse: Tuple[int, int] = (3, 3)
    fine: Tuple[int, int] = (1, 3)
    adaptive_fine: bool = True
    max_iterations: int = 10
    min_window: int = 1

    def validate(self) -> List[str]:
        """Validate grid parameters.

        Returns:
            List of error messages (empty if valid)
        """
        errors = []
        if min(self.coarse) < 1:
            errors.append(f"Coarse grid {self.coarse} must be at least 1x1")
        if min(self.fine) < 1:
            errors.append(f"Fine grid {self.fine} must be at least 1x1")
        if self.adaptive_fine and sorted(self.fine) != [1, 3]:
            errors.append(f"Adaptive fine strips need a 1x3 layout (got {self.fine})")
        if self.max_iterations < 1:
            errors.append(f"max_iterations must be at least 1 (got {self.max_iterations})")
        if self.min_window < 1:
            errors.append(f"min_window must be at least 1 (got {self.min_window})")
        return errors


@dataclass(frozen=True)
class Renderer:
    """How regions are turned into images for the backend.

    Attributes:
        marker: Outline style for regions
        context_factor: Context window scale relative to a region's tight box
        single_image: Send only the full image with the region marked instead of
            the three-layer pyramid (for backends limited to one image per prompt)
        blank_color: When set, every chain runs on a blank canvas of this color
    """

    marker: MarkerSpec = MarkerSpec()
    context_factor: float = 2.0
    single_image: bool = False
    blank_color: Optional[RGB] = None

    def validate(self) -> List[str]:
        errors = [f"marker: {e}" for e in self.marker.validate()]
        if self.context_factor < 1.0:
            errors.append(f"context_factor must be at least 1 (got {self.context_factor})")
        return errors

    def canvas(self, image: ImageBuffer) -> ImageBuffer:
        """The image chains work on: the input, or a blank raster of the same size."""
        if self.blank_color is None:
            return image
        return ImageBuffer.blank(image.size, self.blank_color)

    def region_views(
        self, canvas: ImageBuffer, region: npt.NDArray[np.bool_]
    ) -> Tuple[ImageBuffer, ...]:
        if self.single_image:
            return (draw_marker(canvas, region, self.marker),)
        return build_pyramid(canvas, region, self.context_factor, self.marker).layers()

    def cell_views(self, canvas: ImageBuffer, box: PixelBox) -> Tuple[ImageBuffer, ...]:
        """Grid cell crop plus the full image with the cell outlined."""
        bits = np.zeros(canvas.size.shape, dtype=bool)
        bits[box.slices()] = True
        full = draw_marker(canvas, bits, replace(self.marker, style="rectangle"))
        if self.single_image:
            return (full,)
        return (canvas.crop(box), full)


@dataclass
class ChainContext:
    """Everything a chain needs besides its task inputs.

    Attributes:
        session: Answers queries
        renderer: Builds the images attached to queries
        transcript: Collects the exchanges of this chain run
        workers: Threads used for independent queries (pairs, axes); 1 is sequential
    """

    session: Session
    renderer: Renderer = Renderer()
    transcript: Transcript = field(default_factory=Transcript)
    workers: int = 1

    @property
    def renders(self) -> bool:
        return self.session.renders_images

    def fork(self) -> "ChainContext":
        """Same session and renderer with a fresh transcript."""
        return replace(self, transcript=Transcript())

    def blind(self, blank_color: RGB = (0, 0, 0)) -> "ChainContext":
        return replace(self, renderer=replace(self.renderer, blank_color=blank_color))

    def region_views(
        self, canvas: ImageBuffer, region: npt.NDArray[np.bool_]
    ) -> Tuple[ImageBuffer, ...]:
        return self.renderer.region_views(canvas, region) if self.renders else ()

    def cell_views(self, canvas: ImageBuffer, box: PixelBox) -> Tuple[ImageBuffer, ...]:
        return self.renderer.cell_views(canvas, box) if self.renders else ()

    def ask(self, query: Query) -> Answer:
        return self.session.answer(query, self.transcript)

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
        """Apply fn to every item, in parallel when workers > 1; results keep item order."""
        items = list(items)
        if self.workers <= 1 or len(items) <= 1:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return list(pool.map(fn, items))

    def cost(self) -> Decimal:
        return self.session.cost_of(self.transcript)


@dataclass
class ChainOutcome:
    """Result of running one chain on one input.

    Attributes:
        payload: Task output (labels, boxes, mask, rank rasters)
        transcript: Exchanges behind the payload
        cost: Nominal API cost of the transcript in dollars
        details: Task-specific extras kept for scoring (comparisons, misses, ...)
    """

    payload: Any
    transcript: Transcript
    cost: Decimal = Decimal(0)
    details: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def of(cls, ctx: ChainContext, payload: Any, **details: Any) -> "ChainOutcome":
        return cls(payload, ctx.transcript, ctx.cost(), dict(details))


Chain = Callable[..., Any]


def blind_variant(chain: Chain, blank_color: RGB = (0, 0, 0)) -> Chain:
    """Wrap a chain so it runs on a blank canvas of each input's size.

    Grids, superpixels and markers are still produced, so the backend is forced to
    answer every sub-task without seeing the image.
    """

    @wraps(chain)
    def run(ctx: ChainContext, *args: Any, **kwargs: Any) -> Any:
        return chain(ctx.blind(blank_color), *args, **kwargs)

    return run
