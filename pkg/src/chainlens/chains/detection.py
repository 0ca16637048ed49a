"""Object detection as list-then-locate with a recursive grid search.

Localization asks, for every cell of a grid laid over the current window, whether any
part of an object of the class is inside the cell, and shrinks the window to the
smallest box covering the "yes" cells. Coarse 3x3 rounds repeat until nothing is
discarded. Fine rounds then alternate between splitting columns and rows with three
strips; in adaptive mode the outer strips start at the width of a coarse cell and
halve on every step, so each edge is pinned down by bisection.

``direct_boxes`` is the single-question baseline: it asks for coordinates instead.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple
import logging
import math

from ..backend import CoordinateQuery, NormalizedBox, PresenceQuery, QueryItem, Region
from ..core.domain import ClassVocabulary
from ..core.geometry import LabeledBox, PixelBox, RasterSize
from ..errors import InvalidAnswer, NotFound
from ..raster import ImageBuffer
from .base import ChainContext, GridParams
from .classification import ListStrategy, list_objects

logger = logging.getLogger(__name__)


def grid_cells(window: PixelBox, rows: int, cols: int) -> List[PixelBox]:
    """Partition a window into a rows x cols grid, row-major; empty cells are dropped."""
    xs = [window.x_min + (window.width * i) // cols for i in range(cols + 1)]
    ys = [window.y_min + (window.height * i) // rows for i in range(rows + 1)]
    return [
        PixelBox(xs[c], ys[r], xs[c + 1], ys[r + 1])
        for r in range(rows)
        for c in range(cols)
        if xs[c + 1] > xs[c] and ys[r + 1] > ys[r]
    ]


def edge_strips(window: PixelBox, axis: str, width: int) -> List[PixelBox]:
    """Outer strips of the given width on both sides of an axis, plus the middle."""
    lo, hi = (window.x_min, window.x_max) if axis == "x" else (window.y_min, window.y_max)
    edges = [lo, lo + width, hi - width, hi]
    strips = []
    for a, b in zip(edges, edges[1:]):
        if b <= a:
            continue
        if axis == "x":
            strips.append(PixelBox(a, window.y_min, b, window.y_max))
        else:
            strips.append(PixelBox(window.x_min, a, window.x_max, b))
    return strips


def cover(boxes: List[PixelBox]) -> PixelBox:
    result = boxes[0]
    for box in boxes[1:]:
        result = result.union(box)
    return result


@dataclass
class _GridSearch:
    ctx: ChainContext
    image_id: str
    canvas: ImageBuffer
    class_id: int
    class_name: str
    grid: GridParams
    window: PixelBox
    rounds: int = 0
    trace: List[PixelBox] = field(default_factory=list)

    def present(self, cell: PixelBox) -> bool:
        region = Region(self.image_id, self.canvas.size, box=cell)
        item = QueryItem(region, self.ctx.cell_views(self.canvas, cell))
        try:
            return bool(self.ctx.ask(PresenceQuery(item, self.class_id, self.class_name)).value)
        except InvalidAnswer as e:
            # an unanswered cell is kept so the window never loses the object on a bad reply
            logger.warning(
                "Presence of '%s' in %r unanswered, counted as present: %s",
                self.class_name,
                cell,
                e,
            )
            return True

    def exhausted(self) -> bool:
        small = max(self.window.width, self.window.height) <= self.grid.min_window
        return small or self.rounds >= self.grid.max_iterations

    def step(self, cells: List[PixelBox]) -> Optional[PixelBox]:
        """Ask about every cell; the cover of the "yes" cells, or None if all said no."""
        answers = self.ctx.map(self.present, cells)
        self.rounds += 1
        kept = [cell for cell, yes in zip(cells, answers) if yes]
        if not kept:
            if self.rounds == 1:
                raise NotFound(f"No '{self.class_name}' in any cell of image '{self.image_id}'")
            logger.debug("All cells answered no in round %d; keeping %r", self.rounds, self.window)
            return None
        return cover(kept)

    def update(self, window: PixelBox) -> bool:
        """Adopt a new window; True when it discarded anything."""
        shrunk = window != self.window
        self.window = window
        self.trace.append(window)
        return shrunk

    def coarse(self) -> bool:
        """Coarse rounds until convergence; False when the search has to stop."""
        rows, cols = self.grid.coarse
        while not self.exhausted():
            window = self.step(grid_cells(self.window, rows, cols))
            if window is None:
                return False
            if not self.update(window):
                return True
        return False

    def fine_uniform(self) -> None:
        layouts = [self.grid.fine, self.grid.fine[::-1]]
        idle = 0
        turn = 0
        while not self.exhausted() and idle < 2:
            rows, cols = layouts[turn % 2]
            turn += 1
            window = self.step(grid_cells(self.window, rows, cols))
            if window is None:
                return
            idle = idle + 1 if not self.update(window) else 0

    def fine_adaptive(self) -> None:
        rows, cols = self.grid.coarse
        # an edge lies within the outer coarse cell on its side
        margin = {
            "x": math.ceil(self.window.width / cols),
            "y": math.ceil(self.window.height / rows),
        }
        first = "x" if self.grid.fine[1] > self.grid.fine[0] else "y"
        order = [first, "y" if first == "x" else "x"]
        turn = 0
        while not self.exhausted():
            pending = [axis for axis in order if margin[axis] > 1]
            if not pending:
                return
            axis = pending[turn % len(pending)] if len(pending) > 1 else pending[0]
            turn += 1
            extent = self.window.width if axis == "x" else self.window.height
            width = min(math.ceil(margin[axis] / 2), extent // 2)
            if width == 0:
                margin[axis] = 1
                continue
            window = self.step(edge_strips(self.window, axis, width))
            if window is None:
                return
            self.update(window)
            margin[axis] = width

    def run(self) -> PixelBox:
        self.trace.append(self.window)
        if self.coarse():
            if self.grid.adaptive_fine:
                self.fine_adaptive()
            else:
                self.fine_uniform()
        return self.window


def locate_object(
    ctx: ChainContext,
    image_id: str,
    image: ImageBuffer,
    class_id: int,
    vocab: ClassVocabulary,
    grid: GridParams = GridParams(),
    trace: Optional[List[PixelBox]] = None,
) -> PixelBox:
    """Box around an object of the class by recursive grid search.

    Args:
        ctx: Chain context
        image_id: Dataset id of the image
        image: The image
        class_id: Vocabulary index of the class, assumed present
        vocab: Class vocabulary
        grid: Grid search settings
        trace: If given, receives the window after every round (starting with the
            full image)

    Returns:
        Final window, contained in the image

    Raises:
        NotFound: If every cell of the first grid answers no
    """
    errors = grid.validate()
    if errors:
        raise ValueError("; ".join(errors))
    search = _GridSearch(
        ctx=ctx,
        image_id=image_id,
        canvas=ctx.renderer.canvas(image),
        class_id=class_id,
        class_name=vocab.name_of(class_id),
        grid=grid,
        window=image.size.full_box(),
    )
    box = search.run()
    if trace is not None:
        trace.extend(search.trace)
    logger.debug("Located '%s' at %r after %d rounds", search.class_name, box, search.rounds)
    return box


def detect(
    ctx: ChainContext,
    image_id: str,
    image: ImageBuffer,
    vocab: ClassVocabulary,
    strategy: ListStrategy = "regions",
    grid: GridParams = GridParams(),
    not_found: Optional[List[int]] = None,
) -> List[LabeledBox]:
    """List the classes in an image, then locate one box per class with score 1.0.

    Classes whose localization raises NotFound are skipped and appended to not_found.
    """
    classes = sorted(list_objects(ctx, image_id, image, vocab, strategy))

    def locate(class_id: int) -> Tuple[int, Optional[PixelBox]]:
        try:
            return class_id, locate_object(ctx, image_id, image, class_id, vocab, grid)
        except NotFound as e:
            logger.info("%s", e)
            return class_id, None

    boxes = []
    for class_id, box in ctx.map(locate, classes):
        if box is None:
            if not_found is not None:
                not_found.append(class_id)
            continue
        boxes.append(LabeledBox(box, class_id, 1.0))
    return boxes


def to_pixel_box(box: NormalizedBox, size: RasterSize) -> Optional[PixelBox]:
    """Pixel box of a box given in fractions of the image size, clipped to the image.

    Returns:
        The box, or None when nothing of it is left after rounding and clipping
    """
    x0, x1 = (min(max(round(v * size.width), 0), size.width) for v in (box[0], box[2]))
    y0, y1 = (min(max(round(v * size.height), 0), size.height) for v in (box[1], box[3]))
    if x1 <= x0 or y1 <= y0:
        return None
    return PixelBox(x0, y0, x1, y1)


def direct_boxes(
    ctx: ChainContext,
    image_id: str,
    image: ImageBuffer,
    vocab: ClassVocabulary,
    strategy: ListStrategy = "regions",
    not_found: Optional[List[int]] = None,
) -> List[LabeledBox]:
    """Detection baseline that asks for box coordinates outright.

    Classes are listed exactly as in ``detect``; the grid search is then replaced by
    one question per class for the coordinates of its boxes, as fractions of the
    image size. Every returned box is kept with score 1.0. Classes that get no
    usable box, including unanswered questions, are appended to not_found.
    """
    classes = sorted(list_objects(ctx, image_id, image, vocab, strategy))
    canvas = ctx.renderer.canvas(image)
    item = QueryItem(Region(image_id, image.size), (canvas,) if ctx.renders else ())

    def ask(class_id: int) -> Tuple[NormalizedBox, ...]:
        name = vocab.name_of(class_id)
        try:
            return tuple(ctx.ask(CoordinateQuery(item, class_id, name)).value)
        except InvalidAnswer as e:
            logger.warning("Coordinates of '%s' in '%s' unanswered: %s", name, image_id, e)
            return ()

    boxes = []
    for class_id, answer in zip(classes, ctx.map(ask, classes)):
        found = [b for b in (to_pixel_box(n, image.size) for n in answer) if b is not None]
        if not found and not_found is not None:
            not_found.append(class_id)
        boxes.extend(LabeledBox(box, class_id, 1.0) for box in found)
    logger.debug("Direct boxes for '%s': %d", image_id, len(boxes))
    return boxes
