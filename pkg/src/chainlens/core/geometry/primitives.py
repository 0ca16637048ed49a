"""Integer pixel geometry: raster sizes, points and half-open boxes."""

from dataclasses import dataclass
from typing import Optional
import math


@dataclass(frozen=True)
class RasterSize:
    """Raster extent in pixels."""

    width: int
    height: int

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError(f"Raster size must be positive (got {self.width}x{self.height})")

    @property
    def pixel_count(self) -> int:
        return self.width * self.height

    @property
    def shape(self) -> tuple[int, int]:
        """Numpy (rows, cols) shape."""
        return (self.height, self.width)

    def full_box(self) -> "PixelBox":
        """Box covering the whole raster."""
        return PixelBox(0, 0, self.width, self.height)

    def __repr__(self) -> str:
        return f"RasterSize({self.width}x{self.height})"


@dataclass(frozen=True)
class Point:
    """Pixel coordinate (column x, row y)."""

    x: int
    y: int

    def within(self, size: RasterSize) -> bool:
        """Whether the point lies inside a raster of the given size."""
        return 0 <= self.x < size.width and 0 <= self.y < size.height

    def offset(self, dx: int, dy: int) -> "Point":
        """Create new point offset by dx, dy."""
        return Point(self.x + dx, self.y + dy)


@dataclass(frozen=True)
class PixelBox:
    """Axis-aligned pixel rectangle, half-open on the max edges.

    Attributes:
        x_min: First column inside the box
        y_min: First row inside the box
        x_max: First column past the box
        y_max: First row past the box
    """

    x_min: int
    y_min: int
    x_max: int
    y_max: int

    def __post_init__(self) -> None:
        if self.x_min >= self.x_max or self.y_min >= self.y_max:
            raise ValueError(
                f"Degenerate box ({self.x_min}, {self.y_min}, {self.x_max}, {self.y_max})"
            )

    @property
    def width(self) -> int:
        return self.x_max - self.x_min

    @property
    def height(self) -> int:
        return self.y_max - self.y_min

    def area(self) -> int:
        """Pixel count of the box."""
        return self.width * self.height

    def bounds(self) -> tuple[int, int, int, int]:
        """
        Box corners.

        Returns:
            Tuple of (x_min, y_min, x_max, y_max)
        """
        return (self.x_min, self.y_min, self.x_max, self.y_max)

    def slices(self) -> tuple[slice, slice]:
        """Numpy (row, column) slices selecting the box."""
        return (slice(self.y_min, self.y_max), slice(self.x_min, self.x_max))

    def intersection(self, other: "PixelBox") -> Optional["PixelBox"]:
        """Overlap with another box, or None when they share no pixel."""
        x_min = max(self.x_min, other.x_min)
        y_min = max(self.y_min, other.y_min)
        x_max = min(self.x_max, other.x_max)
        y_max = min(self.y_max, other.y_max)
        if x_min >= x_max or y_min >= y_max:
            return None
        return PixelBox(x_min, y_min, x_max, y_max)

    def intersects(self, other: "PixelBox") -> bool:
        """Whether the boxes share at least one pixel."""
        return self.intersection(other) is not None

    def contains(self, other: "PixelBox") -> bool:
        """Whether other lies entirely inside this box."""
        return (
            self.x_min <= other.x_min
            and self.y_min <= other.y_min
            and other.x_max <= self.x_max
            and other.y_max <= self.y_max
        )

    def union(self, other: "PixelBox") -> "PixelBox":
        """Smallest box covering both boxes."""
        return PixelBox(
            min(self.x_min, other.x_min),
            min(self.y_min, other.y_min),
            max(self.x_max, other.x_max),
            max(self.y_max, other.y_max),
        )

    def within(self, size: RasterSize) -> bool:
        """Whether the box lies inside a raster of the given size."""
        return size.full_box().contains(self)

    def clip(self, size: RasterSize) -> "PixelBox":
        """Clip the box to the raster bounds.

        Raises:
            ValueError: If the box lies entirely outside the raster
        """
        clipped = self.intersection(size.full_box())
        if clipped is None:
            raise ValueError(f"{self!r} lies outside {size!r}")
        return clipped

    def scaled(self, factor: float) -> "PixelBox":
        """Scale the box about its center.

        Doubled-center arithmetic keeps the result integer and centered: a 10x10 box
        at (45, 45) scaled by 2 becomes the 20x20 box at (40, 40).
        """
        new_width = max(1, int(round(self.width * factor)))
        new_height = max(1, int(round(self.height * factor)))
        x_min = math.floor((self.x_min + self.x_max - new_width) / 2)
        y_min = math.floor((self.y_min + self.y_max - new_height) / 2)
        return PixelBox(x_min, y_min, x_min + new_width, y_min + new_height)

    def __repr__(self) -> str:
        return f"PixelBox({self.x_min}, {self.y_min}, {self.x_max}, {self.y_max})"


@dataclass(frozen=True)
class LabeledBox:
    """A detection or annotation: box, vocabulary index and confidence.

    Attributes:
        box: Pixel rectangle
        class_id: Zero-based vocabulary index
        score: Confidence in [0, 1]
    """

    box: PixelBox
    class_id: int
    score: float = 1.0

    def __post_init__(self) -> None:
        if self.class_id < 0:
            raise ValueError(f"Class id must be non-negative (got {self.class_id})")
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"Score must lie in [0, 1] (got {self.score})")


def box_iou(a: PixelBox, b: PixelBox) -> float:
    """Intersection over union of two boxes; 0.0 when disjoint."""
    overlap = a.intersection(b)
    if overlap is None:
        return 0.0
    inter = overlap.area()
    return inter / (a.area() + b.area() - inter)
