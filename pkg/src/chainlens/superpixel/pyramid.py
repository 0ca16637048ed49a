"""Visual markers and three-layer semantic pyramids shown to the backend.

A pyramid presents one region at three scales: the tight crop, a context window
around it with the region marked, and the full image with the region marked.
Direct prompting instead marks and numbers every segment on the full image at once.
"""

from dataclasses import dataclass
from typing import List, Literal, Tuple, get_args

import numpy as np
import numpy.typing as npt
from PIL import Image, ImageDraw, ImageFont
from scipy import ndimage
from skimage.draw import disk
from skimage.segmentation import find_boundaries

from ..core.geometry import PixelBox, RasterSize
from ..raster import BinaryMask, ImageBuffer, mask_to_box
from ..raster.buffers import RGB

MarkerStyle = Literal["curve", "rectangle", "point"]
MARKER_STYLES: Tuple[str, ...] = get_args(MarkerStyle)


@dataclass(frozen=True)
class MarkerSpec:
    """How regions are outlined.

    Attributes:
        style: Marker shape
        color: Stroke color
        thickness: Stroke width in pixels (curve and rectangle)
        point_radius: Disc radius in pixels (point)
    """

    style: MarkerStyle = "curve"
    color: RGB = (255, 0, 0)
    thickness: int = 2
    point_radius: int = 3

    def validate(self) -> List[str]:
        """Validate marker parameters.

        Returns:
            List of error messages (empty if valid)
        """
        errors = []
        if self.style not in MARKER_STYLES:
            errors.append(f"Unknown marker style '{self.style}' (expected one of {MARKER_STYLES})")
        if self.thickness < 1:
            errors.append(f"Marker thickness must be at least 1 (got {self.thickness})")
        if self.point_radius < 1:
            errors.append(f"Point radius must be at least 1 (got {self.point_radius})")
        if any(not 0 <= c <= 255 for c in self.color):
            errors.append(f"Marker color {self.color} outside 8-bit range")
        return errors


def _as_bits(region: "npt.NDArray[np.bool_] | BinaryMask") -> npt.NDArray[np.bool_]:
    return region.bits if isinstance(region, BinaryMask) else np.asarray(region, dtype=bool)


def marker_pixels(
    region: npt.NDArray[np.bool_], spec: MarkerSpec = MarkerSpec()
) -> npt.NDArray[np.bool_]:
    """Pixels recolored when marking region."""
    box = mask_to_box(BinaryMask(region))
    if box is None:
        raise ValueError("Cannot mark an empty region")
    t = spec.thickness
    if spec.style == "curve":
        # inner contour, image edges count as boundary so the curve stays closed
        interior = ndimage.binary_erosion(region, iterations=t, border_value=0)
        return region & ~interior
    stroke = np.zeros_like(region, dtype=bool)
    if spec.style == "rectangle":
        stroke[box.slices()] = True
        if box.width > 2 * t and box.height > 2 * t:
            inner = PixelBox(box.x_min + t, box.y_min + t, box.x_max - t, box.y_max - t)
            stroke[inner.slices()] = False
        return stroke
    rows, cols = np.nonzero(region)
    center = (int(round(rows.mean())), int(round(cols.mean())))
    rr, cc = disk(center, spec.point_radius, shape=region.shape)
    stroke[rr, cc] = True
    return stroke


def draw_marker(
    image: ImageBuffer,
    region: "npt.NDArray[np.bool_] | BinaryMask",
    spec: MarkerSpec = MarkerSpec(),
) -> ImageBuffer:
    """Copy of image with region outlined; the input is untouched.

    Raises:
        ValueError: If the region is empty or does not match the image size
    """
    bits = _as_bits(region)
    if bits.shape != image.size.shape:
        raise ValueError(f"Region shape {bits.shape} does not match {image.size!r}")
    pixels = image.to_array()
    pixels[marker_pixels(bits, spec)] = np.asarray(spec.color, dtype=np.uint8)
    return ImageBuffer(pixels)


def draw_numbered_regions(
    image: ImageBuffer, labels: npt.NDArray[np.integer], spec: MarkerSpec = MarkerSpec()
) -> ImageBuffer:
    """Copy of image with every segment outlined and numbered (segment id + 1).

    Each number is printed white on black at the segment pixel farthest from its
    boundary, so it lands inside the segment even for concave shapes.

    Raises:
        ValueError: If labels do not match the image size
    """
    if labels.shape != image.size.shape:
        raise ValueError(f"Label shape {labels.shape} does not match {image.size!r}")
    pixels = image.to_array()
    pixels[find_boundaries(labels, mode="inner")] = np.asarray(spec.color, dtype=np.uint8)
    canvas = Image.fromarray(pixels)
    draw = ImageDraw.Draw(canvas)
    font = ImageFont.load_default()
    for segment in np.unique(labels):
        # padding makes the image border count as boundary
        inside = np.pad(labels == segment, 1)
        distance = ndimage.distance_transform_edt(inside)[1:-1, 1:-1]
        row, col = np.unravel_index(int(np.argmax(distance)), distance.shape)
        text = str(int(segment) + 1)
        left, top, right, bottom = draw.textbbox((0, 0), text, font=font)
        origin = (col - (right - left) / 2 - left, row - (bottom - top) / 2 - top)
        draw.text(
            origin, text, fill=(255, 255, 255), font=font, stroke_width=1, stroke_fill=(0, 0, 0)
        )
    return ImageBuffer(np.asarray(canvas))


@dataclass(frozen=True)
class SemanticPyramid:
    """Crop, context and full views of one region.

    Attributes:
        crop: Tight bounding-box crop, unmarked
        context: Context window with the region marked
        full: Whole image with the region marked
        crop_box: Bounds of the crop layer
        context_box: Bounds of the context layer
        marker: Marker used on the context and full layers
    """

    crop: ImageBuffer
    context: ImageBuffer
    full: ImageBuffer
    crop_box: PixelBox
    context_box: PixelBox
    marker: MarkerSpec

    @property
    def size(self) -> RasterSize:
        return self.full.size

    def layers(self) -> Tuple[ImageBuffer, ImageBuffer, ImageBuffer]:
        return (self.crop, self.context, self.full)


def context_window(box: PixelBox, size: RasterSize, context_factor: float = 2.0) -> PixelBox:
    """Box scaled about its center by context_factor and clipped to the raster."""
    if context_factor < 1.0:
        raise ValueError(f"context_factor must be at least 1 (got {context_factor})")
    return box.scaled(context_factor).clip(size)


def build_pyramid(
    image: ImageBuffer,
    region: "npt.NDArray[np.bool_] | BinaryMask",
    context_factor: float = 2.0,
    marker: MarkerSpec = MarkerSpec(),
) -> SemanticPyramid:
    """Three-layer view of a segment or cluster.

    Args:
        image: Image the layers are cut from
        region: Boolean mask of the segment or cluster
        context_factor: Scale of the context window relative to the tight box
        marker: Outline drawn on the context and full layers
    """
    bits = _as_bits(region)
    crop_box = mask_to_box(BinaryMask(bits))
    if crop_box is None:
        raise ValueError("Cannot build a pyramid for an empty region")
    context_box = context_window(crop_box, image.size, context_factor)
    marked = draw_marker(image, bits, marker)
    return SemanticPyramid(
        crop=image.crop(crop_box),
        context=marked.crop(context_box),
        full=marked,
        crop_box=crop_box,
        context_box=context_box,
        marker=marker,
    )
