"""Decoding of object masks painted by image-generation models.

The model receives a zero-padded square image and paints the object in a flat color;
the painted region is recovered by an HSV window and reduced to its largest
4-connected component.
"""

from dataclasses import dataclass
from typing import List

import numpy as np
from scipy import ndimage
from skimage.color import rgb2hsv

from ..core.geometry import PixelBox, Point, RasterSize
from .buffers import BinaryMask, ImageBuffer


@dataclass(frozen=True)
class HueWindow:
    """Circular hue interval plus saturation/value floors.

    Attributes:
        center_deg: Hue center in degrees
        half_width_deg: Accepted distance from the center in degrees
        min_saturation: Saturation floor in [0, 1]
        min_value: Value (brightness) floor in [0, 1]
    """

    center_deg: float = 0.0
    half_width_deg: float = 10.0
    min_saturation: float = 0.5
    min_value: float = 0.3

    def validate(self) -> List[str]:
        """Validate window parameters.

        Returns:
            List of error messages (empty if valid)
        """
        errors = []
        if not 0.0 <= self.half_width_deg <= 180.0:
            errors.append(f"Hue half width {self.half_width_deg} outside [0, 180] degrees")
        if not 0.0 <= self.min_saturation <= 1.0:
            errors.append(f"Saturation floor {self.min_saturation} outside [0, 1]")
        if not 0.0 <= self.min_value <= 1.0:
            errors.append(f"Value floor {self.min_value} outside [0, 1]")
        return errors


def pad_to_square(image: ImageBuffer) -> tuple[ImageBuffer, Point]:
    """Zero-pad an image to S x S with S = max(width, height), content centered.

    Returns:
        The padded image and the offset of the original content
    """
    size = image.size
    side = max(size.width, size.height)
    offset = Point((side - size.width) // 2, (side - size.height) // 2)
    padded = np.zeros((side, side, 3), dtype=np.uint8)
    padded[offset.y : offset.y + size.height, offset.x : offset.x + size.width] = image.pixels
    return ImageBuffer(padded), offset


def crop_from_square(padded: ImageBuffer, offset: Point, size: RasterSize) -> ImageBuffer:
    """Inverse of pad_to_square."""
    return padded.crop(PixelBox(offset.x, offset.y, offset.x + size.width, offset.y + size.height))


def largest_component(bits: np.ndarray) -> np.ndarray:
    """Keep the largest 4-connected component (lowest label on ties)."""
    labels, count = ndimage.label(bits)
    if count == 0:
        return np.zeros_like(bits, dtype=bool)
    sizes = np.bincount(labels.ravel())
    sizes[0] = 0
    return labels == int(np.argmax(sizes))


def extract_fill_mask(image: ImageBuffer, window: HueWindow = HueWindow()) -> BinaryMask:
    """Pixels inside the HSV window, reduced to the single largest 4-connected component.

    An image without in-window pixels yields an all-false mask.
    """
    errors = window.validate()
    if errors:
        raise ValueError("; ".join(errors))
    hsv = rgb2hsv(image.pixels)
    hue_deg = hsv[..., 0] * 360.0
    distance = np.abs((hue_deg - window.center_deg + 180.0) % 360.0 - 180.0)
    inside = (
        (distance <= window.half_width_deg)
        & (hsv[..., 1] >= window.min_saturation)
        & (hsv[..., 2] >= window.min_value)
    )
    return BinaryMask(largest_component(inside))
