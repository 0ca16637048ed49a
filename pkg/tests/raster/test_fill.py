"""Tests for decoding painted masks."""

import numpy as np
import pytest

from chainlens.core.geometry import Point, RasterSize
from chainlens.raster import (
    HueWindow,
    ImageBuffer,
    crop_from_square,
    extract_fill_mask,
    pad_to_square,
)


class TestPadding:
    """Tests for square padding."""

    def test_pad_and_crop(self):
        """Test that cropping undoes padding."""
        pixels = np.random.default_rng(0).integers(0, 256, (4, 10, 3), dtype=np.uint8)
        image = ImageBuffer(pixels)
        padded, offset = pad_to_square(image)
        assert padded.size == RasterSize(10, 10)
        assert offset == Point(0, 3)
        assert crop_from_square(padded, offset, image.size) == image


class TestExtractFillMask:
    """Tests for extract_fill_mask."""

    def test_keeps_largest_red_component(self):
        """Test that the biggest painted blob wins."""
        pixels = np.full((20, 20, 3), 128, dtype=np.uint8)
        pixels[2:10, 2:10] = (255, 0, 0)
        pixels[15:17, 15:17] = (255, 0, 0)
        mask = extract_fill_mask(ImageBuffer(pixels))
        assert mask.count() == 64
        assert mask.bits[5, 5] and not mask.bits[16, 16]

    def test_hue_wraps_around(self):
        """Test a window centered near 0 degrees accepting magenta-red."""
        pixels = np.zeros((4, 4, 3), dtype=np.uint8)
        pixels[:2] = (255, 0, 30)  # hue about 353 degrees
        mask = extract_fill_mask(ImageBuffer(pixels), HueWindow(0.0, 10.0))
        assert mask.count() == 8

    def test_nothing_painted(self):
        """Test an all-gray image."""
        pixels = np.full((4, 4, 3), 100, dtype=np.uint8)
        assert extract_fill_mask(ImageBuffer(pixels)).count() == 0

    def test_invalid_window(self):
        """Test window validation."""
        with pytest.raises(ValueError):
            extract_fill_mask(ImageBuffer.blank(RasterSize(2, 2)), HueWindow(half_width_deg=200))
