"""Tests for raster buffers."""

import numpy as np
import pytest

from chainlens.core.geometry import PixelBox, RasterSize
from chainlens.raster import BinaryMask, FloatRaster, ImageBuffer, IndexMask, mask_to_box


class TestImageBuffer:
    """Tests for ImageBuffer."""

    def test_blank(self):
        """Test a uniformly colored image."""
        image = ImageBuffer.blank(RasterSize(4, 3), (10, 20, 30))
        assert image.size == RasterSize(4, 3)
        assert (image.pixels[2, 3] == [10, 20, 30]).all()

    def test_pixels_are_read_only(self):
        """Test that the buffer cannot be mutated in place."""
        image = ImageBuffer.blank(RasterSize(2, 2))
        with pytest.raises(ValueError):
            image.pixels[0, 0, 0] = 1

    def test_crop(self):
        """Test cropping a box."""
        pixels = np.arange(4 * 5 * 3, dtype=np.uint8).reshape(4, 5, 3)
        crop = ImageBuffer(pixels).crop(PixelBox(1, 2, 3, 4))
        assert crop.size == RasterSize(2, 2)
        assert np.array_equal(crop.pixels, pixels[2:4, 1:3])

    def test_crop_outside_rejected(self):
        """Test that a box beyond the image is refused."""
        with pytest.raises(ValueError):
            ImageBuffer.blank(RasterSize(4, 4)).crop(PixelBox(2, 2, 6, 6))

    def test_digest_tracks_content(self):
        """Test that equal pixels share a digest and different pixels do not."""
        a = ImageBuffer.blank(RasterSize(3, 3), (1, 2, 3))
        b = ImageBuffer.blank(RasterSize(3, 3), (1, 2, 3))
        c = ImageBuffer.blank(RasterSize(3, 3), (1, 2, 4))
        assert a.digest() == b.digest() and a == b
        assert a.digest() != c.digest()

    def test_wrong_shape(self):
        """Test that grayscale arrays are refused."""
        with pytest.raises(ValueError):
            ImageBuffer(np.zeros((3, 3), dtype=np.uint8))


class TestFloatRaster:
    """Tests for FloatRaster."""

    def test_validity_defaults_to_all(self):
        """Test the implicit validity mask."""
        raster = FloatRaster(np.ones((2, 3), dtype=np.float32))
        assert raster.validity().all()
        assert raster.size == RasterSize(3, 2)

    def test_non_finite_on_valid_pixel(self):
        """Test that NaN must be masked."""
        values = np.array([[1.0, np.nan]], dtype=np.float32)
        with pytest.raises(ValueError):
            FloatRaster(values)
        masked = FloatRaster(values, valid=np.array([[True, False]]))
        assert masked.validity().sum() == 1

    def test_equality_ignores_invalid_pixels(self):
        """Test that hidden values do not affect equality."""
        valid = np.array([[True, False]])
        a = FloatRaster(np.array([[1.0, 5.0]], dtype=np.float32), valid=valid)
        b = FloatRaster(np.array([[1.0, 9.0]], dtype=np.float32), valid=valid)
        assert a == b


class TestIndexMask:
    """Tests for IndexMask."""

    def test_validate_against_vocabulary(self):
        """Test that labels beyond the vocabulary are reported and the sentinel is not."""
        mask = IndexMask(np.array([[0, 1, 255], [7, 2, 0]], dtype=np.uint16))
        assert mask.validate(3) == ["Label 7 exceeds vocabulary of 3 classes"]
        assert mask.validate(8) == []


class TestMaskToBox:
    """Tests for mask_to_box."""

    def test_tight_box(self):
        """Test the half-open bounding box of set pixels."""
        bits = np.zeros((10, 10), dtype=bool)
        bits[2:5, 3:8] = True
        assert mask_to_box(BinaryMask(bits)) == PixelBox(3, 2, 8, 5)

    def test_empty(self):
        """Test that an empty mask has no box."""
        assert mask_to_box(BinaryMask.empty(RasterSize(4, 4))) is None
