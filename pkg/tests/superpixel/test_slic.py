"""Tests for superpixelation."""

import numpy as np
import pytest
from scipy import ndimage

from chainlens.core.geometry import PixelBox, Point, RasterSize
from chainlens.raster import ImageBuffer
from chainlens.superpixel import SuperpixelMap, slic


def _noise_image(seed=0, size=48):
    pixels = np.random.default_rng(seed).integers(0, 256, (size, size, 3), dtype=np.uint8)
    return ImageBuffer(pixels)


class TestSuperpixelMap:
    """Tests for SuperpixelMap.from_labels."""

    def test_ids_densified(self):
        """Test that arbitrary labels become 0..k-1 in sorted order."""
        spmap = SuperpixelMap.from_labels([[7, 7, 3], [7, 9, 3]])
        assert spmap.k == 3
        assert spmap.labels.tolist() == [[1, 1, 0], [1, 2, 0]]
        assert spmap.counts.tolist() == [2, 3, 1]

    def test_boxes_and_anchors(self):
        """Test per-segment boxes and the anchor nearest the centroid."""
        labels = np.zeros((5, 5), dtype=np.int64)
        labels[:, 3:] = 1
        spmap = SuperpixelMap.from_labels(labels)
        assert spmap.boxes == (PixelBox(0, 0, 3, 5), PixelBox(3, 0, 5, 5))
        assert spmap.anchors[0] == Point(1, 2)
        assert spmap.centroids[1].tolist() == [3.5, 2.0]

    def test_anchor_is_member_of_concave_segment(self):
        """Test that a ring's anchor lies on the ring, not in its hole."""
        labels = np.ones((7, 7), dtype=np.int64)
        labels[2:5, 2:5] = 0
        spmap = SuperpixelMap.from_labels(labels)
        anchor = spmap.anchors[1]
        assert spmap.labels[anchor.y, anchor.x] == 1

    def test_region_helpers(self):
        """Test region mask, box and point lookup."""
        spmap = SuperpixelMap.from_labels([[0, 1, 2], [0, 1, 2]])
        assert spmap.region_mask([0, 2]).sum() == 4
        assert spmap.region_box([0, 2]) == PixelBox(0, 0, 3, 2)
        assert spmap.segment_at(Point(1, 1)) == 1
        with pytest.raises(ValueError):
            spmap.segment_at(Point(3, 0))
        with pytest.raises(ValueError):
            spmap.region_box([])


class TestSlic:
    """Tests for slic."""

    def test_segments_are_connected(self):
        """Test that every segment is a single 4-connected piece."""
        spmap = slic(_noise_image(), 30)
        for s in range(spmap.k):
            _, pieces = ndimage.label(spmap.segment_mask(s))
            assert pieces == 1

    def test_partition_is_dense(self):
        """Test that the ids cover 0..k-1 and every pixel."""
        spmap = slic(_noise_image(1), 20)
        assert sorted(np.unique(spmap.labels).tolist()) == list(range(spmap.k))
        assert spmap.counts.sum() == 48 * 48

    def test_deterministic(self):
        """Test that the same inputs give the same partition."""
        a = slic(_noise_image(2), 25, compactness=5.0)
        b = slic(_noise_image(2), 25, compactness=5.0)
        assert np.array_equal(a.labels, b.labels)

    def test_single_segment(self):
        """Test k = 1."""
        spmap = slic(_noise_image(), 1)
        assert spmap.k == 1 and spmap.counts[0] == 48 * 48

    def test_one_segment_per_pixel(self):
        """Test k equal to the pixel count."""
        image = ImageBuffer.blank(RasterSize(3, 2))
        assert slic(image, 6).k == 6

    @pytest.mark.parametrize("k", [0, 10])
    def test_invalid_k(self, k):
        """Test that k outside [1, pixel count] is refused."""
        with pytest.raises(ValueError):
            slic(ImageBuffer.blank(RasterSize(3, 3)), k)
