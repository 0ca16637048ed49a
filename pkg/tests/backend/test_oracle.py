"""Tests for the ground-truth backends."""

import numpy as np
import pytest

from chainlens.backend import (
    CoordinateQuery,
    MultiChoiceQuery,
    MultiLabelQuery,
    OracleBackend,
    PairOrderQuery,
    PresenceQuery,
    QueryItem,
    Region,
    SameObjectQuery,
    majority_class,
    region_mean,
)
from chainlens.core.geometry import LabeledBox, PixelBox, Point, RasterSize
from chainlens.errors import MissingGroundTruth
from chainlens.globalize import TERNARY_RELATIONS, Axis, Relation
from chainlens.raster import BinaryMask, FloatRaster, GroundTruth, IndexMask

SIZE = RasterSize(10, 10)


@pytest.fixture
def gt():
    labels = np.zeros(SIZE.shape, dtype=np.uint16)
    labels[:, 5:] = 1
    depth = np.tile(np.arange(10, dtype=np.float32), (10, 1))
    instance = np.zeros(SIZE.shape, dtype=bool)
    instance[:, :5] = True
    return GroundTruth(
        image_id="g",
        size=SIZE,
        label=2,
        boxes=(LabeledBox(PixelBox(0, 0, 5, 5), 2),),
        mask=IndexMask(labels),
        depth=FloatRaster(depth),
        instances={Point(1, 1): BinaryMask(instance)},
    )


def _item(box=None, mask=None):
    return QueryItem(Region("g", SIZE, box, mask))


def _columns(lo, hi):
    bits = np.zeros(SIZE.shape, dtype=bool)
    bits[:, lo:hi] = True
    return bits


class TestOracleBackend:
    """Tests for OracleBackend."""

    def test_image_label(self, gt):
        """Test whole-image classification."""
        oracle = OracleBackend({"g": gt})
        assert oracle.answer_value(MultiChoiceQuery((_item(),), ("a", "b", "c"))) == (2,)

    def test_region_majority(self, gt):
        """Test segment classification by majority class."""
        oracle = OracleBackend({"g": gt})
        query = MultiChoiceQuery((_item(mask=_columns(3, 10)),), ("a", "b", "c"))
        assert oracle.answer_value(query) == (1,)

    def test_labels_and_presence(self, gt):
        """Test window-based box lookups."""
        oracle = OracleBackend({"g": gt})
        assert oracle.answer_value(MultiLabelQuery(_item(), ("a", "b", "c"))) == {2}
        far = _item(PixelBox(6, 6, 10, 10))
        assert oracle.answer_value(MultiLabelQuery(far, ("a", "b", "c"))) == frozenset()
        assert oracle.answer_value(PresenceQuery(_item(PixelBox(4, 4, 6, 6)), 2, "c")) is True
        assert oracle.answer_value(PresenceQuery(far, 2, "c")) is False

    def test_depth_order(self, gt):
        """Test that the region further right is farther away."""
        oracle = OracleBackend({"g": gt})
        near, far = _item(mask=_columns(0, 2)), _item(mask=_columns(8, 10))
        assert oracle.answer_value(PairOrderQuery(near, far, Axis.DEPTH)) is Relation.LESS
        assert oracle.answer_value(PairOrderQuery(far, near, Axis.DEPTH)) is Relation.GREATER

    def test_ternary_equal_band(self, gt):
        """Test that close means answer 'equal' within the tolerance."""
        oracle = OracleBackend({"g": gt}, equal_fraction=0.2)
        a, b = _item(mask=_columns(4, 5)), _item(mask=_columns(5, 6))
        query = PairOrderQuery(a, b, Axis.DEPTH, TERNARY_RELATIONS)
        assert oracle.answer_value(query) is Relation.EQUAL

    def test_same_object(self, gt):
        """Test the majority-overlap rule."""
        oracle = OracleBackend({"g": gt})
        cluster = _item(mask=_columns(0, 1))
        inside = SameObjectQuery(_item(mask=_columns(2, 4)), cluster, Point(1, 1))
        outside = SameObjectQuery(_item(mask=_columns(4, 8)), cluster, Point(1, 1))
        assert oracle.answer_value(inside) is True
        assert oracle.answer_value(outside) is False

    def test_box_coordinates(self, gt):
        """Test that boxes of the class come back as fractions of the image."""
        oracle = OracleBackend({"g": gt})
        assert oracle.answer_value(CoordinateQuery(_item(), 2, "c")) == ((0.0, 0.0, 0.5, 0.5),)
        assert oracle.answer_value(CoordinateQuery(_item(), 1, "b")) == ()

    def test_missing_annotations(self, gt):
        """Test questions the annotations cannot answer."""
        oracle = OracleBackend({"g": gt})
        with pytest.raises(MissingGroundTruth):
            oracle.answer_value(PairOrderQuery(_item(), _item(), Axis.X))
        with pytest.raises(MissingGroundTruth):
            OracleBackend({}).answer_value(MultiLabelQuery(_item(), ("a",)))

    def test_callable_source(self, gt):
        """Test a loader function instead of a mapping."""
        oracle = OracleBackend(lambda image_id: gt)
        assert oracle.answer_value(MultiChoiceQuery((_item(),), ("a", "b", "c"))) == (2,)

    def test_invalid_fraction(self):
        """Test the equal band range."""
        with pytest.raises(ValueError):
            OracleBackend({}, equal_fraction=1.0)


class TestHelpers:
    """Tests for majority_class and region_mean."""

    def test_majority_tie_goes_to_smallest(self):
        """Test the tie break."""
        labels = np.array([[3, 1, 3, 1]])
        assert majority_class(labels, np.ones((1, 4), dtype=bool), 255) == 1

    def test_all_ignored(self):
        """Test a region of sentinel pixels."""
        labels = np.full((2, 2), 255)
        assert majority_class(labels, np.ones((2, 2), dtype=bool), 255) is None

    def test_region_mean_skips_invalid(self):
        """Test that invalid pixels are left out."""
        raster = FloatRaster(
            np.array([[1.0, 100.0, 3.0]], dtype=np.float32),
            valid=np.array([[True, False, True]]),
        )
        assert region_mean(raster, np.ones((1, 3), dtype=bool)) == 2.0
        with pytest.raises(MissingGroundTruth):
            region_mean(raster, np.array([[False, True, False]]))
