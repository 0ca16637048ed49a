"""Tests for query digests and regions."""

import numpy as np
import pytest

from chainlens.backend import (
    MultiChoiceQuery,
    MultiLabelQuery,
    PairOrderQuery,
    QueryItem,
    Region,
)
from chainlens.core.geometry import PixelBox, RasterSize
from chainlens.globalize import Axis, Relation
from chainlens.raster import ImageBuffer

SIZE = RasterSize(8, 8)


def _item(box=None, with_image=False):
    images = (ImageBuffer.blank(SIZE),) if with_image else ()
    return QueryItem(Region("img", SIZE, box), images)


class TestRegion:
    """Tests for Region."""

    def test_pixels_of_box(self):
        """Test the box rasterization."""
        region = Region("img", SIZE, PixelBox(0, 0, 2, 4))
        assert region.pixels().sum() == 8
        assert Region("img", SIZE).window == SIZE.full_box()

    def test_mask_must_match(self):
        """Test that the mask shape is checked."""
        with pytest.raises(ValueError):
            Region("img", SIZE, mask=np.ones((3, 3), dtype=bool))

    def test_box_must_fit(self):
        """Test that the box must lie inside the image."""
        with pytest.raises(ValueError):
            Region("img", SIZE, PixelBox(4, 4, 12, 12))


class TestQueryDigest:
    """Tests for Query.digest."""

    def test_rendering_does_not_matter(self):
        """Test that attached images do not change the digest."""
        a = MultiChoiceQuery((_item(),), ("cat", "dog"))
        b = MultiChoiceQuery((_item(with_image=True),), ("cat", "dog"))
        assert a.digest() == b.digest()

    def test_kind_counts(self):
        """Test that two kinds over the same content differ."""
        choice = MultiChoiceQuery((_item(),), ("cat",))
        labels = MultiLabelQuery(_item(), ("cat",))
        assert choice.digest() != labels.digest()

    def test_content_counts(self):
        """Test that the region and options change the digest."""
        base = MultiChoiceQuery((_item(),), ("cat", "dog")).digest()
        assert MultiChoiceQuery((_item(PixelBox(0, 0, 4, 4)),), ("cat", "dog")).digest() != base
        assert MultiChoiceQuery((_item(),), ("dog", "cat")).digest() != base


class TestMultiChoiceQuery:
    """Tests for MultiChoiceQuery."""

    def test_item_keeps_history(self):
        """Test splitting a batch into single queries."""
        query = MultiChoiceQuery((_item(), _item()), ("cat",), history=(("1", "cat"),))
        assert query.batched and not query.item(1).batched
        assert query.item(1).history == (("1", "cat"),)
        assert query.fields()["history"] == "1: cat"

    def test_shared_images_and_numbers(self):
        """Test that shared images come first and single items keep their number."""
        shared = (ImageBuffer.blank(SIZE, (9, 9, 9)),)
        items = (_item(with_image=True), _item(), _item(with_image=True))
        query = MultiChoiceQuery(items, ("cat",), shared=shared)
        assert len(query.images()) == 3 and query.images()[0] is shared[0]
        assert query.fields()["numbers"] == "1 to 3"
        single = query.item(2)
        assert single.fields()["numbers"] == "3"
        assert single.images() == shared + items[2].images

    def test_needs_items_and_options(self):
        """Test empty queries."""
        with pytest.raises(ValueError):
            MultiChoiceQuery((), ("cat",))
        with pytest.raises(ValueError):
            MultiChoiceQuery((_item(),), ())


class TestPairOrderQuery:
    """Tests for PairOrderQuery."""

    def test_fields(self):
        """Test the axis and option fields."""
        query = PairOrderQuery(_item(), _item(), Axis.Z)
        assert query.fields()["axis"] == "z"
        assert not query.ternary

    def test_requires_both_orders(self):
        """Test that 'greater' and 'less' must be allowed."""
        with pytest.raises(ValueError):
            PairOrderQuery(_item(), _item(), Axis.DEPTH, (Relation.GREATER, Relation.EQUAL))
