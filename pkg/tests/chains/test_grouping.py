"""Tests for point grouping."""

from collections import deque

import numpy as np
import pytest

from chainlens.chains import group_point
from chainlens.core.geometry import Point
from chainlens.superpixel import adjacency, slic


def expected_group(spmap, instance_bits, point):
    """Segments reachable from the seed through segments mostly inside the instance."""
    graph = adjacency(spmap)
    seed = spmap.segment_at(point)

    def inside(segment):
        bits = spmap.segment_mask(segment)
        return 2 * np.count_nonzero(bits & instance_bits) > np.count_nonzero(bits)

    accepted = {seed}
    queue = deque([seed])
    while queue:
        for n in graph.neighbours(queue.popleft()):
            if n not in accepted and inside(n):
                accepted.add(n)
                queue.append(n)
    return spmap.region_mask(accepted)


class TestGroupPoint:
    """Tests for group_point."""

    def test_oracle_grows_over_instance(self, oracle_ctx, samples):
        """Test that ground-truth answers accept exactly the connected inside segments."""
        for s in samples[:4]:
            for point, instance in s.truth.instances.items():
                mask = group_point(oracle_ctx, s.truth.image_id, s.image, point, k=60)
                spmap = slic(s.image, 60)
                assert np.array_equal(mask.bits, expected_group(spmap, instance.bits, point))

    def test_rejections_stop_growth(self, make_text_ctx, samples):
        """Test that a backend always answering no asks each neighbour once."""
        backend, ctx = make_text_ctx(lambda p: "no")
        s = samples[0]
        point = next(iter(s.truth.instances))
        mask = group_point(ctx, "a", s.image, point, k=30)
        spmap = slic(s.image, 30)
        seed = spmap.segment_at(point)
        assert np.array_equal(mask.bits, spmap.segment_mask(seed))
        assert backend.calls == len(adjacency(spmap).neighbours(seed))

    def test_accepting_everything(self, make_text_ctx, samples):
        """Test that a backend always answering yes covers the connected image."""
        _, ctx = make_text_ctx(lambda p: "yes")
        mask = group_point(ctx, "a", samples[0].image, Point(5, 5), k=20)
        assert mask.bits.all()

    def test_point_outside(self, oracle_ctx, samples):
        """Test that a point off the image is refused."""
        with pytest.raises(ValueError, match="outside"):
            group_point(oracle_ctx, "00000", samples[0].image, Point(96, 0))
