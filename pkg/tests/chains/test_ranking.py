"""Tests for depth and surface normal ranking."""

import numpy as np
import pytest

from chainlens.backend import OracleBackend, Session
from chainlens.chains import ChainContext, estimate_depth_ranks, estimate_normal_ranks
from chainlens.core.geometry import RasterSize
from chainlens.globalize import Axis, Relation
from chainlens.metrics import normal_axis_rho, pairwise_accuracy, raster_spearman, segment_means
from chainlens.raster import FloatRaster, GroundTruth


def flat_ctx(size, depth=None, normals=None):
    truth = GroundTruth("flat", size, depth=depth, normals=normals)
    return ChainContext(Session(OracleBackend({"flat": truth})))


class TestDepthRanks:
    """Tests for estimate_depth_ranks."""

    def test_oracle_correlates(self, oracle_ctx, samples):
        """Test that globalized oracle ranks follow the depth field."""
        rhos = [
            raster_spearman(
                estimate_depth_ranks(oracle_ctx, s.truth.image_id, s.image).raster,
                s.truth.depth,
            )
            for s in samples[:4]
        ]
        assert np.mean(rhos) >= 0.8

    def test_oracle_pairs_all_correct(self, oracle_ctx, samples):
        """Test that oracle comparisons agree with the segment means."""
        s = samples[0]
        estimate = estimate_depth_ranks(oracle_ctx, s.truth.image_id, s.image, k=50, n_pairs=100)
        truth = segment_means(estimate.spmap, s.truth.depth)
        assert pairwise_accuracy(estimate.comparisons, truth) == 100.0
        assert len(estimate.pairs) == len(estimate.comparisons) == 100

    def test_constant_depth_ternary(self, samples):
        """Test that an all-equal scene yields a flat field."""
        size = RasterSize(48, 48)
        ctx = flat_ctx(size, depth=FloatRaster(np.full(size.shape, 3.0, dtype=np.float32)))
        image = samples[0].image.crop(size.full_box())
        estimate = estimate_depth_ranks(ctx, "flat", image, k=30, n_pairs=60, ternary=True)
        assert {c.relation for c in estimate.comparisons} == {Relation.EQUAL}
        assert np.allclose(estimate.field.values, 0.0)

    def test_deterministic(self, oracle_ctx, samples):
        """Test that the same seed gives the same pairs and ranks."""
        s = samples[1]
        a = estimate_depth_ranks(oracle_ctx, s.truth.image_id, s.image, k=40, n_pairs=80, seed=3)
        b = estimate_depth_ranks(oracle_ctx, s.truth.image_id, s.image, k=40, n_pairs=80, seed=3)
        assert a.pairs == b.pairs
        assert a.raster == b.raster

    def test_needs_two_segments(self, oracle_ctx, samples):
        """Test that k below 2 is refused."""
        with pytest.raises(ValueError, match="k >= 2"):
            estimate_depth_ranks(oracle_ctx, "00000", samples[0].image, k=1)


class TestNormalRanks:
    """Tests for estimate_normal_ranks."""

    def test_oracle_correlates_per_axis(self, oracle_ctx, samples):
        """Test each axis against its normal component."""
        per_axis = {0: [], 1: [], 2: []}
        for s in samples[:3]:
            estimate = estimate_normal_ranks(oracle_ctx, s.truth.image_id, s.image)
            for axis, (pred, gt) in enumerate(zip(estimate.rasters(), s.truth.normals)):
                per_axis[axis].append(normal_axis_rho(pred, gt))
        for rhos in per_axis.values():
            assert np.mean(rhos) >= 0.5

    def test_flat_plane(self, samples):
        """Test that a plane facing the camera ranks flat on every axis."""
        size = RasterSize(48, 48)
        zeros = FloatRaster(np.zeros(size.shape, dtype=np.float32))
        ones = FloatRaster(np.ones(size.shape, dtype=np.float32))
        ctx = flat_ctx(size, normals=(zeros, zeros, ones))
        image = samples[0].image.crop(size.full_box())
        estimate = estimate_normal_ranks(ctx, "flat", image, k=30, n_pairs=60)
        for rank in (estimate.x, estimate.y, estimate.z):
            assert np.allclose(rank.field.values, 0.0)
        assert estimate.sphere().size == size

    def test_axes_independent_of_each_other(self, oracle_ctx, samples):
        """Test that reordering one axis's pairs leaves the others untouched."""
        s = samples[2]
        base = estimate_normal_ranks(oracle_ctx, s.truth.image_id, s.image, k=40, n_pairs=80)
        reversed_x = {Axis.X: list(range(79, -1, -1))}
        moved = estimate_normal_ranks(
            oracle_ctx, s.truth.image_id, s.image, k=40, n_pairs=80, pair_orders=reversed_x
        )
        assert moved.x.pairs == tuple(reversed(base.x.pairs))
        assert moved.y.raster == base.y.raster
        assert moved.z.raster == base.z.raster
        assert np.allclose(moved.x.field.values, base.x.field.values, atol=1e-6)

    def test_same_pairs_on_every_axis(self, oracle_ctx, samples):
        """Test that all three axes compare the same sampled pairs."""
        s = samples[0]
        estimate = estimate_normal_ranks(oracle_ctx, s.truth.image_id, s.image, k=30, n_pairs=50)
        assert estimate.x.pairs == estimate.y.pairs == estimate.z.pairs
        assert [r.axis for r in (estimate.x, estimate.y, estimate.z)] == [Axis.X, Axis.Y, Axis.Z]
