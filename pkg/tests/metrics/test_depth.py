"""Tests for depth scoring."""

import math

import numpy as np
import pytest

from chainlens.globalize import Axis, Comparison, ComparisonSet, Relation
from chainlens.metrics import DEPTH_FLOOR, depth_metrics, pairwise_accuracy, segment_means
from chainlens.raster import FloatRaster
from chainlens.superpixel import SuperpixelMap


def truth_depth():
    return np.linspace(1.0, 10.0, 20, dtype=np.float32).reshape(4, 5)


class TestDepthMetrics:
    """Tests for depth_metrics."""

    def test_exact(self):
        """Test a perfect prediction."""
        gt = FloatRaster(truth_depth())
        assert depth_metrics(gt, gt) == {
            "delta1": 1.0,
            "delta2": 1.0,
            "delta3": 1.0,
            "abs_rel": 0.0,
        }

    def test_thirty_percent_over(self):
        """Test a uniform 1.3x overestimate: between the first and second thresholds."""
        gt = truth_depth()
        result = depth_metrics(FloatRaster(gt * np.float32(1.3)), FloatRaster(gt))
        assert result["delta1"] == 0.0
        assert result["delta2"] == 1.0
        assert result["delta3"] == 1.0
        assert result["abs_rel"] == pytest.approx(0.3, abs=1e-6)

    def test_double(self):
        """Test a 2x overestimate: beyond every threshold."""
        gt = truth_depth()
        result = depth_metrics(FloatRaster(gt * 2), FloatRaster(gt))
        assert (result["delta1"], result["delta2"], result["delta3"]) == (0.0, 0.0, 0.0)
        assert result["abs_rel"] == pytest.approx(1.0)

    def test_half_is_symmetric_in_ratio(self):
        """Test that underestimates use the inverse ratio."""
        gt = truth_depth()
        result = depth_metrics(FloatRaster(gt / 2), FloatRaster(gt))
        assert result["delta3"] == 0.0
        assert result["abs_rel"] == pytest.approx(0.5)

    def test_floor(self):
        """Test that non-positive predictions are raised to the floor."""
        gt = np.full((2, 2), 2.0, dtype=np.float32)
        result = depth_metrics(FloatRaster(np.zeros((2, 2), np.float32)), FloatRaster(gt))
        assert result["delta3"] == 0.0
        assert result["abs_rel"] == pytest.approx((2.0 - DEPTH_FLOOR) / 2.0)
        assert math.isfinite(result["abs_rel"])

    def test_invalid_truth_skipped(self):
        """Test that invalid and non-positive truth pixels are not scored."""
        gt = truth_depth()
        gt[0, 0] = 0.0
        valid = np.ones(gt.shape, dtype=bool)
        valid[1, 1] = False
        pred = gt.copy()
        pred[1, 1] = 100.0
        result = depth_metrics(FloatRaster(pred), FloatRaster(gt, valid))
        assert result["delta1"] == 1.0

    def test_nothing_to_score(self):
        """Test that a fully invalid truth raster raises."""
        gt = FloatRaster(np.ones((2, 2), np.float32), np.zeros((2, 2), dtype=bool))
        with pytest.raises(ValueError, match="No valid"):
            depth_metrics(gt, gt)


class TestSegmentMeans:
    """Tests for segment_means."""

    def test_means_and_empty_segments(self):
        """Test per-segment means with a segment holding no valid pixel."""
        spmap = SuperpixelMap.from_labels([[0, 0, 1, 2]])
        values = np.array([[1.0, 3.0, 5.0, 7.0]], dtype=np.float32)
        valid = np.array([[True, True, True, False]])
        means = segment_means(spmap, FloatRaster(values, valid))
        assert means[:2].tolist() == [2.0, 5.0]
        assert np.isnan(means[2])


class TestPairwiseAccuracy:
    """Tests for pairwise_accuracy."""

    def comparisons(self, *triples):
        return ComparisonSet.build(Axis.DEPTH, 4, [Comparison(i, j, r) for i, j, r in triples])

    def test_agreement_percentage(self):
        """Test a mix of right and wrong relations."""
        truth = [3.0, 1.0, 2.0, 0.0]
        answered = self.comparisons(
            (0, 1, Relation.GREATER), (1, 2, Relation.LESS), (2, 3, Relation.LESS)
        )
        assert pairwise_accuracy(answered, truth) == pytest.approx(200 / 3)

    def test_unknown_segments_skipped(self):
        """Test that pairs touching a NaN truth are not counted."""
        truth = [3.0, np.nan, 2.0, 0.0]
        answered = self.comparisons((0, 1, Relation.LESS), (0, 2, Relation.GREATER))
        assert pairwise_accuracy(answered, truth) == 100.0

    def test_equal_band(self):
        """Test equality within a tolerance."""
        truth = [1.0, 1.05, 2.0, 0.0]
        answered = self.comparisons((0, 1, Relation.EQUAL), (0, 2, Relation.LESS))
        assert pairwise_accuracy(answered, truth, equal_tolerance=0.1) == 100.0
        assert pairwise_accuracy(answered, truth) == 50.0

    def test_nothing_checkable(self):
        """Test that no scorable pair raises."""
        with pytest.raises(ValueError):
            pairwise_accuracy(self.comparisons((0, 1, Relation.LESS)), [np.nan] * 4)
