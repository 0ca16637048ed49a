"""Tests for detection and multi-label scoring."""

import pytest

from chainlens.core.geometry import LabeledBox, PixelBox
from chainlens.metrics import (
    average_precision,
    iou_matrix,
    match_detections,
    multilabel_precision_recall,
)


def box(x0, y0, x1, y1, class_id=0, score=1.0):
    return LabeledBox(PixelBox(x0, y0, x1, y1), class_id, score)


class TestIouMatrix:
    """Tests for iou_matrix."""

    def test_shape_and_values(self):
        """Test a 2x1 matrix against hand values."""
        m = iou_matrix([box(0, 0, 10, 10), box(5, 0, 15, 10)], [box(0, 0, 10, 10)])
        assert m.shape == (2, 1)
        assert m[0, 0] == 1.0
        assert m[1, 0] == pytest.approx(1 / 3)

    def test_empty(self):
        """Test that an empty side gives an empty matrix."""
        assert iou_matrix([], [box(0, 0, 1, 1)]).shape == (0, 1)


class TestMatchDetections:
    """Tests for match_detections."""

    def test_each_truth_matched_once(self):
        """Test that a duplicate prediction is a false positive."""
        gts = [box(0, 0, 10, 10)]
        hits = match_detections([box(0, 0, 10, 10), box(0, 0, 10, 10)], gts, 0.5)
        assert hits.tolist() == [True, False]

    def test_score_order(self):
        """Test that the higher score claims the truth first."""
        gts = [box(0, 0, 10, 10)]
        preds = [box(0, 0, 10, 10, score=0.2), box(0, 0, 10, 9, score=0.9)]
        assert match_detections(preds, gts, 0.5).tolist() == [False, True]

    def test_threshold_inclusive(self):
        """Test that an IoU equal to the threshold matches."""
        gts = [box(0, 0, 10, 10)]
        assert match_detections([box(0, 0, 10, 5)], gts, 0.5).tolist() == [True]
        assert match_detections([box(0, 0, 10, 4)], gts, 0.5).tolist() == [False]


class TestAveragePrecision:
    """Tests for average_precision."""

    def test_perfect(self):
        """Test that predictions equal to the truth score 1."""
        gts = [[box(0, 0, 10, 10), box(20, 20, 40, 40, 1)], [box(5, 5, 9, 9, 1)]]
        assert average_precision(gts, gts) == {"AP50": 1.0, "AP75": 1.0, "AP": 1.0}

    def test_no_truth(self):
        """Test that an empty truth set scores 0."""
        result = average_precision([[box(0, 0, 1, 1)]], [[]])
        assert result == {"AP50": 0.0, "AP75": 0.0, "AP": 0.0}

    def test_no_predictions(self):
        """Test that missing predictions score 0."""
        assert average_precision([[]], [[box(0, 0, 4, 4)]])["AP"] == 0.0

    def test_one_hit_one_miss(self):
        """Test the single operating point at recall and precision one half."""
        gts = [box(0, 0, 10, 10), box(50, 50, 60, 60)]
        # IoU 0.6 with the first truth box, 0.3 with the second
        preds = [box(0, 0, 10, 6), box(50, 50, 60, 53)]
        result = average_precision([preds], [gts])
        # recall points 0.00 through 0.50 carry precision 1
        assert result["AP50"] == pytest.approx(51 / 101)
        assert result["AP75"] == 0.0

    def test_misaligned_inputs(self):
        """Test that predictions and truth must cover the same images."""
        with pytest.raises(ValueError):
            average_precision([[]], [[], []])

    def test_classes_matched_separately(self):
        """Test that a right box with the wrong class does not count."""
        result = average_precision([[box(0, 0, 10, 10, 1)]], [[box(0, 0, 10, 10, 0)]])
        assert result["AP50"] == 0.0


class TestMultilabelPrecisionRecall:
    """Tests for multilabel_precision_recall."""

    def test_micro_average(self):
        """Test pooled counts across images."""
        result = multilabel_precision_recall([{0, 1}, {2}], [{0}, {2, 3}])
        assert result["precision"] == pytest.approx(2 / 3)
        assert result["recall"] == pytest.approx(2 / 3)

    def test_empty_denominators(self):
        """Test that empty claims and empty truth count as perfect."""
        assert multilabel_precision_recall([set()], [set()]) == {
            "precision": 1.0,
            "recall": 1.0,
        }
        assert multilabel_precision_recall([set()], [{1}])["recall"] == 0.0
