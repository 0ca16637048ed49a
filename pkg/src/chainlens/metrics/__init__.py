"""Scoring for every task, rank correlations and subset selection."""

from .detection import (
    IOU_THRESHOLDS,
    average_precision,
    iou_matrix,
    match_detections,
    multilabel_precision_recall,
)
from .segmentation import (
    ConfusionAccumulator,
    majority_fill,
    seg_metrics,
    superpixel_upper_bound,
)
from .depth import DEPTH_FLOOR, depth_metrics, pairwise_accuracy, segment_means
from .correlation import kendall_tau, normal_axis_rho, raster_spearman, spearman
from .subset import SubsetSelection, select_hardest, select_subset
from .report import LOWER_IS_BETTER, METRIC_RANGES, MetricReport, mean_values

__all__ = [
    "IOU_THRESHOLDS",
    "average_precision",
    "iou_matrix",
    "match_detections",
    "multilabel_precision_recall",
    "ConfusionAccumulator",
    "majority_fill",
    "seg_metrics",
    "superpixel_upper_bound",
    "DEPTH_FLOOR",
    "depth_metrics",
    "pairwise_accuracy",
    "segment_means",
    "kendall_tau",
    "normal_axis_rho",
    "raster_spearman",
    "spearman",
    "SubsetSelection",
    "select_hardest",
    "select_subset",
    "LOWER_IS_BETTER",
    "METRIC_RANGES",
    "MetricReport",
    "mean_values",
]
