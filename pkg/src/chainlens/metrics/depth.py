"""Depth scoring: threshold accuracy, relative error and pairwise agreement."""

from typing import Dict, Optional

import numpy as np
import numpy.typing as npt

from ..globalize import ComparisonSet, relation_between
from ..raster import FloatRaster
from ..superpixel import SuperpixelMap

DEPTH_FLOOR = 1e-6


def depth_metrics(
    pred: FloatRaster, gt: FloatRaster, validity: Optional[npt.NDArray[np.bool_]] = None
) -> Dict[str, float]:
    """Threshold accuracies and AbsRel of an aligned metric depth map.

    Pixels count when the truth is valid and positive and the prediction is finite.
    Predictions below a small positive floor are raised to it before taking ratios.

    Returns:
        {"delta1", "delta2", "delta3", "abs_rel"}

    Raises:
        ValueError: On a size mismatch or when no pixel is usable
    """
    if pred.size != gt.size:
        raise ValueError(f"Rasters differ in size: {pred.size!r} vs {gt.size!r}")
    usable = gt.validity() & (gt.values > 0) & np.isfinite(pred.values)
    if validity is not None:
        usable &= validity
    if not usable.any():
        raise ValueError("No valid depth pixels to score")
    d = np.maximum(pred.values[usable].astype(np.float64), DEPTH_FLOOR)
    t = gt.values[usable].astype(np.float64)
    ratio = np.maximum(d / t, t / d)
    return {
        "delta1": float(np.mean(ratio < 1.25)),
        "delta2": float(np.mean(ratio < 1.25**2)),
        "delta3": float(np.mean(ratio < 1.25**3)),
        "abs_rel": float(np.mean(np.abs(d - t) / t)),
    }


def segment_means(spmap: SuperpixelMap, raster: FloatRaster) -> npt.NDArray[np.float64]:
    """Mean of the valid raster values per segment; NaN for segments with none."""
    if spmap.size != raster.size:
        raise ValueError(f"Superpixels {spmap.size!r} and raster {raster.size!r} differ")
    usable = raster.validity()
    means = np.full(spmap.k, np.nan)
    # same summation as the oracle's region means, so equal inputs give equal relations
    for segment in range(spmap.k):
        inside = usable & (spmap.labels == segment)
        if inside.any():
            means[segment] = float(raster.values[inside].astype(np.float64).mean())
    return means


def pairwise_accuracy(
    comparisons: ComparisonSet,
    gt_field: npt.ArrayLike,
    equal_tolerance: Optional[float] = None,
) -> float:
    """Percentage of comparisons that agree with the truth.

    Pairs touching a segment without a truth value are skipped.

    Args:
        comparisons: Answered pairs
        gt_field: Truth value per segment
        equal_tolerance: Values closer than this count as equal

    Raises:
        ValueError: If no comparison can be checked
    """
    truth = np.asarray(gt_field, dtype=np.float64)
    checked = correct = 0
    for c in comparisons:
        a, b = truth[c.i], truth[c.j]
        if np.isnan(a) or np.isnan(b):
            continue
        checked += 1
        correct += relation_between(float(a), float(b), equal_tolerance) is c.relation
    if checked == 0:
        raise ValueError("No comparison to score")
    return 100.0 * correct / checked
