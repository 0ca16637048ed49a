"""Semantic segmentation scoring from confusion matrices."""

from typing import Dict, Optional

import numpy as np
import numpy.typing as npt

from ..raster import IndexMask
from ..superpixel import SuperpixelMap


class ConfusionAccumulator:
    """Pixel confusion counts over many images.

    Rows are ground-truth classes and columns predicted classes. Ground-truth ignore
    pixels are skipped; predicted ignore pixels land in an extra last column, so they
    count as misses without creating a class.

    Args:
        num_classes: Labels must lie below this bound
    """

    def __init__(self, num_classes: int):
        if num_classes < 1:
            raise ValueError(f"num_classes must be positive (got {num_classes})")
        self.num_classes = num_classes
        self.counts = np.zeros((num_classes, num_classes + 1), dtype=np.int64)

    def add(self, pred: IndexMask, gt: IndexMask) -> None:
        """Accumulate one image pair.

        Raises:
            ValueError: On a size mismatch, a label beyond num_classes or an ignore
            index that doubles as a class id
        """
        if pred.size != gt.size:
            raise ValueError(f"Prediction {pred.size!r} and truth {gt.size!r} differ in size")
        for name, mask in (("Prediction", pred), ("Truth", gt)):
            if mask.ignore_index < self.num_classes:
                raise ValueError(
                    f"{name} ignore_index {mask.ignore_index} collides with class ids "
                    f"0..{self.num_classes - 1}"
                )
        valid = gt.labels != gt.ignore_index
        g = gt.labels[valid].astype(np.int64)
        p = pred.labels[valid].astype(np.int64)
        p = np.where(p == pred.ignore_index, self.num_classes, p)
        if (g >= self.num_classes).any() or (p > self.num_classes).any():
            raise ValueError(f"Label beyond {self.num_classes} classes")
        n = self.num_classes + 1
        self.counts += np.bincount(g * n + p, minlength=self.num_classes * n).reshape(
            self.num_classes, n
        )

    def per_class_iou(self) -> Dict[int, float]:
        """IoU of every class present in the truth or the prediction."""
        square = self.counts[:, : self.num_classes]
        inter = np.diag(square).astype(np.float64)
        truth = self.counts.sum(axis=1)
        predicted = square.sum(axis=0)
        union = truth + predicted - inter
        return {int(c): float(inter[c] / union[c]) for c in np.flatnonzero(union > 0)}

    def result(self) -> Dict[str, float]:
        """{"mIoU", "pixel_acc"}; both 0.0 when no pixel was scored."""
        ious = self.per_class_iou()
        total = int(self.counts.sum())
        return {
            "mIoU": float(np.mean(list(ious.values()))) if ious else 0.0,
            "pixel_acc": float(np.trace(self.counts[:, : self.num_classes]) / total)
            if total
            else 0.0,
        }


def _class_bound(*masks: IndexMask) -> int:
    top = 0
    for mask in masks:
        labels = mask.labels[mask.labels != mask.ignore_index]
        if labels.size:
            top = max(top, int(labels.max()) + 1)
    return max(top, 1)


def seg_metrics(
    pred: IndexMask,
    gt: IndexMask,
    num_classes: Optional[int] = None,
    ignore_index: Optional[int] = None,
) -> Dict[str, float]:
    """mIoU over the classes present in either mask, and pixel accuracy.

    Args:
        pred: Predicted mask
        gt: Ground-truth mask
        num_classes: Vocabulary size; inferred from the labels when omitted
        ignore_index: Sentinel both masks must carry, when given

    Raises:
        ValueError: If the masks differ in size, use another sentinel than ignore_index
            or a sentinel that collides with a class id
    """
    if ignore_index is not None:
        for mask in (pred, gt):
            if mask.ignore_index != ignore_index:
                raise ValueError(
                    f"Mask ignore_index {mask.ignore_index} differs from {ignore_index}"
                )
    accumulator = ConfusionAccumulator(num_classes or _class_bound(pred, gt))
    accumulator.add(pred, gt)
    return accumulator.result()


def majority_fill(spmap: SuperpixelMap, gt: IndexMask) -> IndexMask:
    """Give every superpixel its most frequent truth class in one pass.

    Ties go to the smallest class id; a superpixel holding only ignore pixels becomes
    ignore.
    """
    if spmap.size != gt.size:
        raise ValueError(f"Superpixels {spmap.size!r} and truth {gt.size!r} differ in size")
    valid = gt.labels != gt.ignore_index
    segments = spmap.labels[valid].astype(np.int64)
    labels = gt.labels[valid].astype(np.int64)
    width = _class_bound(gt)
    votes = np.bincount(segments * width + labels, minlength=spmap.k * width).reshape(
        spmap.k, width
    )
    lut: npt.NDArray[np.int64] = np.argmax(votes, axis=1)
    lut[votes.sum(axis=1) == 0] = gt.ignore_index
    return IndexMask(lut[spmap.labels], ignore_index=gt.ignore_index)


def superpixel_upper_bound(spmap: SuperpixelMap, gt: IndexMask) -> float:
    """mIoU of the majority fill, the segmentation ceiling at this superpixel granularity."""
    return seg_metrics(majority_fill(spmap, gt), gt)["mIoU"]
