"""Detection and multi-label scoring.

Average precision follows the COCO protocol: per image and class, predictions are
matched greedily in descending score order to the best unmatched ground-truth box
whose IoU reaches the threshold; per class, precision is made monotone and sampled at
101 recall points. Sorting is stable, so equal scores keep their input order. Chains
emit a constant score, which makes the PR curve of a class a single operating point.
"""

from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from ..core.geometry import LabeledBox

IOU_THRESHOLDS: Tuple[float, ...] = tuple(
    float(t) for t in np.round(np.linspace(0.5, 0.95, 10), 2)
)
RECALL_POINTS = np.linspace(0.0, 1.0, 101)


def iou_matrix(a: Sequence[LabeledBox], b: Sequence[LabeledBox]) -> npt.NDArray[np.float64]:
    """Pairwise box IoU, shape (len(a), len(b))."""
    if not a or not b:
        return np.zeros((len(a), len(b)))
    pa = np.array([x.box.bounds() for x in a], dtype=np.float64)
    pb = np.array([x.box.bounds() for x in b], dtype=np.float64)
    x0 = np.maximum(pa[:, None, 0], pb[None, :, 0])
    y0 = np.maximum(pa[:, None, 1], pb[None, :, 1])
    x1 = np.minimum(pa[:, None, 2], pb[None, :, 2])
    y1 = np.minimum(pa[:, None, 3], pb[None, :, 3])
    inter = np.clip(x1 - x0, 0, None) * np.clip(y1 - y0, 0, None)
    area_a = (pa[:, 2] - pa[:, 0]) * (pa[:, 3] - pa[:, 1])
    area_b = (pb[:, 2] - pb[:, 0]) * (pb[:, 3] - pb[:, 1])
    return inter / (area_a[:, None] + area_b[None, :] - inter)


def match_detections(
    preds: Sequence[LabeledBox], gts: Sequence[LabeledBox], threshold: float
) -> npt.NDArray[np.bool_]:
    """True-positive flag per prediction (input order) for one image and class."""
    hits = np.zeros(len(preds), dtype=bool)
    if not preds or not gts:
        return hits
    ious = iou_matrix(preds, gts)
    taken = np.zeros(len(gts), dtype=bool)
    order = np.argsort([-p.score for p in preds], kind="mergesort")
    for d in order:
        best, best_iou = -1, min(threshold, 1.0 - 1e-10)
        for g in range(len(gts)):
            if taken[g] or ious[d, g] < best_iou:
                continue
            best, best_iou = g, ious[d, g]
        if best >= 0:
            taken[best] = True
            hits[d] = True
    return hits


def interpolated_precision(
    scores: npt.NDArray[np.float64], hits: npt.NDArray[np.bool_], n_gt: int
) -> float:
    """101-point interpolated AP of one class."""
    if n_gt == 0 or scores.size == 0:
        return 0.0
    order = np.argsort(-scores, kind="mergesort")
    tp = np.cumsum(hits[order])
    fp = np.cumsum(~hits[order])
    recall = tp / n_gt
    precision = tp / np.maximum(tp + fp, np.spacing(1))
    precision = np.maximum.accumulate(precision[::-1])[::-1]
    index = np.searchsorted(recall, RECALL_POINTS, side="left")
    inside = index < precision.size
    sampled = np.where(inside, precision[np.minimum(index, precision.size - 1)], 0.0)
    return float(sampled.mean())


def _by_class(boxes: Iterable[LabeledBox]) -> Dict[int, List[LabeledBox]]:
    grouped: Dict[int, List[LabeledBox]] = {}
    for box in boxes:
        grouped.setdefault(box.class_id, []).append(box)
    return grouped


def average_precision(
    preds: Sequence[Sequence[LabeledBox]],
    gts: Sequence[Sequence[LabeledBox]],
    iou_thresholds: Sequence[float] = IOU_THRESHOLDS,
) -> Dict[str, float]:
    """COCO-style AP over a set of images.

    Classes without ground truth are left out of the mean; with no ground truth at
    all every value is 0.0.

    Args:
        preds: Predicted boxes per image
        gts: Ground-truth boxes per image, aligned with preds
        iou_thresholds: Thresholds averaged into "AP"

    Returns:
        {"AP50", "AP75", "AP"}
    """
    if len(preds) != len(gts):
        raise ValueError(f"Got predictions for {len(preds)} images and truth for {len(gts)}")
    thresholds = sorted(set(iou_thresholds) | {0.5, 0.75})
    per_image = [(_by_class(p), _by_class(g)) for p, g in zip(preds, gts)]
    classes = sorted({c for _, g in per_image for c in g})
    table = np.zeros((len(thresholds), len(classes)))
    for ci, class_id in enumerate(classes):
        n_gt = sum(len(g.get(class_id, [])) for _, g in per_image)
        scores = np.array(
            [b.score for p, _ in per_image for b in p.get(class_id, [])], dtype=np.float64
        )
        for ti, threshold in enumerate(thresholds):
            hits = [
                match_detections(p.get(class_id, []), g.get(class_id, []), threshold)
                for p, g in per_image
            ]
            flags = np.concatenate(hits) if hits else np.zeros(0, dtype=bool)
            table[ti, ci] = interpolated_precision(scores, flags, n_gt)
    if not classes:
        return {"AP50": 0.0, "AP75": 0.0, "AP": 0.0}
    per_threshold = dict(zip(thresholds, table.mean(axis=1)))
    return {
        "AP50": float(per_threshold[0.5]),
        "AP75": float(per_threshold[0.75]),
        "AP": float(np.mean([per_threshold[t] for t in iou_thresholds])),
    }


def multilabel_precision_recall(
    preds: Sequence[Iterable[int]], gts: Sequence[Iterable[int]]
) -> Dict[str, float]:
    """Micro-averaged precision and recall of predicted class sets.

    A ratio with an empty denominator counts as 1.0: claiming nothing is never wrong,
    and nothing to find is never missed.
    """
    if len(preds) != len(gts):
        raise ValueError(f"Got {len(preds)} predicted sets for {len(gts)} truth sets")
    tp = claimed = present = 0
    for p, g in zip(preds, gts):
        p, g = set(p), set(g)
        tp += len(p & g)
        claimed += len(p)
        present += len(g)
    return {
        "precision": tp / claimed if claimed else 1.0,
        "recall": tp / present if present else 1.0,
    }
