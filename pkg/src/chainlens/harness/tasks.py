"""Per-task glue between a chain, the dataset and the metrics.

Each task turns a unit of image ids into per-image payloads and metric values, and
reduces finished records to the dataset-level metrics of the summary.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Type
import logging

import numpy as np

from ..backend.oracle import value_range
from ..chains import (
    ChainContext,
    blind_variant,
    classify_batch,
    detect,
    direct_boxes,
    estimate_depth_ranks,
    estimate_normal_ranks,
    group_point,
    list_objects,
    segment_direct,
    segment_image,
)
from ..core.domain import ClassVocabulary
from ..core.geometry import LabeledBox, PixelBox, box_iou
from ..errors import UndefinedCorrelation
from ..globalize import scale_shift_fit
from ..metrics import (
    ConfusionAccumulator,
    average_precision,
    depth_metrics,
    mean_values,
    multilabel_precision_recall,
    normal_axis_rho,
    pairwise_accuracy,
    raster_spearman,
    seg_metrics,
    segment_means,
    superpixel_upper_bound,
)
from ..raster import (
    BinaryMask,
    Dataset,
    ImageBuffer,
    IndexMask,
    read_mask_png,
    write_binary_png,
    write_image,
    write_mask_png,
    write_pfm,
)
from ..superpixel import slic
from .manifest import RunManifest
from .records import ResultRecord

logger = logging.getLogger(__name__)

PREDICTIONS = "predictions"
Metrics = Dict[str, Optional[float]]


@dataclass
class ImageResult:
    """Chain output of one image before it becomes a record."""

    image_id: str
    payload: Dict[str, Any] = field(default_factory=dict)
    metrics: Metrics = field(default_factory=dict)


def _box_json(box: LabeledBox, vocab: ClassVocabulary) -> Dict[str, Any]:
    return {
        "class": vocab.name_of(box.class_id),
        "x_min": box.box.x_min,
        "y_min": box.box.y_min,
        "x_max": box.box.x_max,
        "y_max": box.box.y_max,
        "score": box.score,
    }


def box_from_json(data: Dict[str, Any], vocab: ClassVocabulary) -> LabeledBox:
    box = PixelBox(data["x_min"], data["y_min"], data["x_max"], data["y_max"])
    return LabeledBox(box, vocab.id_of(data["class"]), float(data.get("score", 1.0)))


def mask_iou(pred: BinaryMask, gt: BinaryMask) -> float:
    """IoU of two binary masks; two empty masks agree perfectly."""
    union = int(np.count_nonzero(pred.bits | gt.bits))
    if union == 0:
        return 1.0
    return int(np.count_nonzero(pred.bits & gt.bits)) / union


class TaskRunner(ABC):
    """Runs one task kind over a dataset.

    Args:
        manifest: The run description
        dataset: Ground truth the outputs are scored against
        run_dir: Run output directory; rasters go under ``predictions/``
    """

    task: str = ""

    def __init__(self, manifest: RunManifest, dataset: Dataset, run_dir: Path):
        self.manifest = manifest
        self.params = manifest.chain
        self.dataset = dataset
        self.vocab = dataset.vocab
        self.run_dir = Path(run_dir)

    def units(self, image_ids: Sequence[str]) -> List[List[str]]:
        """Groups of images answered together; one image per unit by default."""
        return [[image_id] for image_id in image_ids]

    def chain(self, fn: Any) -> Any:
        """The chain as configured; blind runs see a blank canvas."""
        return blind_variant(fn, self.params.blank_color) if self.params.blind else fn

    def canvas(self, image: ImageBuffer) -> ImageBuffer:
        if self.params.blind:
            return ImageBuffer.blank(image.size, self.params.blank_color)
        return image

    def prediction_path(self, family: str, name: str) -> Path:
        path = self.run_dir / PREDICTIONS / family / name
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def relative(self, path: Path) -> str:
        return path.relative_to(self.run_dir).as_posix()

    @abstractmethod
    def process(self, ctx: ChainContext, image_ids: List[str]) -> List[ImageResult]:
        """Run the chain on a unit and score each image."""
        pass

    def aggregate(self, records: List[ResultRecord]) -> Metrics:
        """Dataset-level metrics over successful records; per-image means by default."""
        return mean_values(r.metrics for r in records)


class ClassifyTask(TaskRunner):
    task = "classify"

    def units(self, image_ids: Sequence[str]) -> List[List[str]]:
        size = self.params.classify_batch_size
        ids = list(image_ids)
        return [ids[i : i + size] for i in range(0, len(ids), size)]

    def process(self, ctx: ChainContext, image_ids: List[str]) -> List[ImageResult]:
        images = [(image_id, self.dataset.image(image_id)) for image_id in image_ids]
        run = self.chain(classify_batch)
        labels = run(ctx, images, self.vocab, self.params.classify_batch_size)
        results = []
        for (image_id, image), label in zip(images, labels):
            truth = self.dataset.ground_truth(image_id, image.size).label
            results.append(
                ImageResult(
                    image_id,
                    {"class": None if label is None else self.vocab.name_of(label)},
                    {"top1": float(label is not None and label == truth)},
                )
            )
        return results


class ListTask(TaskRunner):
    task = "list"

    def process(self, ctx: ChainContext, image_ids: List[str]) -> List[ImageResult]:
        (image_id,) = image_ids
        image = self.dataset.image(image_id)
        run = self.chain(list_objects)
        found = run(ctx, image_id, image, self.vocab, self.params.list_strategy)
        truth = self.dataset.ground_truth(image_id, image.size).classes()
        scores = multilabel_precision_recall([found], [truth])
        names = sorted(self.vocab.name_of(c) for c in found)
        return [ImageResult(image_id, {"classes": names}, dict(scores))]

    def aggregate(self, records: List[ResultRecord]) -> Metrics:
        preds = [{self.vocab.id_of(n) for n in r.payload["classes"]} for r in records]
        gts = [self.dataset.ground_truth(r.image_id).classes() for r in records]
        return dict(multilabel_precision_recall(preds, gts))


class DetectTask(TaskRunner):
    task = "detect"

    def locate(
        self, ctx: ChainContext, image_id: str, image: ImageBuffer, missed: List[int]
    ) -> List[LabeledBox]:
        run = self.chain(detect)
        return run(
            ctx,
            image_id,
            image,
            self.vocab,
            self.params.list_strategy,
            self.params.grid.to_params(),
            missed,
        )

    def process(self, ctx: ChainContext, image_ids: List[str]) -> List[ImageResult]:
        (image_id,) = image_ids
        image = self.dataset.image(image_id)
        missed: List[int] = []
        boxes = self.locate(ctx, image_id, image, missed)
        truth = self.dataset.ground_truth(image_id, image.size).boxes
        payload = {
            "boxes": [_box_json(b, self.vocab) for b in boxes],
            "not_found": sorted(self.vocab.name_of(c) for c in missed),
        }
        return [ImageResult(image_id, payload, {"mean_iou": self.mean_iou(boxes, truth)})]

    @staticmethod
    def mean_iou(boxes: Sequence[LabeledBox], truth: Sequence[LabeledBox]) -> Optional[float]:
        """Mean over annotated classes of the best IoU of the class's predicted box."""
        classes = sorted({b.class_id for b in truth})
        if not classes:
            return None
        scores = []
        for class_id in classes:
            targets = [t.box for t in truth if t.class_id == class_id]
            found = [b.box for b in boxes if b.class_id == class_id]
            scores.append(max((box_iou(f, t) for f in found for t in targets), default=0.0))
        return float(np.mean(scores))

    def aggregate(self, records: List[ResultRecord]) -> Metrics:
        preds = [[box_from_json(b, self.vocab) for b in r.payload["boxes"]] for r in records]
        gts = [list(self.dataset.ground_truth(r.image_id).boxes) for r in records]
        values: Metrics = dict(average_precision(preds, gts))
        values.update(mean_values(r.metrics for r in records))
        return values


class DirectDetectTask(DetectTask):
    """Detection scored like ``detect``, with boxes asked for as coordinates."""

    task = "detect_direct"

    def locate(
        self, ctx: ChainContext, image_id: str, image: ImageBuffer, missed: List[int]
    ) -> List[LabeledBox]:
        run = self.chain(direct_boxes)
        return run(ctx, image_id, image, self.vocab, self.params.list_strategy, missed)


class SegmentTask(TaskRunner):
    task = "segment"

    def label(self, ctx: ChainContext, image_id: str, image: ImageBuffer) -> IndexMask:
        run = self.chain(segment_image)
        return run(
            ctx,
            image_id,
            image,
            self.vocab,
            self.params.k,
            self.params.segment_batch_size,
            self.params.history,
            self.params.compactness,
            self.dataset.ignore_index,
        )

    def process(self, ctx: ChainContext, image_ids: List[str]) -> List[ImageResult]:
        (image_id,) = image_ids
        image = self.dataset.image(image_id)
        mask = self.label(ctx, image_id, image)
        path = self.prediction_path("masks", f"{image_id}.png")
        write_mask_png(mask, path)

        truth = self.dataset.ground_truth(image_id, image.size).mask
        if truth is None:
            raise ValueError(f"Image '{image_id}' has no ground-truth mask")
        metrics: Metrics = dict(
            seg_metrics(mask, truth, len(self.vocab), self.dataset.ignore_index)
        )
        # same superpixels the chain labeled
        spmap = slic(self.canvas(image), self.params.k, self.params.compactness)
        metrics["upper_bound_mIoU"] = superpixel_upper_bound(spmap, truth)
        return [ImageResult(image_id, {"mask": self.relative(path)}, metrics)]

    def aggregate(self, records: List[ResultRecord]) -> Metrics:
        confusion = ConfusionAccumulator(len(self.vocab))
        for record in records:
            pred = read_mask_png(
                self.run_dir / record.payload["mask"], self.vocab, self.dataset.ignore_index
            )
            truth = self.dataset.ground_truth(record.image_id, pred.size).mask
            if truth is not None:
                confusion.add(pred, truth)
        values: Metrics = dict(confusion.result())
        values["upper_bound_mIoU"] = mean_values(r.metrics for r in records).get(
            "upper_bound_mIoU"
        )
        return values


class DirectSegmentTask(SegmentTask):
    """Segmentation scored like ``segment``, from one numbered-regions question."""

    task = "segment_direct"

    def label(self, ctx: ChainContext, image_id: str, image: ImageBuffer) -> IndexMask:
        run = self.chain(segment_direct)
        return run(
            ctx,
            image_id,
            image,
            self.vocab,
            self.params.k,
            self.params.compactness,
            self.dataset.ignore_index,
        )


class GroupTask(TaskRunner):
    task = "group"

    def process(self, ctx: ChainContext, image_ids: List[str]) -> List[ImageResult]:
        (image_id,) = image_ids
        image = self.dataset.image(image_id)
        truth = self.dataset.ground_truth(image_id, image.size)
        run = self.chain(group_point)
        points, scores = [], []
        for index, point in enumerate(self.dataset.points(image_id)):
            mask = run(ctx, image_id, image, point, self.params.k, self.params.compactness)
            path = self.prediction_path("instances", f"{image_id}_{index}.png")
            write_binary_png(mask, path)
            points.append({"x": point.x, "y": point.y, "mask": self.relative(path)})
            scores.append(mask_iou(mask, truth.instances[point]))
        iou = float(np.mean(scores)) if scores else None
        return [ImageResult(image_id, {"points": points}, {"mean_iou": iou})]


class DepthTask(TaskRunner):
    task = "depth"

    def process(self, ctx: ChainContext, image_ids: List[str]) -> List[ImageResult]:
        (image_id,) = image_ids
        image = self.dataset.image(image_id)
        run = self.chain(estimate_depth_ranks)
        estimate = run(
            ctx,
            image_id,
            image,
            self.params.k,
            self.params.n_pairs,
            self.params.weights(),
            self.manifest.seed,
            self.params.ternary_depth,
            self.params.compactness,
        )
        truth = self.dataset.ground_truth(image_id, image.size).depth
        if truth is None:
            raise ValueError(f"Image '{image_id}' has no ground-truth depth")

        fit = scale_shift_fit(estimate.raster, truth)
        metric_depth = fit.apply(estimate.raster)
        ranks_path = self.prediction_path("ranks", f"{image_id}.pfm")
        depth_path = self.prediction_path("depth", f"{image_id}.pfm")
        write_pfm(estimate.raster, ranks_path)
        write_pfm(metric_depth, depth_path)

        metrics: Metrics = dict(depth_metrics(metric_depth, truth))
        try:
            metrics["rho"] = raster_spearman(estimate.raster, truth, seed=self.manifest.seed)
        except UndefinedCorrelation:
            metrics["rho"] = None
        tolerance = None
        if self.params.ternary_depth:
            tolerance = self.manifest.backend.equal_fraction * value_range(truth)
        if len(estimate.comparisons):
            metrics["pairwise_accuracy"] = pairwise_accuracy(
                estimate.comparisons, segment_means(estimate.spmap, truth), tolerance
            )
        else:
            metrics["pairwise_accuracy"] = None
        payload = {
            "ranks": self.relative(ranks_path),
            "depth": self.relative(depth_path),
            "scale": fit.scale,
            "shift": fit.shift,
            "degenerate": fit.degenerate,
            "comparisons": len(estimate.comparisons),
        }
        return [ImageResult(image_id, payload, metrics)]


class NormalsTask(TaskRunner):
    task = "normals"

    def process(self, ctx: ChainContext, image_ids: List[str]) -> List[ImageResult]:
        (image_id,) = image_ids
        image = self.dataset.image(image_id)
        run = self.chain(estimate_normal_ranks)
        estimate = run(
            ctx,
            image_id,
            image,
            self.params.k,
            self.params.n_pairs,
            self.params.weights(),
            self.manifest.seed,
            self.params.ternary_normals,
            self.params.compactness,
        )
        truth = self.dataset.ground_truth(image_id, image.size).normals
        if truth is None:
            raise ValueError(f"Image '{image_id}' has no ground-truth normals")

        payload: Dict[str, Any] = {}
        metrics: Metrics = {}
        for axis, raster, component in zip("xyz", estimate.rasters(), truth):
            path = self.prediction_path(f"normals_{axis}", f"{image_id}.pfm")
            write_pfm(raster, path)
            payload[f"ranks_{axis}"] = self.relative(path)
            metrics[f"rho_{axis}"] = normal_axis_rho(raster, component, seed=self.manifest.seed)
        sphere_path = self.prediction_path("sphere", f"{image_id}.png")
        write_image(estimate.sphere(), sphere_path)
        payload["sphere"] = self.relative(sphere_path)
        return [ImageResult(image_id, payload, metrics)]

    def aggregate(self, records: List[ResultRecord]) -> Metrics:
        values = mean_values(r.metrics for r in records)
        axes = [values[f"rho_{a}"] for a in "xyz" if values.get(f"rho_{a}") is not None]
        values["rho"] = float(np.mean(axes)) if axes else None
        return values


TASK_RUNNERS: Dict[str, Type[TaskRunner]] = {
    runner.task: runner
    for runner in (
        ClassifyTask,
        ListTask,
        DetectTask,
        DirectDetectTask,
        SegmentTask,
        DirectSegmentTask,
        GroupTask,
        DepthTask,
        NormalsTask,
    )
}


def task_runner(manifest: RunManifest, dataset: Dataset, run_dir: Path) -> TaskRunner:
    return TASK_RUNNERS[manifest.task](manifest, dataset, run_dir)
