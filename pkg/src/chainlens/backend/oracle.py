"""Ground-truth answers to every query kind.

Option indices of multi-choice and multi-label queries are class ids: chains always
list the options in vocabulary order.
"""

from typing import Any, Callable, Mapping, Optional, Tuple, Union

import numpy as np
import numpy.typing as npt

from ..errors import MissingGroundTruth
from ..globalize import Axis, Relation, relation_between
from ..raster import FloatRaster, GroundTruth
from .base import GroundTruthBackend
from .queries import (
    CoordinateQuery,
    MultiChoiceQuery,
    MultiLabelQuery,
    PairOrderQuery,
    PresenceQuery,
    Query,
    NormalizedBox,
    Region,
    SameObjectQuery,
)

GroundTruthSource = Union[Mapping[str, GroundTruth], Callable[[str], GroundTruth]]

_AXIS_INDEX = {Axis.X: 0, Axis.Y: 1, Axis.Z: 2}


def majority_class(
    labels: npt.NDArray[np.integer], region: npt.NDArray[np.bool_], ignore_index: int
) -> Optional[int]:
    """Most frequent non-ignored label inside region; ties go to the smallest id.

    Returns:
        The class id, or None when every pixel of the region is ignored
    """
    values = labels[region]
    values = values[values != ignore_index]
    if values.size == 0:
        return None
    return int(np.argmax(np.bincount(values.astype(np.int64))))


def region_mean(raster: FloatRaster, region: npt.NDArray[np.bool_]) -> float:
    """Mean of the valid raster values inside region."""
    usable = raster.validity() & region
    if not usable.any():
        raise MissingGroundTruth("Region holds no valid ground-truth pixels")
    return float(raster.values[usable].astype(np.float64).mean())


def value_range(raster: FloatRaster) -> float:
    """max - min over valid pixels."""
    values = raster.values[raster.validity()]
    if values.size == 0:
        return 0.0
    return float(values.max()) - float(values.min())


class OracleBackend(GroundTruthBackend):
    """Answers every sub-task from annotations.

    Args:
        ground_truth: Mapping or callable from image id to its annotations
        equal_fraction: Ternary comparisons answer "equal" when the two region means
            differ by less than this fraction of the image's value range
    """

    backend_id = "oracle"
    model_id = "ground-truth"

    def __init__(self, ground_truth: GroundTruthSource, equal_fraction: float = 0.05):
        if not 0.0 <= equal_fraction < 1.0:
            raise ValueError(f"equal_fraction must lie in [0, 1) (got {equal_fraction})")
        self._source = ground_truth
        self.equal_fraction = equal_fraction

    def ground_truth(self, image_id: str) -> GroundTruth:
        if callable(self._source):
            return self._source(image_id)
        try:
            return self._source[image_id]
        except KeyError:
            raise MissingGroundTruth(f"No annotations for image '{image_id}'") from None

    def answer_value(self, query: Query) -> Any:
        if isinstance(query, MultiChoiceQuery):
            return tuple(self._choice(item.region) for item in query.items)
        if isinstance(query, MultiLabelQuery):
            return self._labels(query.item.region)
        if isinstance(query, PresenceQuery):
            return self._present(query.item.region, query.class_id)
        if isinstance(query, CoordinateQuery):
            return self._coordinates(query.item.region, query.class_id)
        if isinstance(query, PairOrderQuery):
            return self._order(query)
        if isinstance(query, SameObjectQuery):
            return self._same(query)
        raise MissingGroundTruth(f"Unsupported query kind {type(query).__name__}")

    def _choice(self, region: Region) -> Optional[int]:
        gt = self.ground_truth(region.image_id)
        if region.mask is None and region.box is None:
            if gt.label is None:
                raise MissingGroundTruth(f"Image '{region.image_id}' has no class label")
            return gt.label
        if gt.mask is None:
            raise MissingGroundTruth(f"Image '{region.image_id}' has no segmentation mask")
        return majority_class(gt.mask.labels, region.pixels(), gt.mask.ignore_index)

    def _labels(self, region: Region) -> frozenset:
        gt = self.ground_truth(region.image_id)
        window = region.window
        return frozenset(b.class_id for b in gt.boxes if b.box.intersects(window))

    def _present(self, region: Region, class_id: int) -> bool:
        gt = self.ground_truth(region.image_id)
        window = region.window
        return any(b.class_id == class_id and b.box.intersects(window) for b in gt.boxes)

    def _coordinates(self, region: Region, class_id: int) -> Tuple[NormalizedBox, ...]:
        gt = self.ground_truth(region.image_id)
        width, height = region.size.width, region.size.height
        return tuple(
            (b.box.x_min / width, b.box.y_min / height, b.box.x_max / width, b.box.y_max / height)
            for b in gt.boxes
            if b.class_id == class_id
        )

    def _raster(self, gt: GroundTruth, axis: Axis) -> FloatRaster:
        if axis is Axis.DEPTH:
            if gt.depth is None:
                raise MissingGroundTruth(f"Image '{gt.image_id}' has no depth")
            return gt.depth
        if gt.normals is None:
            raise MissingGroundTruth(f"Image '{gt.image_id}' has no surface normals")
        return gt.normals[_AXIS_INDEX[axis]]

    def _order(self, query: PairOrderQuery) -> Relation:
        gt = self.ground_truth(query.a.region.image_id)
        raster = self._raster(gt, query.axis)
        a = region_mean(raster, query.a.region.pixels())
        b = region_mean(raster, query.b.region.pixels())
        tolerance = self.equal_fraction * value_range(raster) if query.ternary else None
        return relation_between(a, b, tolerance)

    def _same(self, query: SameObjectQuery) -> bool:
        gt = self.ground_truth(query.candidate.region.image_id)
        instance = gt.instances.get(query.point)
        if instance is None:
            raise MissingGroundTruth(
                f"Image '{gt.image_id}' has no instance mask for {query.point}"
            )
        candidate = query.candidate.region.pixels()
        inside = int(np.count_nonzero(candidate & instance.bits))
        return inside * 2 > int(np.count_nonzero(candidate))


class SpecialistBackend(OracleBackend):
    """Oracle logic applied to a vision specialist's predictions instead of annotations.

    Detection keeps a cell iff it intersects a predicted box, coordinate questions get
    the predicted boxes, segmentation takes the predicted majority class, and pair
    relations come from the predicted rasters.
    """

    backend_id = "specialist"
    model_id = "specialist"
