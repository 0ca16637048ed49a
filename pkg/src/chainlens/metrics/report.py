"""Named metric values of one task over one evaluation set."""

from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple
import math

# Documented ranges; metrics not listed are unbounded.
METRIC_RANGES: Dict[str, Tuple[float, float]] = {
    "top1": (0.0, 1.0),
    "precision": (0.0, 1.0),
    "recall": (0.0, 1.0),
    "AP50": (0.0, 1.0),
    "AP75": (0.0, 1.0),
    "AP": (0.0, 1.0),
    "mean_iou": (0.0, 1.0),
    "mIoU": (0.0, 1.0),
    "pixel_acc": (0.0, 1.0),
    "upper_bound_mIoU": (0.0, 1.0),
    "delta1": (0.0, 1.0),
    "delta2": (0.0, 1.0),
    "delta3": (0.0, 1.0),
    "abs_rel": (0.0, math.inf),
    "rho": (-1.0, 1.0),
    "rho_x": (-1.0, 1.0),
    "rho_y": (-1.0, 1.0),
    "rho_z": (-1.0, 1.0),
    "pairwise_accuracy": (0.0, 100.0),
}

# Metrics where a smaller value is better.
LOWER_IS_BETTER = frozenset({"abs_rel"})


@dataclass(frozen=True)
class MetricReport:
    """One row of a results table.

    Attributes:
        task: Task kind (classify, detect, segment, group, depth, normals)
        values: Metric name to value; None marks a metric undefined on this set
        count: Number of images scored
    """

    task: str
    values: Dict[str, Optional[float]] = field(default_factory=dict)
    count: int = 0

    def __post_init__(self) -> None:
        errors = self.validate()
        if errors:
            raise ValueError("; ".join(errors))

    def validate(self) -> List[str]:
        """Check every value against its documented range.

        Returns:
            List of error messages (empty if valid)
        """
        errors = []
        if self.count < 0:
            errors.append(f"count must be non-negative (got {self.count})")
        for name, value in self.values.items():
            if value is None:
                continue
            if math.isnan(value):
                errors.append(f"{name} is NaN")
                continue
            low, high = METRIC_RANGES.get(name, (-math.inf, math.inf))
            # small slack absorbs float rounding in averaged values
            if not low - 1e-9 <= value <= high + 1e-9:
                errors.append(f"{name}={value} outside [{low}, {high}]")
        return errors

    def get(self, name: str) -> Optional[float]:
        return self.values.get(name)

    def to_dict(self) -> Dict[str, Any]:
        return {"task": self.task, "count": self.count, "values": dict(sorted(self.values.items()))}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "MetricReport":
        return cls(str(data["task"]), dict(data.get("values", {})), int(data.get("count", 0)))


def mean_values(rows: Iterable[Mapping[str, Optional[float]]]) -> Dict[str, Optional[float]]:
    """Per-metric mean over rows, skipping None; None where every row is None."""
    collected: Dict[str, List[float]] = {}
    for row in rows:
        for name, value in row.items():
            bucket = collected.setdefault(name, [])
            if value is not None:
                bucket.append(value)
    return {
        name: (sum(values) / len(values) if values else None)
        for name, values in sorted(collected.items())
    }
