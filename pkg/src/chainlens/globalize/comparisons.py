"""Pairwise relations between segments."""

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, List, Optional, Sequence
import math


class Relation(str, Enum):
    """Outcome of comparing segment i against segment j."""

    GREATER = "greater"
    LESS = "less"
    EQUAL = "equal"

    def inverted(self) -> "Relation":
        if self is Relation.GREATER:
            return Relation.LESS
        if self is Relation.LESS:
            return Relation.GREATER
        return Relation.EQUAL


BINARY_RELATIONS = (Relation.GREATER, Relation.LESS)
TERNARY_RELATIONS = (Relation.GREATER, Relation.LESS, Relation.EQUAL)


class Axis(str, Enum):
    """Quantity being compared: metric depth or one camera-frame normal component."""

    DEPTH = "depth"
    X = "x"
    Y = "y"
    Z = "z"


NORMAL_AXES = (Axis.X, Axis.Y, Axis.Z)


def relation_between(a: float, b: float, equal_tolerance: Optional[float] = None) -> Relation:
    """Relation of value a to value b.

    Args:
        a: Value for the first segment
        b: Value for the second segment
        equal_tolerance: Absolute band under which the values count as equal; None
            restricts the outcome to greater/less (greater iff a > b)
    """
    if equal_tolerance is not None and (
        abs(a - b) < equal_tolerance or math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-12)
    ):
        return Relation.EQUAL
    return Relation.GREATER if a > b else Relation.LESS


@dataclass(frozen=True)
class Comparison:
    """One answered pair query.

    Attributes:
        i: First segment id
        j: Second segment id
        relation: How segment i relates to segment j
    """

    i: int
    j: int
    relation: Relation

    def __post_init__(self) -> None:
        if self.i == self.j:
            raise ValueError(f"Comparison of segment {self.i} with itself")
        if self.i < 0 or self.j < 0:
            raise ValueError(f"Negative segment id in ({self.i}, {self.j})")


@dataclass(frozen=True)
class ComparisonSet:
    """Comparisons over k segments along one axis.

    Contradictory entries for the same pair are all kept.

    Attributes:
        axis: Compared quantity
        k: Number of segments
        comparisons: Answered pairs in query order
    """

    axis: Axis
    k: int
    comparisons: tuple[Comparison, ...] = ()

    @classmethod
    def build(cls, axis: Axis, k: int, comparisons: Sequence[Comparison]) -> "ComparisonSet":
        """Create a set, raising ValueError when any id is out of range."""
        result = cls(axis, k, tuple(comparisons))
        errors = result.validate()
        if errors:
            raise ValueError("; ".join(errors))
        return result

    def validate(self) -> List[str]:
        """Validate segment ids.

        Returns:
            List of error messages (empty if valid)
        """
        errors = []
        if self.k < 1:
            errors.append(f"Segment count must be positive (got {self.k})")
        for n, c in enumerate(self.comparisons):
            if c.i >= self.k or c.j >= self.k:
                errors.append(f"Comparison {n}: ({c.i}, {c.j}) outside {self.k} segments")
        return errors

    def __len__(self) -> int:
        return len(self.comparisons)

    def __iter__(self) -> Iterator[Comparison]:
        return iter(self.comparisons)
