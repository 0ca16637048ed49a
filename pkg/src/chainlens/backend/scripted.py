"""Seeded noisy oracle used for degradation studies and as a test double."""

from typing import Any, Literal, Optional, Sequence, Tuple, Type

import numpy as np

from ..globalize import Relation
from .base import GroundTruthBackend
from .oracle import OracleBackend
from .queries import (
    CoordinateQuery,
    MultiChoiceQuery,
    MultiLabelQuery,
    NormalizedBox,
    PairOrderQuery,
    PresenceQuery,
    Query,
    SameObjectQuery,
)

MultiLabelNoise = Literal["toggle", "add_only"]


class ScriptedBackend(GroundTruthBackend):
    """Oracle answers replaced by a uniformly random wrong option with probability ε.

    Coordinate answers swap each box for a uniformly random one instead.

    Randomness is drawn from a generator seeded by (seed, query digest), so an
    answer depends only on the query and the seed, never on the order queries arrive.

    Args:
        oracle: Source of the correct answers
        error_rate: Probability ε of answering wrongly, in [0, 1]
        seed: Noise seed
        multilabel_noise: "toggle" flips one random option in or out of the set;
            "add_only" adds one absent option and never drops a correct one
        noisy_kinds: Query classes the noise applies to; None means all kinds
    """

    backend_id = "scripted"

    def __init__(
        self,
        oracle: OracleBackend,
        error_rate: float,
        seed: int = 0,
        multilabel_noise: MultiLabelNoise = "toggle",
        noisy_kinds: Optional[Sequence[Type[Query]]] = None,
    ):
        if not 0.0 <= error_rate <= 1.0:
            raise ValueError(f"error_rate must lie in [0, 1] (got {error_rate})")
        if multilabel_noise not in ("toggle", "add_only"):
            raise ValueError(f"Unknown multi-label noise mode '{multilabel_noise}'")
        self.oracle = oracle
        self.error_rate = error_rate
        self.seed = seed
        self.multilabel_noise = multilabel_noise
        self.noisy_kinds: Optional[Tuple[Type[Query], ...]] = (
            tuple(noisy_kinds) if noisy_kinds is not None else None
        )
        self.model_id = f"oracle-eps{error_rate:g}-seed{seed}"

    def _rng(self, query: Query) -> np.random.Generator:
        return np.random.default_rng([self.seed, int(query.digest()[:16], 16)])

    def answer_value(self, query: Query) -> Any:
        truth = self.oracle.answer_value(query)
        if self.error_rate == 0.0:
            return truth
        if self.noisy_kinds is not None and not isinstance(query, self.noisy_kinds):
            return truth
        rng = self._rng(query)

        if isinstance(query, MultiChoiceQuery):
            return tuple(self._choice(rng, t, len(query.options)) for t in truth)
        if isinstance(query, MultiLabelQuery):
            return self._labels(rng, truth, len(query.options))
        if isinstance(query, (PresenceQuery, SameObjectQuery)):
            return (not truth) if rng.random() < self.error_rate else truth
        if isinstance(query, PairOrderQuery):
            if rng.random() >= self.error_rate:
                return truth
            wrong = [r for r in query.relations if r != truth]
            return Relation(wrong[int(rng.integers(len(wrong)))])
        if isinstance(query, CoordinateQuery):
            return tuple(self._box(rng, box) for box in truth)
        return truth

    def _choice(self, rng: np.random.Generator, truth: Optional[int], n: int) -> Optional[int]:
        # an ignored region has no wrong answer
        if rng.random() >= self.error_rate or truth is None or n < 2:
            return truth
        wrong = [o for o in range(n) if o != truth]
        return wrong[int(rng.integers(len(wrong)))]

    def _labels(self, rng: np.random.Generator, truth: frozenset, n: int) -> frozenset:
        if rng.random() >= self.error_rate:
            return truth
        if self.multilabel_noise == "add_only":
            absent = [o for o in range(n) if o not in truth]
            if not absent:
                return truth
            return truth | {absent[int(rng.integers(len(absent)))]}
        option = int(rng.integers(n))
        return truth ^ {option}

    def _box(self, rng: np.random.Generator, truth: NormalizedBox) -> NormalizedBox:
        if rng.random() >= self.error_rate:
            return truth
        x0, x1 = sorted(float(v) for v in rng.random(2))
        y0, y1 = sorted(float(v) for v in rng.random(2))
        return (x0, y0, x1, y1)
