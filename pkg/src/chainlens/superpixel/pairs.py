"""Random segment pairs for pairwise depth and normal comparisons."""

from dataclasses import dataclass
from typing import List

import numpy as np

from ..core.geometry import Point
from .slic import SuperpixelMap


@dataclass(frozen=True)
class PairSample:
    """Two distinct segments and the pixels their markers are anchored on.

    Attributes:
        i: First segment id
        j: Second segment id
        anchor_i: Member pixel of segment i nearest its centroid
        anchor_j: Member pixel of segment j nearest its centroid
    """

    i: int
    j: int
    anchor_i: Point
    anchor_j: Point

    def __post_init__(self) -> None:
        if self.i == self.j:
            raise ValueError(f"A pair needs two distinct segments (got {self.i} twice)")


def sample_pairs(spmap: SuperpixelMap, n: int, seed: int) -> List[PairSample]:
    """Draw n distinct unordered segment pairs without replacement.

    Deterministic for a given seed; n is capped at k(k-1)/2.

    Raises:
        ValueError: If n <= 0 or the map has fewer than two segments
    """
    if n <= 0:
        raise ValueError(f"Pair count must be positive (got {n})")
    if spmap.k < 2:
        raise ValueError(f"Pair sampling needs at least two segments (got {spmap.k})")
    rows, cols = np.triu_indices(spmap.k, k=1)
    rng = np.random.default_rng(seed)
    chosen = rng.choice(rows.size, size=min(n, rows.size), replace=False)
    return [
        PairSample(
            i=int(rows[c]),
            j=int(cols[c]),
            anchor_i=spmap.anchors[int(rows[c])],
            anchor_j=spmap.anchors[int(cols[c])],
        )
        for c in chosen
    ]
