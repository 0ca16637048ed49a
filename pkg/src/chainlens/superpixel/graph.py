"""Segment adjacency."""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, Tuple

import numpy as np
import numpy.typing as npt

from .slic import SuperpixelMap


@dataclass(frozen=True)
class AdjacencyGraph:
    """Undirected graph over segment ids.

    Attributes:
        k: Node count
        edges: Sorted (i, j) pairs with i < j
    """

    k: int
    edges: Tuple[Tuple[int, int], ...]
    _neighbours: Dict[int, FrozenSet[int]] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        table: Dict[int, set[int]] = {i: set() for i in range(self.k)}
        for i, j in self.edges:
            if i == j:
                raise ValueError(f"Self-loop on segment {i}")
            if not (0 <= i < self.k and 0 <= j < self.k):
                raise ValueError(f"Edge ({i}, {j}) outside {self.k} nodes")
            table[i].add(j)
            table[j].add(i)
        object.__setattr__(
            self, "_neighbours", {i: frozenset(n) for i, n in table.items()}
        )

    def neighbours(self, segment: int) -> FrozenSet[int]:
        return self._neighbours[segment]

    def has_edge(self, i: int, j: int) -> bool:
        return j in self._neighbours.get(i, frozenset())

    def edge_array(self) -> npt.NDArray[np.int64]:
        """Edges as an (E, 2) integer array."""
        return np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        return iter(self.edges)


def adjacency(spmap: SuperpixelMap) -> AdjacencyGraph:
    """Edge (i, j) iff segments i and j share a horizontally or vertically adjacent pixel pair."""
    labels = spmap.labels
    left, right = labels[:, :-1].ravel(), labels[:, 1:].ravel()
    top, bottom = labels[:-1, :].ravel(), labels[1:, :].ravel()
    a = np.concatenate([left, top])
    b = np.concatenate([right, bottom])
    differs = a != b
    pairs = np.stack([np.minimum(a, b)[differs], np.maximum(a, b)[differs]], axis=1)
    if pairs.size == 0:
        return AdjacencyGraph(spmap.k, ())
    unique = np.unique(pairs, axis=0)
    return AdjacencyGraph(spmap.k, tuple((int(i), int(j)) for i, j in unique))
