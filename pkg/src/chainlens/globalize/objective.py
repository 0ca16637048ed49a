"""Quadratic objective over per-segment scalars.

Every term has the form ``w * (x_i - x_j - d)**2``: ordered pairs pull the difference
towards +1 (greater) or -1 (less), equal pairs and adjacency edges pull it towards 0.
The sum is stored as ``x^T A x - 2 b^T x + c`` with A a sparse graph Laplacian.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np
import numpy.typing as npt
from scipy import sparse

from ..superpixel import AdjacencyGraph
from .comparisons import ComparisonSet, Relation

_OFFSETS = {Relation.GREATER: 1.0, Relation.LESS: -1.0, Relation.EQUAL: 0.0}


@dataclass(frozen=True)
class ObjectiveWeights:
    """Term weights.

    Attributes:
        greater: Weight of greater-than terms
        less: Weight of less-than terms
        equal: Weight of equality terms
        smooth: Weight of adjacency smoothness terms
    """

    greater: float = 1.0
    less: float = 1.0
    equal: float = 1.0
    smooth: float = 1.0

    def validate(self) -> List[str]:
        """Validate weights.

        Returns:
            List of error messages (empty if valid)
        """
        return [
            f"Weight '{name}' must be non-negative (got {value})"
            for name, value in vars(self).items()
            if value < 0
        ]

    def of(self, relation: Relation) -> float:
        return {
            Relation.GREATER: self.greater,
            Relation.LESS: self.less,
            Relation.EQUAL: self.equal,
        }[relation]


@dataclass(frozen=True, eq=False)
class QuadraticObjective:
    """``f(x) = x^T A x - 2 b^T x + c``.

    Attributes:
        matrix: Sparse symmetric positive semidefinite A (CSR)
        linear: b
        constant: c
        weights: Weights the terms were assembled with
    """

    matrix: sparse.csr_matrix
    linear: npt.NDArray[np.float64]
    constant: float
    weights: ObjectiveWeights

    @property
    def k(self) -> int:
        return int(self.linear.shape[0])

    def evaluate(self, x: npt.ArrayLike) -> float:
        v = np.asarray(x, dtype=np.float64)
        return float(v @ (self.matrix @ v) - 2.0 * self.linear @ v + self.constant)

    def dense(self) -> npt.NDArray[np.float64]:
        return self.matrix.toarray()


def assemble_objective(
    comparisons: ComparisonSet,
    graph: Optional[AdjacencyGraph] = None,
    weights: ObjectiveWeights = ObjectiveWeights(),
) -> QuadraticObjective:
    """Sum the comparison terms and the adjacency smoothness terms.

    Raises:
        ValueError: On negative weights, out-of-range ids or a graph of another size
    """
    errors = weights.validate() + comparisons.validate()
    if graph is not None and graph.k != comparisons.k:
        errors.append(f"Adjacency has {graph.k} nodes but comparisons cover {comparisons.k}")
    if errors:
        raise ValueError("; ".join(errors))

    k = comparisons.k
    ii = [c.i for c in comparisons]
    jj = [c.j for c in comparisons]
    ww = [weights.of(c.relation) for c in comparisons]
    dd = [_OFFSETS[c.relation] for c in comparisons]
    if graph is not None and weights.smooth > 0:
        for i, j in graph:
            ii.append(i)
            jj.append(j)
            ww.append(weights.smooth)
            dd.append(0.0)

    i = np.asarray(ii, dtype=np.int64)
    j = np.asarray(jj, dtype=np.int64)
    w = np.asarray(ww, dtype=np.float64)
    d = np.asarray(dd, dtype=np.float64)

    rows = np.concatenate([i, j, i, j])
    cols = np.concatenate([i, j, j, i])
    vals = np.concatenate([w, w, -w, -w])
    matrix = sparse.coo_matrix((vals, (rows, cols)), shape=(k, k)).tocsr()
    matrix.sum_duplicates()
    matrix.eliminate_zeros()

    linear = np.zeros(k, dtype=np.float64)
    np.add.at(linear, i, w * d)
    np.add.at(linear, j, -w * d)
    constant = float(np.sum(w * d * d))
    return QuadraticObjective(matrix, linear, constant, weights)
