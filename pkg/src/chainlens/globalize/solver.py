"""Minimization of the rank objective with per-component gauge fixing."""

from dataclasses import dataclass
import logging

import numpy as np
import numpy.typing as npt
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import cg

from .objective import QuadraticObjective

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RankField:
    """Globalized per-segment values.

    Attributes:
        values: One finite value per segment, mean zero inside every component
        components: Connected-component id per segment
        n_components: Number of components
    """

    values: npt.NDArray[np.float64]
    components: npt.NDArray[np.int32]
    n_components: int

    @property
    def k(self) -> int:
        return int(self.values.shape[0])

    def __len__(self) -> int:
        return self.k


def solve_ranks(
    objective: QuadraticObjective, tol: float = 1e-10, iteration_factor: int = 10
) -> RankField:
    """Minimize the objective by conjugate gradients on A x = b.

    The objective is invariant to adding a constant inside any connected component of
    its coupling graph, so every component is solved separately and shifted to mean zero.

    Args:
        objective: Assembled objective
        tol: Absolute residual tolerance
        iteration_factor: Iteration cap per component, as a multiple of its size
    """
    matrix = objective.matrix
    n_components, components = connected_components(matrix, directed=False)
    values = np.zeros(objective.k, dtype=np.float64)

    for c in range(n_components):
        members = np.flatnonzero(components == c)
        if members.size == 1:
            continue
        block = matrix[members][:, members]
        rhs = objective.linear[members]
        x, info = cg(
            block,
            rhs,
            x0=np.zeros(members.size),
            rtol=0.0,
            atol=tol,
            maxiter=iteration_factor * members.size,
        )
        if info > 0:
            logger.warning(
                "CG did not reach tolerance %.1e on a %d-segment component", tol, members.size
            )
        values[members] = x - x.mean()

    components = components.astype(np.int32)
    values.setflags(write=False)
    components.setflags(write=False)
    return RankField(values, components, int(n_components))
