"""Small evaluation subsets that preserve the model ranking of the full set."""

from dataclasses import dataclass
from typing import List, Sequence, Tuple
import logging

import numpy as np
import numpy.typing as npt

from ..errors import NoSubsetFound
from .correlation import kendall_tau

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SubsetSelection:
    """Chosen subset size and one concrete subset.

    Attributes:
        size: Smallest candidate size whose mean tau reached the threshold
        indices: Sorted sample indices of the best-agreeing draw at that size
        mean_tau: Mean Kendall tau over the bootstrap draws at that size
    """

    size: int
    indices: Tuple[int, ...]
    mean_tau: float


def _agreement(
    subset_means: npt.NDArray[np.float64], full_means: npt.NDArray[np.float64]
) -> float:
    """Kendall tau of two model rankings; an all-tied ranking agrees only with another."""
    sub_flat = np.ptp(subset_means) == 0
    full_flat = np.ptp(full_means) == 0
    if sub_flat and full_flat:
        return 1.0
    if sub_flat or full_flat:
        return 0.0
    return kendall_tau(subset_means, full_means)


def _scores(scores: npt.ArrayLike) -> npt.NDArray[np.float64]:
    matrix = np.asarray(scores, dtype=np.float64)
    if matrix.ndim != 2:
        raise ValueError(f"Scores must be (models, samples), got shape {matrix.shape}")
    if matrix.shape[0] < 2:
        raise ValueError(f"Subset selection needs at least two models (got {matrix.shape[0]})")
    return matrix


def select_subset(
    scores: npt.ArrayLike,
    candidate_sizes: Sequence[int],
    threshold: float,
    bootstraps: int = 100,
    seed: int = 0,
) -> SubsetSelection:
    """Smallest subset size whose random subsets rank the models like the full set.

    For each size in ascending order, draws bootstraps subsets without replacement,
    ranks the models by mean score on each, and averages Kendall tau against the
    full-data ranking. One generator seeded once drives all draws.

    Args:
        scores: (models, samples) per-sample scores
        candidate_sizes: Subset sizes to try
        threshold: Minimum mean tau
        bootstraps: Draws per size
        seed: Generator seed

    Raises:
        NoSubsetFound: If no size reaches the threshold
    """
    matrix = _scores(scores)
    n = matrix.shape[1]
    if bootstraps < 1:
        raise ValueError(f"bootstraps must be at least 1 (got {bootstraps})")
    full = matrix.mean(axis=1)
    rng = np.random.default_rng(seed)
    best_tau, best_size = -np.inf, None
    for size in sorted(set(candidate_sizes)):
        if not 1 <= size <= n:
            logger.warning("Skipping subset size %d outside 1..%d", size, n)
            continue
        draws: List[npt.NDArray[np.int64]] = []
        taus: List[float] = []
        for _ in range(bootstraps):
            indices = np.sort(rng.choice(n, size=size, replace=False))
            draws.append(indices)
            taus.append(_agreement(matrix[:, indices].mean(axis=1), full))
        mean_tau = float(np.mean(taus))
        logger.debug("Subset size %d: mean tau %.4f", size, mean_tau)
        if mean_tau > best_tau:
            best_tau, best_size = mean_tau, size
        if mean_tau >= threshold:
            chosen = draws[int(np.argmax(taus))]
            return SubsetSelection(size, tuple(int(i) for i in chosen), mean_tau)
    raise NoSubsetFound(float(best_tau), best_size)


def select_hardest(scores: npt.ArrayLike, count: int = 10) -> Tuple[int, ...]:
    """Indices of the count samples with the lowest mean score across models, ascending."""
    matrix = np.asarray(scores, dtype=np.float64)
    if matrix.ndim != 2:
        raise ValueError(f"Scores must be (models, samples), got shape {matrix.shape}")
    if count < 1:
        raise ValueError(f"count must be at least 1 (got {count})")
    order = np.argsort(matrix.mean(axis=0), kind="stable")[:count]
    return tuple(sorted(int(i) for i in order))
