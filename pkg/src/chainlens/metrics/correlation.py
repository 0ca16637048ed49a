"""Rank correlations between predictions and ground truth."""

from typing import Optional

import numpy as np
import numpy.typing as npt
from scipy import stats

from ..errors import UndefinedCorrelation
from ..raster import FloatRaster

RHO_SAMPLE = 10_000


def _pair(a: npt.ArrayLike, b: npt.ArrayLike) -> tuple[npt.NDArray[np.float64], ...]:
    x = np.asarray(a, dtype=np.float64).ravel()
    y = np.asarray(b, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise ValueError(f"Inputs differ in length ({x.size} vs {y.size})")
    if x.size < 2:
        raise ValueError(f"Need at least two values (got {x.size})")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise UndefinedCorrelation("Rank correlation of a constant input is undefined")
    return x, y


def spearman(a: npt.ArrayLike, b: npt.ArrayLike) -> float:
    """Pearson correlation of average-tie ranks.

    Raises:
        UndefinedCorrelation: If either input is constant
    """
    x, y = _pair(a, b)
    rho = np.corrcoef(stats.rankdata(x), stats.rankdata(y))[0, 1]
    return float(np.clip(rho, -1.0, 1.0))


def kendall_tau(a: npt.ArrayLike, b: npt.ArrayLike) -> float:
    """Kendall tau-b.

    Raises:
        UndefinedCorrelation: If either input is constant
    """
    x, y = _pair(a, b)
    return float(stats.kendalltau(x, y, variant="b").statistic)


def raster_spearman(
    pred: FloatRaster,
    gt: FloatRaster,
    validity: Optional[npt.NDArray[np.bool_]] = None,
    sample: int = RHO_SAMPLE,
    seed: int = 0,
) -> float:
    """Spearman rho over the pixels valid in both rasters.

    More than sample valid pixels are subsampled without replacement with a seeded
    generator, keeping pixel order.
    """
    if pred.size != gt.size:
        raise ValueError(f"Rasters differ in size: {pred.size!r} vs {gt.size!r}")
    usable = pred.validity() & gt.validity()
    if validity is not None:
        usable &= validity
    x = pred.values[usable]
    y = gt.values[usable]
    if x.size > sample:
        keep = np.sort(np.random.default_rng(seed).choice(x.size, size=sample, replace=False))
        x, y = x[keep], y[keep]
    return spearman(x, y)


def normal_axis_rho(
    pred_rank: FloatRaster, gt_component: FloatRaster, sample: int = RHO_SAMPLE, seed: int = 0
) -> Optional[float]:
    """Spearman rho of one normal axis; None marks an axis where rho is undefined."""
    try:
        return raster_spearman(pred_rank, gt_component, sample=sample, seed=seed)
    except UndefinedCorrelation:
        return None
