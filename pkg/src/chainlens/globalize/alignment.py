"""Least-squares scale and shift mapping a relative map onto metric depth."""

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import numpy.typing as npt

from ..raster import FloatRaster

RasterLike = Union[FloatRaster, npt.NDArray[np.floating]]


@dataclass(frozen=True)
class ScaleShift:
    """Affine map ``metric = scale * relative + shift``.

    Attributes:
        scale: Multiplier s
        shift: Offset t
        degenerate: True when the relative map was constant over the fitted pixels
    """

    scale: float
    shift: float
    degenerate: bool = False

    def apply(self, relative: FloatRaster) -> FloatRaster:
        values = self.scale * relative.values.astype(np.float64) + self.shift
        return FloatRaster(values.astype(np.float32), valid=relative.valid)


def _values_and_mask(raster: RasterLike) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.bool_]]:
    if isinstance(raster, FloatRaster):
        return raster.values.astype(np.float64), raster.validity()
    values = np.asarray(raster, dtype=np.float64)
    return values, np.isfinite(values)


def scale_shift_fit(
    relative: RasterLike,
    gt: RasterLike,
    validity: Optional[npt.NDArray[np.bool_]] = None,
) -> ScaleShift:
    """Solve ``min_{s,t} sum (s * d_i + t - g_i)^2`` over pixels valid in every input.

    Args:
        relative: Relative map d
        gt: Ground-truth metric map g
        validity: Optional extra pixel mask

    Raises:
        ValueError: On shape mismatch or fewer than two usable pixels
    """
    d, d_ok = _values_and_mask(relative)
    g, g_ok = _values_and_mask(gt)
    if d.shape != g.shape:
        raise ValueError(f"Shape mismatch: relative {d.shape} vs ground truth {g.shape}")
    usable = d_ok & g_ok
    if validity is not None:
        usable &= np.asarray(validity, dtype=bool)
    if int(usable.sum()) < 2:
        raise ValueError("Scale/shift fit needs at least two valid pixels")

    d, g = d[usable], g[usable]
    d_mean, g_mean = d.mean(), g.mean()
    dc = d - d_mean
    spread = float(dc @ dc)
    if np.ptp(d) == 0.0 or spread == 0.0:
        return ScaleShift(0.0, float(g_mean), degenerate=True)
    scale = float(dc @ (g - g_mean)) / spread
    return ScaleShift(scale, float(g_mean - scale * d_mean))
