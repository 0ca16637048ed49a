"""Segment values to pixel rasters, and normal fields to sphere-projected colors."""

from typing import Sequence, Union

import numpy as np
import numpy.typing as npt

from ..raster import FloatRaster, ImageBuffer
from ..superpixel import SuperpixelMap
from .solver import RankField


def floodfill_ranks(
    spmap: SuperpixelMap, field: Union[RankField, npt.ArrayLike]
) -> FloatRaster:
    """Give every pixel the value of its segment.

    Raises:
        ValueError: If the field length differs from the segment count
    """
    values = field.values if isinstance(field, RankField) else np.asarray(field, dtype=np.float64)
    if values.shape != (spmap.k,):
        raise ValueError(f"Field has {values.shape[0]} values for {spmap.k} segments")
    return FloatRaster(values[spmap.labels].astype(np.float32))


def sphere_project(fields: Sequence[FloatRaster]) -> npt.NDArray[np.float64]:
    """Per-pixel unit vectors from three axis rasters.

    Each axis is min-max normalized to [0, 1] and mapped to [-1, 1]; a constant axis
    maps to 0. Vectors are then renormalized; all-zero vectors stay zero.

    Returns:
        float64 array of shape (height, width, 3)
    """
    if len(fields) != 3:
        raise ValueError(f"Expected three axis rasters, got {len(fields)}")
    shapes = {f.values.shape for f in fields}
    if len(shapes) != 1:
        raise ValueError(f"Axis rasters differ in size: {sorted(shapes)}")

    axes = []
    for raster in fields:
        v = raster.values.astype(np.float64)
        low, high = float(v.min()), float(v.max())
        if high > low:
            axes.append((v - low) / (high - low) * 2.0 - 1.0)
        else:
            axes.append(np.zeros_like(v))
    vectors = np.stack(axes, axis=-1)
    norms = np.linalg.norm(vectors, axis=-1, keepdims=True)
    return np.divide(vectors, norms, out=np.zeros_like(vectors), where=norms > 0)


def normalize_and_sphere(fields: Sequence[FloatRaster]) -> ImageBuffer:
    """Sphere-projected normal field encoded as RGB, ``(n + 1) / 2 * 255``."""
    vectors = sphere_project(fields)
    rgb = np.rint((vectors + 1.0) * 0.5 * 255.0)
    return ImageBuffer(np.clip(rgb, 0, 255).astype(np.uint8))
