"""Grayscale PFM ("Pf") reader and writer for depth, normal and rank rasters.

Layout: ``Pf\\n<width> <height>\\n<scale>\\n`` followed by width*height 32-bit floats,
bottom row first. A negative scale marks little-endian data. Invalid pixels are
stored as NaN and come back as a validity mask.
"""

from pathlib import Path
from typing import BinaryIO, Union
import logging

import numpy as np

from ..errors import PfmFormatError
from .buffers import FloatRaster

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _read_token_line(stream: BinaryIO, what: str) -> str:
    line = stream.readline()
    if not line.endswith(b"\n"):
        raise PfmFormatError(f"Truncated PFM header while reading {what}")
    try:
        return line.decode("ascii").strip()
    except UnicodeDecodeError:
        raise PfmFormatError(f"Non-ASCII PFM header line for {what}") from None


def read_pfm(path: PathLike) -> FloatRaster:
    """Read a single-channel PFM file.

    Raises:
        PfmFormatError: On a color ("PF") file, a malformed header or a short payload
    """
    with open(path, "rb") as stream:
        tag = _read_token_line(stream, "the tag")
        if tag == "PF":
            raise PfmFormatError("Color PFM ('PF') is not supported; expected 'Pf'")
        if tag != "Pf":
            raise PfmFormatError(f"Not a PFM file (tag {tag!r})")

        dims = _read_token_line(stream, "the dimensions").split()
        if len(dims) != 2:
            raise PfmFormatError(f"Malformed PFM dimensions {dims!r}")
        try:
            width, height = int(dims[0]), int(dims[1])
            scale = float(_read_token_line(stream, "the scale"))
        except ValueError as e:
            raise PfmFormatError(f"Malformed PFM header: {e}") from None
        if width < 1 or height < 1:
            raise PfmFormatError(f"Invalid PFM dimensions {width}x{height}")
        if scale == 0.0:
            raise PfmFormatError("PFM scale must be non-zero")

        dtype = np.dtype("<f4") if scale < 0 else np.dtype(">f4")
        expected = width * height * dtype.itemsize
        payload = stream.read(expected)
        if len(payload) != expected:
            raise PfmFormatError(
                f"Truncated PFM payload: expected {expected} bytes, got {len(payload)}"
            )

    values = np.frombuffer(payload, dtype=dtype).reshape(height, width)
    values = np.flipud(values).astype(np.float32)
    finite = np.isfinite(values)
    if finite.all():
        return FloatRaster(values)
    logger.debug("%s: %d non-finite pixels marked invalid", path, int((~finite).sum()))
    return FloatRaster(np.where(finite, values, np.float32(0.0)), valid=finite)


def write_pfm(raster: FloatRaster, path: PathLike) -> None:
    """Write a raster as little-endian grayscale PFM; invalid pixels become NaN."""
    values = np.array(raster.values, dtype="<f4", copy=True)
    values[~raster.validity()] = np.nan
    height, width = values.shape
    with open(path, "wb") as stream:
        stream.write(f"Pf\n{width} {height}\n-1.0\n".encode("ascii"))
        stream.write(np.ascontiguousarray(np.flipud(values)).tobytes())
