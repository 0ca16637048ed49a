"""Immutable raster buffers: RGB images, float rasters, index masks and binary masks.

Every buffer owns a read-only numpy array in row-major (rows, cols[, channels]) order
so that buffers can be shared between threads without copying.
"""

from dataclasses import dataclass
from typing import Optional
import hashlib

import numpy as np
import numpy.typing as npt

from ..core.geometry import PixelBox, RasterSize

RGB = tuple[int, int, int]


def _frozen(array: npt.NDArray, dtype: npt.DTypeLike) -> npt.NDArray:
    out = np.array(array, dtype=dtype, copy=True, order="C")
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class ImageBuffer:
    """8-bit RGB image.

    Attributes:
        pixels: uint8 array of shape (height, width, 3)
    """

    pixels: npt.NDArray[np.uint8]

    def __post_init__(self) -> None:
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 3:
            raise ValueError(f"Expected (H, W, 3) pixels, got shape {self.pixels.shape}")
        if self.pixels.shape[0] < 1 or self.pixels.shape[1] < 1:
            raise ValueError("Image must contain at least one pixel")
        object.__setattr__(self, "pixels", _frozen(self.pixels, np.uint8))

    @classmethod
    def blank(cls, size: RasterSize, color: RGB = (0, 0, 0)) -> "ImageBuffer":
        """Uniformly colored image."""
        pixels = np.empty((size.height, size.width, 3), dtype=np.uint8)
        pixels[...] = np.asarray(color, dtype=np.uint8)
        return cls(pixels)

    @property
    def size(self) -> RasterSize:
        return RasterSize(width=int(self.pixels.shape[1]), height=int(self.pixels.shape[0]))

    def crop(self, box: PixelBox) -> "ImageBuffer":
        """Copy of the pixels inside box (box must lie within the image)."""
        if not box.within(self.size):
            raise ValueError(f"{box!r} exceeds image {self.size!r}")
        return ImageBuffer(self.pixels[box.slices()])

    def to_array(self) -> npt.NDArray[np.uint8]:
        """Writable copy of the pixels."""
        return np.array(self.pixels, copy=True)

    def digest(self) -> str:
        """SHA-256 over shape and pixel bytes."""
        h = hashlib.sha256()
        h.update(f"{self.pixels.shape}".encode())
        h.update(self.pixels.tobytes())
        return h.hexdigest()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ImageBuffer):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __repr__(self) -> str:
        return f"ImageBuffer({self.size.width}x{self.size.height})"


@dataclass(frozen=True, eq=False)
class FloatRaster:
    """Single-channel 32-bit float raster with optional validity mask.

    Attributes:
        values: float32 array of shape (height, width)
        valid: Optional boolean array; None means every pixel is valid
    """

    values: npt.NDArray[np.float32]
    valid: Optional[npt.NDArray[np.bool_]] = None

    def __post_init__(self) -> None:
        if self.values.ndim != 2 or self.values.size == 0:
            raise ValueError(f"Expected non-empty (H, W) values, got shape {self.values.shape}")
        object.__setattr__(self, "values", _frozen(self.values, np.float32))
        if self.valid is not None:
            if self.valid.shape != self.values.shape:
                raise ValueError("Validity mask must match the raster shape")
            object.__setattr__(self, "valid", _frozen(self.valid, np.bool_))
        if not np.all(np.isfinite(self.values[self.validity()])):
            raise ValueError("Raster holds non-finite values on valid pixels")

    @property
    def size(self) -> RasterSize:
        return RasterSize(width=int(self.values.shape[1]), height=int(self.values.shape[0]))

    def validity(self) -> npt.NDArray[np.bool_]:
        """Boolean mask of valid pixels (all True when no mask is attached)."""
        if self.valid is None:
            return np.ones(self.values.shape, dtype=bool)
        return self.valid

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FloatRaster):
            return NotImplemented
        return np.array_equal(self.validity(), other.validity()) and np.array_equal(
            self.values[self.validity()], other.values[other.validity()]
        )

    def __repr__(self) -> str:
        return f"FloatRaster({self.size.width}x{self.size.height})"


@dataclass(frozen=True, eq=False)
class IndexMask:
    """Semantic segmentation raster of 16-bit class indices.

    Attributes:
        labels: uint16 array of shape (height, width)
        ignore_index: Sentinel for unlabeled pixels
    """

    labels: npt.NDArray[np.uint16]
    ignore_index: int = 255

    def __post_init__(self) -> None:
        if self.labels.ndim != 2 or self.labels.size == 0:
            raise ValueError(f"Expected non-empty (H, W) labels, got shape {self.labels.shape}")
        if not 0 <= self.ignore_index <= np.iinfo(np.uint16).max:
            raise ValueError(f"ignore_index {self.ignore_index} does not fit 16 bits")
        object.__setattr__(self, "labels", _frozen(self.labels, np.uint16))

    @property
    def size(self) -> RasterSize:
        return RasterSize(width=int(self.labels.shape[1]), height=int(self.labels.shape[0]))

    def validate(self, num_classes: int) -> list[str]:
        """Check every non-sentinel label against the vocabulary size.

        Returns:
            List of error messages (empty if valid)
        """
        labels = self.labels[self.labels != self.ignore_index]
        bad = np.unique(labels[labels >= num_classes])
        return [f"Label {int(v)} exceeds vocabulary of {num_classes} classes" for v in bad]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IndexMask):
            return NotImplemented
        return self.ignore_index == other.ignore_index and np.array_equal(
            self.labels, other.labels
        )

    def __repr__(self) -> str:
        return f"IndexMask({self.size.width}x{self.size.height})"


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """Boolean raster.

    Attributes:
        bits: bool array of shape (height, width)
    """

    bits: npt.NDArray[np.bool_]

    def __post_init__(self) -> None:
        if self.bits.ndim != 2 or self.bits.size == 0:
            raise ValueError(f"Expected non-empty (H, W) bits, got shape {self.bits.shape}")
        object.__setattr__(self, "bits", _frozen(self.bits, np.bool_))

    @classmethod
    def empty(cls, size: RasterSize) -> "BinaryMask":
        return cls(np.zeros(size.shape, dtype=bool))

    @property
    def size(self) -> RasterSize:
        return RasterSize(width=int(self.bits.shape[1]), height=int(self.bits.shape[0]))

    def count(self) -> int:
        return int(self.bits.sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __repr__(self) -> str:
        return f"BinaryMask({self.size.width}x{self.size.height}, {self.count()} set)"


def mask_to_box(mask: BinaryMask) -> Optional[PixelBox]:
    """Tight bounding box of the set pixels, or None for an empty mask."""
    rows = np.flatnonzero(mask.bits.any(axis=1))
    cols = np.flatnonzero(mask.bits.any(axis=0))
    if rows.size == 0:
        return None
    return PixelBox(int(cols[0]), int(rows[0]), int(cols[-1]) + 1, int(rows[-1]) + 1)
