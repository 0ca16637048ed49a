"""PNG persistence for RGB images, index masks and binary masks."""

from pathlib import Path
from typing import Optional, Union

import numpy as np
from PIL import Image

from ..core.domain import ClassVocabulary
from ..errors import MaskFormatError
from .buffers import BinaryMask, ImageBuffer, IndexMask

PathLike = Union[str, Path]

# Pillow modes that decode to one index per pixel
_INDEX_MODES = {"L", "P", "I", "I;16", "I;16B", "I;16L"}


def read_image(path: PathLike) -> ImageBuffer:
    """Read a PNG/JPEG image as 8-bit RGB."""
    with Image.open(path) as img:
        return ImageBuffer(np.asarray(img.convert("RGB"), dtype=np.uint8))


def write_image(image: ImageBuffer, path: PathLike) -> None:
    """Write an RGB image; format follows the file suffix."""
    Image.fromarray(image.to_array()).save(path)


def read_mask_png(
    path: PathLike,
    vocab: Optional[ClassVocabulary] = None,
    ignore_index: Optional[int] = None,
) -> IndexMask:
    """Read an 8- or 16-bit single-channel PNG as an index mask.

    Args:
        path: PNG file
        vocab: When given, every non-sentinel label must be a valid class id
        ignore_index: Sentinel value for unlabeled pixels; defaults to the vocabulary's
            (255 without one)

    Raises:
        MaskFormatError: On multi-channel input, labels outside the vocabulary or a
            sentinel that collides with a class id
    """
    if ignore_index is None:
        ignore_index = vocab.ignore_index if vocab is not None else 255
    if vocab is not None:
        errors = vocab.ignore_index_errors(ignore_index)
        if errors:
            raise MaskFormatError(f"{path}: " + "; ".join(errors))
    with Image.open(path) as img:
        if img.mode not in _INDEX_MODES:
            raise MaskFormatError(f"{path}: expected a single-channel PNG, got mode {img.mode}")
        labels = np.asarray(img)
    if labels.min() < 0 or labels.max() > np.iinfo(np.uint16).max:
        raise MaskFormatError(f"{path}: labels do not fit 16 bits")
    mask = IndexMask(labels.astype(np.uint16), ignore_index=ignore_index)
    if vocab is not None:
        errors = mask.validate(len(vocab))
        if errors:
            raise MaskFormatError(f"{path}: " + "; ".join(errors))
    return mask


def write_mask_png(mask: IndexMask, path: PathLike) -> None:
    """Write an index mask; 8-bit when every value fits, 16-bit otherwise."""
    labels = mask.labels
    if int(labels.max()) <= 255:
        Image.fromarray(labels.astype(np.uint8)).save(path)
    else:
        Image.fromarray(labels.astype(np.uint16)).save(path)


def read_binary_png(path: PathLike) -> BinaryMask:
    """Read a binary mask; any non-zero pixel is set."""
    with Image.open(path) as img:
        return BinaryMask(np.asarray(img.convert("L")) > 0)


def write_binary_png(mask: BinaryMask, path: PathLike) -> None:
    """Write a binary mask as an 8-bit 0/255 PNG."""
    Image.fromarray(mask.bits.astype(np.uint8) * 255).save(path)
