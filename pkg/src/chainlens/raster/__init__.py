"""Raster buffers, file formats and the dataset layout."""

from .buffers import BinaryMask, FloatRaster, ImageBuffer, IndexMask, mask_to_box
from .pfm import read_pfm, write_pfm
from .masks import (
    read_binary_png,
    read_image,
    read_mask_png,
    write_binary_png,
    write_image,
    write_mask_png,
)
from .fill import HueWindow, crop_from_square, extract_fill_mask, pad_to_square
from .dataset import Dataset, DatasetWriter, GroundTruth

__all__ = [
    "BinaryMask",
    "FloatRaster",
    "ImageBuffer",
    "IndexMask",
    "mask_to_box",
    "read_pfm",
    "write_pfm",
    "read_binary_png",
    "read_image",
    "read_mask_png",
    "write_binary_png",
    "write_image",
    "write_mask_png",
    "HueWindow",
    "crop_from_square",
    "extract_fill_mask",
    "pad_to_square",
    "Dataset",
    "DatasetWriter",
    "GroundTruth",
]
