"""Pixel geometry primitives."""

from .primitives import RasterSize, Point, PixelBox, LabeledBox, box_iou

__all__ = ["RasterSize", "Point", "PixelBox", "LabeledBox", "box_iou"]
