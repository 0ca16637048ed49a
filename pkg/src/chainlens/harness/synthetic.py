"""Seeded synthetic dataset covering every task.

Each image is a sky/ground scene with one to three disjoint colored blocks of
distinct classes, each covering at least 5% of the image. Depth is a smooth field
growing toward the horizon, normals are those of a sphere over a flat background
facing the camera, and every block contributes a grouping point at its center.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union
import logging

import numpy as np
import numpy.typing as npt

from ..core.domain import ClassVocabulary
from ..core.geometry import LabeledBox, PixelBox, Point, RasterSize
from ..raster import BinaryMask, DatasetWriter, FloatRaster, GroundTruth, ImageBuffer, IndexMask

logger = logging.getLogger(__name__)

SKY, GROUND = 0, 1
VOCABULARY = ClassVocabulary.from_names(
    ["sky", "ground", "red block", "green block", "blue block", "yellow block", "purple block"]
)
BLOCK_CLASSES = tuple(range(2, len(VOCABULARY)))
COLORS: Dict[int, Tuple[int, int, int]] = {
    0: (135, 190, 235),
    1: (110, 90, 60),
    2: (200, 40, 40),
    3: (40, 170, 60),
    4: (40, 60, 200),
    5: (220, 200, 40),
    6: (140, 60, 170),
}
MIN_AREA_FRACTION = 0.05


@dataclass(frozen=True)
class SyntheticSample:
    image: ImageBuffer
    truth: GroundTruth


def depth_field(size: RasterSize) -> npt.NDArray[np.float32]:
    """2 + 6 (1 - y/H) + 0.5 sin(2 pi x / W): far at the top, rippled across."""
    rows, cols = np.mgrid[0 : size.height, 0 : size.width].astype(np.float64)
    depth = 2.0 + 6.0 * (1.0 - rows / size.height) + 0.5 * np.sin(2 * np.pi * cols / size.width)
    return depth.astype(np.float32)


def sphere_normals(
    size: RasterSize, radius_fraction: float = 0.35
) -> Tuple[npt.NDArray[np.float32], ...]:
    """Unit normals of a centered sphere; (0, 0, 1) elsewhere."""
    rows, cols = np.mgrid[0 : size.height, 0 : size.width].astype(np.float64)
    radius = radius_fraction * min(size.width, size.height)
    nx = (cols + 0.5 - size.width / 2) / radius
    ny = (rows + 0.5 - size.height / 2) / radius
    inside = nx**2 + ny**2 < 1.0
    nz = np.sqrt(np.clip(1.0 - nx**2 - ny**2, 0.0, 1.0))
    x = np.where(inside, nx, 0.0)
    y = np.where(inside, ny, 0.0)
    z = np.where(inside, nz, 1.0)
    return tuple(a.astype(np.float32) for a in (x, y, z))


def _blocks(rng: np.random.Generator, size: RasterSize) -> List[PixelBox]:
    """One to three disjoint boxes, each at least MIN_AREA_FRACTION of the image."""
    min_side = int(np.ceil(np.sqrt(MIN_AREA_FRACTION * size.pixel_count)))
    max_side = max(min_side + 1, int(0.45 * min(size.width, size.height)))
    wanted = int(rng.integers(1, 4))
    boxes: List[PixelBox] = []
    for _ in range(200):
        if len(boxes) == wanted:
            break
        w = int(rng.integers(min_side, max_side + 1))
        h = int(rng.integers(min_side, max_side + 1))
        x = int(rng.integers(0, size.width - w + 1))
        y = int(rng.integers(0, size.height - h + 1))
        box = PixelBox(x, y, x + w, y + h)
        # a one-pixel gap keeps neighbouring blocks apart
        grown = PixelBox(max(0, x - 1), max(0, y - 1), x + w + 1, y + h + 1)
        if all(not grown.intersects(b) for b in boxes):
            boxes.append(box)
    return boxes


def synthetic_sample(
    rng: np.random.Generator, image_id: str, size: RasterSize = RasterSize(96, 96)
) -> SyntheticSample:
    """One image with every annotation family."""
    labels = np.full(size.shape, GROUND, dtype=np.uint16)
    horizon = int(rng.integers(size.height // 3, 2 * size.height // 3))
    labels[:horizon] = SKY

    boxes = _blocks(rng, size)
    classes = rng.choice(BLOCK_CLASSES, size=len(boxes), replace=False)
    annotated = []
    instances: Dict[Point, BinaryMask] = {}
    for box, class_id in zip(boxes, classes):
        labels[box.slices()] = class_id
        annotated.append(LabeledBox(box, int(class_id)))
        bits = np.zeros(size.shape, dtype=bool)
        bits[box.slices()] = True
        center = Point((box.x_min + box.x_max) // 2, (box.y_min + box.y_max) // 2)
        instances[center] = BinaryMask(bits)

    palette = np.array([COLORS[c] for c in range(len(VOCABULARY))], dtype=np.float64)
    pixels = palette[labels] + rng.normal(0.0, 4.0, size=(*size.shape, 3))
    image = ImageBuffer(np.clip(np.rint(pixels), 0, 255).astype(np.uint8))

    largest = max(annotated, key=lambda b: b.box.area())
    normals = sphere_normals(size)
    truth = GroundTruth(
        image_id=image_id,
        size=size,
        label=largest.class_id,
        boxes=tuple(annotated),
        mask=IndexMask(labels),
        depth=FloatRaster(depth_field(size)),
        normals=(FloatRaster(normals[0]), FloatRaster(normals[1]), FloatRaster(normals[2])),
        instances=instances,
    )
    return SyntheticSample(image, truth)


def synthetic_samples(
    seed: int, count: int, size: RasterSize = RasterSize(96, 96)
) -> List[SyntheticSample]:
    rng = np.random.default_rng(seed)
    return [synthetic_sample(rng, f"{i:05d}", size) for i in range(count)]


def generate_dataset(
    root: Union[str, Path],
    seed: int = 0,
    count: int = 500,
    size: Optional[RasterSize] = None,
) -> Path:
    """Write count synthetic images with every annotation family to root."""
    if count < 1:
        raise ValueError(f"count must be at least 1 (got {count})")
    writer = DatasetWriter(root, VOCABULARY)
    for sample in synthetic_samples(seed, count, size or RasterSize(96, 96)):
        gt = sample.truth
        writer.write_image(gt.image_id, sample.image)
        assert gt.label is not None and gt.mask is not None and gt.depth is not None
        writer.write_label(gt.image_id, gt.label)
        writer.write_boxes(gt.image_id, list(gt.boxes))
        writer.write_mask(gt.image_id, gt.mask)
        writer.write_depth(gt.image_id, gt.depth)
        assert gt.normals is not None
        writer.write_normals(gt.image_id, gt.normals)
        for point, instance in gt.instances.items():
            writer.write_point(gt.image_id, point, instance)
    writer.close()
    logger.info("Generated %d synthetic images in %s (seed %d)", count, root, seed)
    return Path(root)
