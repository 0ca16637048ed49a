"""SLIC superpixelation and the per-segment statistics the chains rely on."""

from dataclasses import dataclass
from typing import Iterable, Optional
import logging

import numpy as np
import numpy.typing as npt
from scipy import ndimage
from skimage.segmentation import slic as skimage_slic
from skimage.util import img_as_float

from ..core.geometry import PixelBox, Point, RasterSize
from ..raster import ImageBuffer

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SuperpixelMap:
    """Partition of an image into k 4-connected segments with dense ids 0..k-1.

    Attributes:
        labels: int32 segment id per pixel, shape (height, width)
        k: Segment count
        counts: Pixel count per segment
        boxes: Tight bounding box per segment
        centroids: (k, 2) array of (x, y) centroids
        anchors: Per segment, the member pixel closest to its centroid
    """

    labels: npt.NDArray[np.int32]
    k: int
    counts: npt.NDArray[np.int64]
    boxes: tuple[PixelBox, ...]
    centroids: npt.NDArray[np.float64]
    anchors: tuple[Point, ...]

    @classmethod
    def from_labels(cls, labels: npt.ArrayLike) -> "SuperpixelMap":
        """Build a map from any integer label raster; ids are re-densified in order."""
        raw = np.asarray(labels)
        if raw.ndim != 2 or raw.size == 0:
            raise ValueError(f"Expected a non-empty (H, W) label raster, got {raw.shape}")
        _, inverse = np.unique(raw.ravel(), return_inverse=True)
        flat = inverse.astype(np.int32)
        dense = flat.reshape(raw.shape)
        dense.setflags(write=False)
        k = int(flat.max()) + 1

        counts = np.bincount(flat, minlength=k)
        rows, cols = np.indices(raw.shape)
        cx = np.bincount(flat, weights=cols.ravel(), minlength=k) / counts
        cy = np.bincount(flat, weights=rows.ravel(), minlength=k) / counts
        centroids = np.stack([cx, cy], axis=1)
        centroids.setflags(write=False)

        boxes = tuple(
            PixelBox(sl[1].start, sl[0].start, sl[1].stop, sl[0].stop)
            for sl in ndimage.find_objects(dense + 1)
        )

        dist = (cols.ravel() - cx[flat]) ** 2 + (rows.ravel() - cy[flat]) ** 2
        order = np.lexsort((dist, flat))
        first = np.searchsorted(flat[order], np.arange(k))
        width = raw.shape[1]
        anchors = tuple(
            Point(int(order[f] % width), int(order[f] // width)) for f in first
        )
        counts.setflags(write=False)
        return cls(dense, k, counts, boxes, centroids, anchors)

    @property
    def size(self) -> RasterSize:
        return RasterSize(width=int(self.labels.shape[1]), height=int(self.labels.shape[0]))

    def segment_mask(self, segment: int) -> npt.NDArray[np.bool_]:
        """Boolean mask of one segment."""
        return self.labels == segment

    def region_mask(self, segments: Iterable[int]) -> npt.NDArray[np.bool_]:
        """Boolean mask of the union of several segments."""
        return np.isin(self.labels, np.fromiter(segments, dtype=np.int64))

    def region_box(self, segments: Iterable[int]) -> PixelBox:
        """Bounding box of the union of several segments."""
        box: Optional[PixelBox] = None
        for s in segments:
            box = self.boxes[s] if box is None else box.union(self.boxes[s])
        if box is None:
            raise ValueError("Region must contain at least one segment")
        return box

    def segment_at(self, point: Point) -> int:
        """Segment id under a pixel."""
        if not point.within(self.size):
            raise ValueError(f"{point} outside {self.size!r}")
        return int(self.labels[point.y, point.x])

    def __repr__(self) -> str:
        return f"SuperpixelMap({self.size.width}x{self.size.height}, k={self.k})"


def _merge_orphans(labels: npt.NDArray[np.int64]) -> npt.NDArray[np.int64]:
    """Split every label into 4-connected pieces and merge all but the largest piece
    into the largest adjacent segment."""
    out = labels.copy()
    next_id = int(labels.max()) + 1
    orphans: list[int] = []
    for index, sl in enumerate(ndimage.find_objects(labels + 1)):
        if sl is None:
            continue
        pieces, n = ndimage.label(labels[sl] == index)
        if n <= 1:
            continue
        sizes = np.bincount(pieces.ravel())
        sizes[0] = 0
        keep = int(np.argmax(sizes))
        for piece in range(1, n + 1):
            if piece == keep:
                continue
            view = out[sl]
            view[pieces == piece] = next_id
            orphans.append(next_id)
            next_id += 1

    for orphan in orphans:
        mask = out == orphan
        ring = ndimage.binary_dilation(mask) & ~mask
        neighbours = np.unique(out[ring])
        if neighbours.size == 0:
            continue
        sizes = np.bincount(out.ravel(), minlength=next_id)[neighbours]
        out[mask] = neighbours[int(np.argmax(sizes))]
    if orphans:
        logger.debug("Merged %d orphan fragments", len(orphans))
    return out


def slic(
    image: ImageBuffer,
    k_target: int,
    compactness: float = 10.0,
    iterations: int = 10,
) -> SuperpixelMap:
    """SLIC superpixels with 4-connectivity enforced.

    Args:
        image: Input image
        k_target: Requested number of segments
        compactness: Color/space trade-off (higher = more regular segments)
        iterations: Maximum k-means iterations

    Raises:
        ValueError: If k_target < 1 or exceeds the pixel count
    """
    size = image.size
    if k_target < 1:
        raise ValueError(f"k_target must be at least 1 (got {k_target})")
    if k_target > size.pixel_count:
        raise ValueError(f"k_target {k_target} exceeds the pixel count {size.pixel_count}")

    if k_target == 1:
        return SuperpixelMap.from_labels(np.zeros(size.shape, dtype=np.int64))
    if k_target == size.pixel_count:
        # grid seeding puts one seed on every pixel
        return SuperpixelMap.from_labels(np.arange(size.pixel_count).reshape(size.shape))

    labels = skimage_slic(
        img_as_float(image.pixels),
        n_segments=k_target,
        compactness=compactness,
        max_num_iter=iterations,
        sigma=0,
        start_label=0,
        enforce_connectivity=True,
        channel_axis=-1,
    )
    labels = _merge_orphans(SuperpixelMap.from_labels(labels).labels.astype(np.int64))
    return SuperpixelMap.from_labels(labels)
