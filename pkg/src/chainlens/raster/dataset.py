"""On-disk dataset layout shared by ground truth and specialist predictions.

::

    <root>/
      vocab.txt                     one class name per line
      images/<id>.png|jpg           inputs
      labels.jsonl                  {"id", "class"}                  (classification)
      boxes.jsonl                   {"id", "boxes": [{"class", "x_min", "y_min", "x_max", "y_max"}]}
      masks/<id>.png                index masks                      (segmentation)
      points.jsonl                  {"id", "x", "y", "mask"}         (grouping)
      instances/<name>.png          binary instance masks referenced by points.jsonl
      depth/<id>.pfm                metric depth in meters
      normals_{x,y,z}/<id>.pfm      per-axis normal components

Every annotation family is optional; a directory holding specialist predictions uses
the same layout without ``images/``.
"""

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Tuple, Union
import json
import logging

import numpy as np

from ..core.domain import ClassVocabulary
from ..core.geometry import LabeledBox, PixelBox, Point, RasterSize
from ..errors import DatasetError
from .buffers import BinaryMask, FloatRaster, ImageBuffer, IndexMask
from .masks import (
    read_binary_png,
    read_image,
    read_mask_png,
    write_binary_png,
    write_image,
    write_mask_png,
)
from .pfm import read_pfm, write_pfm

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
NORMAL_AXES = ("x", "y", "z")
IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


@dataclass(frozen=True)
class GroundTruth:
    """Annotations for one image; also used to carry specialist predictions.

    Attributes:
        image_id: Dataset id (file stem)
        size: Image extent
        label: Image-level class id for classification
        boxes: Annotated boxes
        mask: Semantic index mask
        depth: Metric depth raster
        normals: Per-axis (x, y, z) normal component rasters
        instances: Grouping target mask per query point
    """

    image_id: str
    size: RasterSize
    label: Optional[int] = None
    boxes: Tuple[LabeledBox, ...] = ()
    mask: Optional[IndexMask] = None
    depth: Optional[FloatRaster] = None
    normals: Optional[Tuple[FloatRaster, FloatRaster, FloatRaster]] = None
    instances: Dict[Point, BinaryMask] = field(default_factory=dict)

    def classes(self) -> set[int]:
        """Class ids with at least one annotated box."""
        return {b.class_id for b in self.boxes}


def _read_jsonl(path: Path) -> List[Dict[str, Any]]:
    records = []
    with open(path, encoding="utf-8") as stream:
        for line_no, line in enumerate(stream, start=1):
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as e:
                raise DatasetError(f"{path}:{line_no}: {e}") from None
    return records


class Dataset:
    """Read access to a dataset directory.

    Args:
        root: Dataset directory
        vocab: Vocabulary override; defaults to ``<root>/vocab.txt``
        require_images: Whether ``images/`` must exist (False for prediction dirs)
        ignore_index: Mask sentinel for unlabeled pixels; defaults to the vocabulary's
    """

    def __init__(
        self,
        root: PathLike,
        vocab: Optional[ClassVocabulary] = None,
        require_images: bool = True,
        ignore_index: Optional[int] = None,
    ):
        self.root = Path(root)
        errors = self.validate_layout(require_images, vocab is None)
        if errors:
            raise DatasetError("; ".join(errors))
        if vocab is None:
            vocab = ClassVocabulary.from_file(self.root / "vocab.txt")
        self.vocab = vocab
        self.ignore_index = vocab.ignore_index if ignore_index is None else ignore_index
        errors = vocab.ignore_index_errors(self.ignore_index)
        if errors:
            raise DatasetError(f"{self.root}: " + "; ".join(errors))

    def validate_layout(self, require_images: bool, require_vocab: bool) -> List[str]:
        """Check the directory skeleton.

        Returns:
            List of error messages (empty if valid)
        """
        errors = []
        if not self.root.is_dir():
            return [f"Dataset directory {self.root} does not exist"]
        if require_images and not (self.root / "images").is_dir():
            errors.append(f"{self.root} has no images/ directory")
        if require_vocab and not (self.root / "vocab.txt").is_file():
            errors.append(f"{self.root} has no vocab.txt")
        return errors

    @cached_property
    def _image_files(self) -> Dict[str, Path]:
        folder = self.root / "images"
        if not folder.is_dir():
            return {}
        return {
            p.stem: p
            for p in sorted(folder.iterdir())
            if p.suffix.lower() in IMAGE_SUFFIXES
        }

    def image_ids(self) -> List[str]:
        """Sorted image ids."""
        return sorted(self._image_files)

    def __len__(self) -> int:
        return len(self._image_files)

    def __iter__(self) -> Iterator[str]:
        return iter(self.image_ids())

    def image(self, image_id: str) -> ImageBuffer:
        try:
            return read_image(self._image_files[image_id])
        except KeyError:
            raise DatasetError(f"No image '{image_id}' in {self.root}") from None

    @cached_property
    def _labels(self) -> Dict[str, int]:
        path = self.root / "labels.jsonl"
        if not path.is_file():
            return {}
        return {r["id"]: self.vocab.id_of(r["class"]) for r in _read_jsonl(path)}

    @cached_property
    def _boxes(self) -> Dict[str, Tuple[LabeledBox, ...]]:
        path = self.root / "boxes.jsonl"
        if not path.is_file():
            return {}
        out = {}
        for record in _read_jsonl(path):
            out[record["id"]] = tuple(
                LabeledBox(
                    box=PixelBox(b["x_min"], b["y_min"], b["x_max"], b["y_max"]),
                    class_id=self.vocab.id_of(b["class"]),
                    score=float(b.get("score", 1.0)),
                )
                for b in record["boxes"]
            )
        return out

    @cached_property
    def _points(self) -> Dict[str, List[Tuple[Point, Path]]]:
        path = self.root / "points.jsonl"
        if not path.is_file():
            return {}
        out: Dict[str, List[Tuple[Point, Path]]] = {}
        for record in _read_jsonl(path):
            out.setdefault(record["id"], []).append(
                (Point(int(record["x"]), int(record["y"])), self.root / record["mask"])
            )
        return out

    def has_boxes(self) -> bool:
        return (self.root / "boxes.jsonl").is_file()

    def points(self, image_id: str) -> List[Point]:
        """Grouping query points of an image, in file order."""
        return [p for p, _ in self._points.get(image_id, [])]

    def _optional_pfm(self, folder: str, image_id: str) -> Optional[FloatRaster]:
        path = self.root / folder / f"{image_id}.pfm"
        return read_pfm(path) if path.is_file() else None

    def ground_truth(self, image_id: str, size: Optional[RasterSize] = None) -> GroundTruth:
        """Load every annotation available for an image.

        Args:
            image_id: Dataset id
            size: Image extent; read from the image or the first raster when omitted
        """
        mask_path = self.root / "masks" / f"{image_id}.png"
        mask = (
            read_mask_png(mask_path, self.vocab, self.ignore_index)
            if mask_path.is_file()
            else None
        )
        depth = self._optional_pfm("depth", image_id)
        axes = [self._optional_pfm(f"normals_{axis}", image_id) for axis in NORMAL_AXES]
        normals = None
        if all(a is not None for a in axes):
            normals = (axes[0], axes[1], axes[2])
        elif any(a is not None for a in axes):
            raise DatasetError(f"Image '{image_id}' has normals for only some axes")
        instances = {p: read_binary_png(path) for p, path in self._points.get(image_id, [])}

        if size is None:
            if image_id in self._image_files:
                size = self.image(image_id).size
            else:
                carriers = [mask, depth, *(normals or ())]
                sized = [c for c in carriers if c is not None]
                if not sized:
                    raise DatasetError(f"Cannot infer the size of '{image_id}'")
                size = sized[0].size

        return GroundTruth(
            image_id=image_id,
            size=size,
            label=self._labels.get(image_id),
            boxes=self._boxes.get(image_id, ()),
            mask=mask,
            depth=depth,
            normals=normals,
            instances=instances,
        )


class DatasetWriter:
    """Write images and annotations in the dataset layout.

    JSONL families are buffered and flushed by ``close()`` so records come out sorted
    by image id. Masks are stored with ``ignore_index`` as their sentinel, the
    vocabulary's default unless given.
    """

    def __init__(
        self, root: PathLike, vocab: ClassVocabulary, ignore_index: Optional[int] = None
    ):
        self.root = Path(root)
        self.vocab = vocab
        self.ignore_index = vocab.ignore_index if ignore_index is None else ignore_index
        errors = vocab.ignore_index_errors(self.ignore_index)
        if errors:
            raise DatasetError("; ".join(errors))
        self.root.mkdir(parents=True, exist_ok=True)
        vocab.write(self.root / "vocab.txt")
        self._labels: List[Dict[str, Any]] = []
        self._boxes: List[Dict[str, Any]] = []
        self._points: List[Dict[str, Any]] = []

    def _path(self, folder: str, name: str) -> Path:
        path = self.root / folder / name
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def write_image(self, image_id: str, image: ImageBuffer) -> None:
        write_image(image, self._path("images", f"{image_id}.png"))

    def write_label(self, image_id: str, class_id: int) -> None:
        self._labels.append({"id": image_id, "class": self.vocab.name_of(class_id)})

    def write_boxes(self, image_id: str, boxes: List[LabeledBox]) -> None:
        self._boxes.append(
            {
                "id": image_id,
                "boxes": [
                    {
                        "class": self.vocab.name_of(b.class_id),
                        "x_min": b.box.x_min,
                        "y_min": b.box.y_min,
                        "x_max": b.box.x_max,
                        "y_max": b.box.y_max,
                    }
                    for b in boxes
                ],
            }
        )

    def write_mask(self, image_id: str, mask: IndexMask) -> None:
        if mask.ignore_index != self.ignore_index:
            labels = np.where(
                mask.labels == mask.ignore_index, self.ignore_index, mask.labels
            ).astype(np.uint16)
            mask = IndexMask(labels, ignore_index=self.ignore_index)
        write_mask_png(mask, self._path("masks", f"{image_id}.png"))

    def write_depth(self, image_id: str, depth: FloatRaster) -> None:
        write_pfm(depth, self._path("depth", f"{image_id}.pfm"))

    def write_normals(
        self, image_id: str, normals: Tuple[FloatRaster, FloatRaster, FloatRaster]
    ) -> None:
        for axis, raster in zip(NORMAL_AXES, normals):
            write_pfm(raster, self._path(f"normals_{axis}", f"{image_id}.pfm"))

    def write_point(self, image_id: str, point: Point, instance: BinaryMask) -> None:
        index = sum(1 for p in self._points if p["id"] == image_id)
        name = f"{image_id}_{index}.png"
        write_binary_png(instance, self._path("instances", name))
        self._points.append(
            {"id": image_id, "x": point.x, "y": point.y, "mask": f"instances/{name}"}
        )

    def close(self) -> None:
        for filename, records in (
            ("labels.jsonl", self._labels),
            ("boxes.jsonl", self._boxes),
            ("points.jsonl", self._points),
        ):
            if not records:
                continue
            ordered = sorted(records, key=lambda r: r["id"])
            with open(self.root / filename, "w", encoding="utf-8") as stream:
                for record in ordered:
                    stream.write(json.dumps(record, sort_keys=True) + "\n")
        logger.info("Wrote dataset to %s", self.root)
