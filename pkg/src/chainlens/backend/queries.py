"""The sub-task protocol every backend answers.

A query carries two views of the same question: the rendered images a multimodal
model looks at, and the ``Region`` geometry a ground-truth backend uses to look the
answer up. Chains skip rendering when the backend only needs the geometry.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from typing import Any, Dict, Optional, Tuple, Union
import hashlib
import json

import numpy as np
import numpy.typing as npt

from ..core.geometry import PixelBox, Point, RasterSize
from ..globalize import Axis, BINARY_RELATIONS, Relation
from ..raster import ImageBuffer

# (x_min, y_min, x_max, y_max) as fractions of the image width and height
NormalizedBox = Tuple[float, float, float, float]


@dataclass(frozen=True, eq=False)
class Region:
    """Part of one image a question is about.

    Attributes:
        image_id: Dataset id of the image
        size: Image extent
        box: Rectangular window; None means the whole image
        mask: Optional boolean pixel mask (segments and clusters)
    """

    image_id: str
    size: RasterSize
    box: Optional[PixelBox] = None
    mask: Optional[npt.NDArray[np.bool_]] = None

    def __post_init__(self) -> None:
        if self.box is not None and not self.box.within(self.size):
            raise ValueError(f"{self.box!r} exceeds {self.size!r}")
        if self.mask is not None:
            if self.mask.shape != self.size.shape:
                raise ValueError(f"Mask shape {self.mask.shape} does not match {self.size!r}")
            bits = np.array(self.mask, dtype=bool, copy=True)
            bits.setflags(write=False)
            object.__setattr__(self, "mask", bits)

    @property
    def window(self) -> PixelBox:
        """The box, or the full image when no box is set."""
        return self.box if self.box is not None else self.size.full_box()

    def pixels(self) -> npt.NDArray[np.bool_]:
        """Boolean mask of the pixels the region covers."""
        if self.mask is not None:
            return self.mask
        out = np.zeros(self.size.shape, dtype=bool)
        out[self.window.slices()] = True
        return out

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.image_id.encode())
        h.update(repr((self.size.width, self.size.height)).encode())
        h.update(repr(self.box.bounds() if self.box else None).encode())
        if self.mask is not None:
            h.update(np.packbits(self.mask).tobytes())
        return h.hexdigest()


@dataclass(frozen=True, eq=False)
class QueryItem:
    """A region together with the images that show it."""

    region: Region
    images: Tuple[ImageBuffer, ...] = ()


class Query(ABC):
    """Base class for sub-task queries.

    Subclasses define the closed answer set, the placeholders their prompt template
    needs, and the images sent along.
    """

    template_id: str = ""

    @abstractmethod
    def images(self) -> Tuple[ImageBuffer, ...]:
        """Images in the order the prompt refers to them."""
        pass

    @abstractmethod
    def fields(self) -> Dict[str, str]:
        """Values for the prompt template placeholders."""
        pass

    @abstractmethod
    def _identity(self) -> Dict[str, Any]:
        """JSON-serializable content that distinguishes this query from any other."""
        pass

    def digest(self) -> str:
        """Stable content digest, independent of rendering."""
        payload = {"kind": type(self).__name__, **self._identity()}
        return hashlib.sha256(
            json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
        ).hexdigest()


@dataclass(frozen=True, eq=False)
class MultiChoiceQuery(Query):
    """Pick one option per item.

    Attributes:
        items: One or more regions (whole images for classification, segments for
            segmentation); several items form a batched query
        options: Class names, in vocabulary order
        history: (item label, class name) answers already given in earlier batches
        shared: Images sent once ahead of the items' own views, e.g. the full image
            with every item marked
        number_from: Number of the first item in the shared images
    """

    items: Tuple[QueryItem, ...]
    options: Tuple[str, ...]
    history: Tuple[Tuple[str, str], ...] = ()
    template_id: str = "classify"
    shared: Tuple[ImageBuffer, ...] = ()
    number_from: int = 1

    def __post_init__(self) -> None:
        if not self.items:
            raise ValueError("A multi-choice query needs at least one item")
        if not self.options:
            raise ValueError("A multi-choice query needs at least one option")

    @property
    def batched(self) -> bool:
        return len(self.items) > 1

    def item(self, index: int) -> "MultiChoiceQuery":
        """The single-item query for one item, keeping the history."""
        return replace(self, items=(self.items[index],), number_from=self.number_from + index)

    def images(self) -> Tuple[ImageBuffer, ...]:
        return self.shared + tuple(img for item in self.items for img in item.images)

    def fields(self) -> Dict[str, str]:
        history = "\n".join(f"{label}: {name}" for label, name in self.history)
        last = self.number_from + len(self.items) - 1
        return {
            "options": ", ".join(self.options),
            "count": str(len(self.items)),
            "numbers": str(last) if last == self.number_from else f"{self.number_from} to {last}",
            "views": str(len(self.items[0].images)),
            "history": history or "(none)",
        }

    def _identity(self) -> Dict[str, Any]:
        return {
            "items": [item.region.digest() for item in self.items],
            "options": list(self.options),
            "history": [list(h) for h in self.history],
        }


@dataclass(frozen=True, eq=False)
class MultiLabelQuery(Query):
    """List every option visible in a region (possibly none)."""

    item: QueryItem
    options: Tuple[str, ...]
    template_id: str = "list_objects"

    def __post_init__(self) -> None:
        if not self.options:
            raise ValueError("A multi-label query needs at least one option")

    def images(self) -> Tuple[ImageBuffer, ...]:
        return self.item.images

    def fields(self) -> Dict[str, str]:
        return {"options": ", ".join(self.options)}

    def _identity(self) -> Dict[str, Any]:
        return {"item": self.item.region.digest(), "options": list(self.options)}


@dataclass(frozen=True, eq=False)
class PresenceQuery(Query):
    """Is any part of an object of the class inside the window?

    Attributes:
        item: The window (crop) plus full-image context
        class_id: Vocabulary index of the class
        class_name: Human-readable class name used in the prompt
    """

    item: QueryItem
    class_id: int
    class_name: str
    template_id: str = "presence"

    def images(self) -> Tuple[ImageBuffer, ...]:
        return self.item.images

    def fields(self) -> Dict[str, str]:
        return {"class": self.class_name}

    def _identity(self) -> Dict[str, Any]:
        return {"item": self.item.region.digest(), "class": self.class_id}


@dataclass(frozen=True, eq=False)
class CoordinateQuery(Query):
    """Where are the objects of the class? Answered with box coordinates.

    Coordinates are fractions of the image width and height, so the answer does not
    depend on the resolution the provider resized the image to.

    Attributes:
        item: The whole image
        class_id: Vocabulary index of the class
        class_name: Human-readable class name used in the prompt
    """

    item: QueryItem
    class_id: int
    class_name: str
    template_id: str = "direct_boxes"

    def images(self) -> Tuple[ImageBuffer, ...]:
        return self.item.images

    def fields(self) -> Dict[str, str]:
        return {"class": self.class_name}

    def _identity(self) -> Dict[str, Any]:
        return {"item": self.item.region.digest(), "class": self.class_id}


@dataclass(frozen=True, eq=False)
class PairOrderQuery(Query):
    """Order two segments along an axis.

    The answer is the relation of segment a to segment b: for depth, "greater" means
    a lies farther from the camera; for a normal axis, that a's normal has the larger
    component along that camera axis.
    """

    a: QueryItem
    b: QueryItem
    axis: Axis
    relations: Tuple[Relation, ...] = BINARY_RELATIONS
    template_id: str = "depth_order"

    def __post_init__(self) -> None:
        if Relation.GREATER not in self.relations or Relation.LESS not in self.relations:
            raise ValueError("Pair queries must allow both 'greater' and 'less'")

    @property
    def ternary(self) -> bool:
        return Relation.EQUAL in self.relations

    def images(self) -> Tuple[ImageBuffer, ...]:
        return self.a.images + self.b.images

    def fields(self) -> Dict[str, str]:
        return {
            "axis": self.axis.value,
            "options": ", ".join(r.value for r in self.relations),
            "views": str(len(self.a.images)),
        }

    def _identity(self) -> Dict[str, Any]:
        return {
            "a": self.a.region.digest(),
            "b": self.b.region.digest(),
            "axis": self.axis.value,
            "relations": [r.value for r in self.relations],
        }


@dataclass(frozen=True, eq=False)
class SameObjectQuery(Query):
    """Does the candidate segment belong to the same object as the cluster?

    Attributes:
        candidate: Frontier segment
        cluster: Accepted segments so far
        point: Query point the grouping started from
    """

    candidate: QueryItem
    cluster: QueryItem
    point: Point
    template_id: str = "same_object"

    def images(self) -> Tuple[ImageBuffer, ...]:
        return self.candidate.images + self.cluster.images

    def fields(self) -> Dict[str, str]:
        return {"views": str(len(self.candidate.images))}

    def _identity(self) -> Dict[str, Any]:
        return {
            "candidate": self.candidate.region.digest(),
            "cluster": self.cluster.region.digest(),
            "point": [self.point.x, self.point.y],
        }


AnswerValue = Union[Tuple[Optional[int], ...], frozenset, bool, Relation]


@dataclass(frozen=True)
class Answer:
    """A parsed reply.

    Attributes:
        value: Option index per item (MultiChoice), set of option indices
            (MultiLabel), bool (Presence, SameObject), Relation (PairOrder) or a tuple
            of NormalizedBox (Coordinate)
        raw_text: Backend reply the value was parsed from (empty for ground truth)
        attempts: Prompts issued, 0 for ground-truth answers
    """

    value: Any
    raw_text: str = ""
    attempts: int = 0
