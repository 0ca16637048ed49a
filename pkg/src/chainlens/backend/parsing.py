"""Mapping free-text replies onto closed option sets.

Templates ask for answers wrapped in backticks; a reply holding exactly one backticked
option is taken at face value. Otherwise class names are matched case-insensitively
on word boundaries and the longest matching option wins (earliest position on ties).
Fixed keyword sets (yes/no, relations) take the earliest keyword in the reply.
Coordinate replies are bracketed quadruples of fractions of the image size.
"""

from typing import Dict, List, Optional, Sequence, Tuple
import re

from ..globalize import Relation
from .queries import NormalizedBox

_FENCED = re.compile(r"`([^`\n]+)`")
_NUMBERED = re.compile(r"^\s*(\d+)\s*[.):\-]\s*(.*?)\s*$")
_NONE = re.compile(r"(?<!\w)(none|nothing)(?!\w)", re.IGNORECASE)
_NUMBER = r"([-+]?(?:\d+(?:\.\d*)?|\.\d+))"
_BOX = re.compile(r"[\[(]\s*" + r"\s*,\s*".join([_NUMBER] * 4) + r"\s*[\])]")

#: How far a coordinate may overshoot [0, 1] before the reply counts as pixels
BOX_SLACK = 0.05


class ParseFailure(ValueError):
    """A reply matched no allowed answer."""


def _pattern(option: str) -> "re.Pattern[str]":
    return re.compile(r"(?<!\w)" + re.escape(option) + r"(?!\w)", re.IGNORECASE)


def _occurrences(text: str, options: Sequence[str]) -> List[Tuple[int, int]]:
    """(option index, first position) for every option found in text."""
    found = []
    for index, option in enumerate(options):
        match = _pattern(option).search(text)
        if match is not None:
            found.append((index, match.start()))
    return found


def _fenced(text: str, options: Sequence[str]) -> Optional[int]:
    lowered = [o.lower() for o in options]
    tokens = (m.strip().lower() for m in _FENCED.findall(text))
    hits = {lowered.index(t) for t in tokens if t in lowered}
    if len(hits) == 1:
        return hits.pop()
    return None


def find_option(text: str, options: Sequence[str]) -> Optional[int]:
    """Index of the longest option mentioned in text, earliest on ties; None if none."""
    fenced = _fenced(text, options)
    if fenced is not None:
        return fenced
    found = _occurrences(text, options)
    if not found:
        return None
    index, _ = min(found, key=lambda f: (-len(options[f[0]]), f[1]))
    return index


def parse_choice(text: str, options: Sequence[str]) -> int:
    index = find_option(text, options)
    if index is None:
        raise ParseFailure(f"No option of {list(options)} in reply")
    return index


def parse_labels(text: str, options: Sequence[str]) -> frozenset:
    """All options mentioned; an explicit "none" with no option yields the empty set."""
    found = {index for index, _ in _occurrences(text, options)}
    if found:
        return frozenset(found)
    if _NONE.search(text):
        return frozenset()
    raise ParseFailure(f"No option of {list(options)} and no 'none' in reply")


def _earliest(text: str, keywords: Sequence[str]) -> int:
    fenced = _fenced(text, keywords)
    if fenced is not None:
        return fenced
    found = _occurrences(text, keywords)
    if not found:
        raise ParseFailure(f"None of {list(keywords)} in reply")
    return min(found, key=lambda f: f[1])[0]


def parse_yes_no(text: str) -> bool:
    return _earliest(text, ("yes", "no")) == 0


def parse_relation(text: str, relations: Sequence[Relation]) -> Relation:
    return relations[_earliest(text, [r.value for r in relations])]


def parse_numbered(text: str, count: int) -> Optional[List[str]]:
    """Items 1..count of a numbered-list reply, or None on a positional mismatch."""
    items: Dict[int, str] = {}
    for line in text.splitlines():
        match = _NUMBERED.match(line)
        if match is None:
            continue
        number = int(match.group(1))
        if number in items:
            return None
        items[number] = match.group(2)
    if sorted(items) != list(range(1, count + 1)):
        return None
    return [items[n] for n in range(1, count + 1)]


def parse_boxes(text: str) -> Tuple[NormalizedBox, ...]:
    """Every bracketed ``[x_min, y_min, x_max, y_max]`` quadruple in the reply.

    Coordinates are fractions of the image size. Values within BOX_SLACK of [0, 1]
    are clipped into it and swapped corners are reordered; anything further out is
    taken for pixel coordinates and rejected. An explicit "none" with no box yields
    the empty tuple.
    """
    boxes = []
    for match in _BOX.finditer(text):
        values = [float(v) for v in match.groups()]
        if any(v < -BOX_SLACK or v > 1.0 + BOX_SLACK for v in values):
            raise ParseFailure(f"Coordinates {values} are not fractions of the image size")
        x0, y0, x1, y1 = (min(max(v, 0.0), 1.0) for v in values)
        boxes.append((min(x0, x1), min(y0, y1), max(x0, x1), max(y0, y1)))
    if boxes:
        return tuple(boxes)
    if _NONE.search(text):
        return ()
    raise ParseFailure("No [x_min, y_min, x_max, y_max] box and no 'none' in reply")
