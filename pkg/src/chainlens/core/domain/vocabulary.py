"""Class vocabularies behind classification, detection and segmentation tasks."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Sequence, Union

#: Ignore sentinel for vocabularies that fit 8-bit masks
IGNORE_INDEX_8BIT = 255
#: Ignore sentinel once class ids need 16 bits; also bounds the vocabulary size
IGNORE_INDEX_16BIT = 65535


@dataclass(frozen=True)
class ClassVocabulary:
    """Ordered list of class names; the position of a name is its class id.

    Attributes:
        names: Class names in id order
    """

    names: tuple[str, ...]
    _index: Dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        errors = self.validate()
        if errors:
            raise ValueError("; ".join(errors))
        object.__setattr__(self, "_index", {name: i for i, name in enumerate(self.names)})

    @classmethod
    def from_names(cls, names: Sequence[str]) -> "ClassVocabulary":
        return cls(tuple(names))

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ClassVocabulary":
        """Read a UTF-8 vocabulary file, one class name per line (line number = id).

        Trailing blank lines are ignored; blank lines in between are an error.
        """
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        while lines and not lines[-1].strip():
            lines.pop()
        return cls(tuple(line.strip() for line in lines))

    def write(self, path: Union[str, Path]) -> None:
        """Write the vocabulary in the one-name-per-line format."""
        Path(path).write_text("".join(f"{name}\n" for name in self.names), encoding="utf-8")

    def id_of(self, name: str) -> int:
        """Zero-based index of a class name.

        Raises:
            KeyError: If the name is not part of the vocabulary
        """
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"Unknown class '{name}'") from None

    def name_of(self, class_id: int) -> str:
        """Class name for a zero-based index."""
        if not 0 <= class_id < len(self.names):
            raise IndexError(f"Class id {class_id} outside vocabulary of {len(self.names)}")
        return self.names[class_id]

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    @property
    def ignore_index(self) -> int:
        """Default mask sentinel: 255 while ids fit a byte, 65535 beyond that."""
        return IGNORE_INDEX_8BIT if len(self.names) <= IGNORE_INDEX_8BIT else IGNORE_INDEX_16BIT

    def ignore_index_errors(self, ignore_index: int) -> List[str]:
        """Problems with using ignore_index as the mask sentinel for this vocabulary."""
        if not 0 <= ignore_index <= IGNORE_INDEX_16BIT:
            return [f"ignore_index {ignore_index} does not fit 16 bits"]
        if ignore_index < len(self.names):
            return [
                f"ignore_index {ignore_index} collides with class ids 0..{len(self.names) - 1}"
            ]
        return []

    def validate(self) -> List[str]:
        """Validate vocabulary contents.

        Returns:
            List of error messages (empty if valid)
        """
        errors = []
        if not self.names:
            errors.append("Vocabulary must contain at least one class")
        if len(self.names) >= IGNORE_INDEX_16BIT:
            errors.append(
                f"Vocabulary of {len(self.names)} classes leaves no room for the ignore index "
                f"{IGNORE_INDEX_16BIT}"
            )
        seen: set[str] = set()
        for i, name in enumerate(self.names):
            if not name:
                errors.append(f"Class {i} has an empty name")
            elif name in seen:
                errors.append(f"Class '{name}' appears more than once")
            seen.add(name)
        return errors
