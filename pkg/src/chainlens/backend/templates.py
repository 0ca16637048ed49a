"""Versioned prompt templates.

Templates are UTF-8 files named ``<id>.v<version>.txt`` with ``{name}`` placeholders.
The bundled set ships in ``chainlens/prompts``; a run can point at its own directory
to sweep prompt variants.
"""

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union
import logging
import re
import string

logger = logging.getLogger(__name__)

_FILENAME = re.compile(r"^(?P<id>[a-z0-9_]+)\.v(?P<version>\d+)\.txt$")


@dataclass(frozen=True)
class PromptTemplate:
    """One template file.

    Attributes:
        template_id: Name shared by all versions
        version: Integer version from the file name
        text: Template body
    """

    template_id: str
    version: int
    text: str

    @property
    def placeholders(self) -> Tuple[str, ...]:
        return tuple(
            name for _, name, _, _ in string.Formatter().parse(self.text) if name is not None
        )

    def render(self, fields: Mapping[str, str]) -> str:
        """Substitute placeholders.

        Raises:
            ValueError: If a placeholder has no value
        """
        missing = [p for p in self.placeholders if p not in fields]
        if missing:
            raise ValueError(f"Template {self.template_id}.v{self.version} needs {missing}")
        return self.text.format_map(dict(fields))


class TemplateRegistry:
    """All templates of a directory, newest version selected by default.

    Args:
        directory: Template directory; the bundled prompts when omitted
        overrides: Maps a query's template id to the id actually used (for variants)
    """

    def __init__(
        self,
        directory: Optional[Union[str, Path]] = None,
        overrides: Optional[Mapping[str, str]] = None,
    ):
        self._templates: Dict[str, Dict[int, PromptTemplate]] = {}
        self.overrides: Dict[str, str] = dict(overrides or {})
        if directory is None:
            root = resources.files("chainlens").joinpath("prompts")
            entries = [(p.name, p.read_text(encoding="utf-8")) for p in root.iterdir()]
        else:
            entries = [
                (p.name, p.read_text(encoding="utf-8")) for p in sorted(Path(directory).iterdir())
            ]
        for name, text in entries:
            match = _FILENAME.match(name)
            if match is None:
                continue
            template = PromptTemplate(match["id"], int(match["version"]), text.rstrip("\n"))
            self._templates.setdefault(template.template_id, {})[template.version] = template
        logger.debug("Loaded %d prompt templates", len(self._templates))

    def ids(self) -> List[str]:
        return sorted(self._templates)

    def get(self, template_id: str, version: Optional[int] = None) -> PromptTemplate:
        """Template by id (after overrides); the highest version unless one is given.

        Raises:
            KeyError: If no such template or version exists
        """
        resolved = self.overrides.get(template_id, template_id)
        versions = self._templates.get(resolved)
        if not versions:
            raise KeyError(f"No prompt template '{resolved}'")
        if version is None:
            return versions[max(versions)]
        try:
            return versions[version]
        except KeyError:
            raise KeyError(f"Template '{resolved}' has no version {version}") from None

    def validate(self, required: List[str]) -> List[str]:
        """Check that every required template id resolves.

        Returns:
            List of error messages (empty if valid)
        """
        errors = []
        for template_id in required:
            resolved = self.overrides.get(template_id, template_id)
            if resolved not in self._templates:
                errors.append(f"No prompt template '{resolved}' (for '{template_id}')")
        return errors
