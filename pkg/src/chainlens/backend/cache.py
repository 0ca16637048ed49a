"""Content-addressed response cache.

Entries live at ``<root>/<first two hex digits>/<digest>.json`` and are written
through a temporary file plus ``os.replace`` so concurrent readers never see a
partial entry.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Union
import hashlib
import json
import logging
import os
import tempfile
import time

from .base import Completion

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CacheKey:
    """Digest over everything that determines a reply.

    Attributes:
        digest: SHA-256 hex digest
    """

    digest: str

    @classmethod
    def build(
        cls,
        backend_id: str,
        model_id: str,
        template_id: str,
        template_version: int,
        prompt: str,
        image_digests: Iterable[str],
    ) -> "CacheKey":
        payload = {
            "backend": backend_id,
            "model": model_id,
            "template": f"{template_id}.v{template_version}",
            "prompt": prompt,
            "images": list(image_digests),
        }
        encoded = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
        return cls(hashlib.sha256(encoded).hexdigest())


class ResponseCache:
    """Directory-backed cache of completions."""

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)

    def _path(self, key: CacheKey) -> Path:
        return self.root / key.digest[:2] / f"{key.digest}.json"

    def get(self, key: CacheKey) -> Optional[Completion]:
        path = self._path(key)
        if not path.is_file():
            return None
        try:
            entry = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            logger.warning("Ignoring unreadable cache entry %s: %s", path, e)
            return None
        logger.debug("Cache hit %s", key.digest[:12])
        return Completion(
            text=entry["raw_text"],
            input_tokens=int(entry["input_tokens"]),
            output_tokens=int(entry["output_tokens"]),
        )

    def put(self, key: CacheKey, query_digest: str, completion: Completion) -> None:
        path = self._path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        entry = {
            "query_digest": query_digest,
            "raw_text": completion.text,
            "input_tokens": completion.input_tokens,
            "output_tokens": completion.output_tokens,
            "timestamp": time.time(),
        }
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as stream:
                json.dump(entry, stream, sort_keys=True)
            os.replace(tmp, path)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise

    def __contains__(self, key: CacheKey) -> bool:
        return self._path(key).is_file()
