"""Append-only per-image result records.

``records.jsonl`` holds one JSON object per line with sorted keys. Records are appended
in image order, so an interrupted run that is resumed ends with the same bytes as an
uninterrupted one. A torn last line left by a crash is cut off before appending.
"""

from dataclasses import asdict, dataclass, field
from decimal import Decimal
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional
import hashlib
import json
import logging
import os
import threading

from ..backend import Transcript

logger = logging.getLogger(__name__)

STATUS_OK = "ok"
STATUS_ERROR = "error"


@dataclass(frozen=True)
class ResultRecord:
    """Outcome of one image.

    Attributes:
        image_id: Dataset id
        status: "ok" or "error"
        payload: Task output; boxes and labels inline, rasters as paths relative to
            the run directory
        metrics: Per-image metric values (None where undefined)
        transcript_digest: Digest of the exchanges behind the payload
        queries: Number of exchanges
        cost: Nominal API cost in dollars, as a decimal string
        unit: Id of the first image of the query batch the image was answered in
        error: Failure description when status is "error"
    """

    image_id: str
    status: str = STATUS_OK
    payload: Dict[str, Any] = field(default_factory=dict)
    metrics: Dict[str, Optional[float]] = field(default_factory=dict)
    transcript_digest: str = ""
    queries: int = 0
    cost: str = "0"
    unit: Optional[str] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK

    @property
    def cost_value(self) -> Decimal:
        return Decimal(self.cost)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ResultRecord":
        return cls(**{k: data[k] for k in cls.__dataclass_fields__ if k in data})


def transcript_digest(transcript: Transcript) -> str:
    """Digest of what was asked and answered; timing and cache state are left out."""
    h = hashlib.sha256()
    for entry in transcript:
        content = {
            "query": entry.query_digest,
            "template": entry.template,
            "prompt": entry.prompt,
            "response": entry.response,
            "model": entry.model_id,
            "tokens": [entry.input_tokens, entry.output_tokens],
        }
        h.update(json.dumps(content, sort_keys=True).encode())
        h.update(b"\n")
    return h.hexdigest()


class RecordLog:
    """The records file of one run."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def load(self) -> List[ResultRecord]:
        """Every complete record in file order."""
        if not self.path.is_file():
            return []
        records = []
        with open(self.path, encoding="utf-8") as stream:
            for line_no, line in enumerate(stream, start=1):
                if not line.endswith("\n"):
                    logger.warning("Ignoring torn record at %s:%d", self.path, line_no)
                    break
                records.append(ResultRecord.from_dict(json.loads(line)))
        return records

    def latest(self) -> Dict[str, ResultRecord]:
        """Last record per image id; a retried image supersedes its earlier failure."""
        return {r.image_id: r for r in self.load()}

    def completed(self) -> set[str]:
        return {image_id for image_id, r in self.latest().items() if r.ok}

    def repair(self) -> None:
        """Cut a torn trailing line so appends start on a line boundary."""
        if not self.path.is_file():
            return
        data = self.path.read_bytes()
        if not data or data.endswith(b"\n"):
            return
        keep = data.rfind(b"\n") + 1
        logger.warning("Truncating torn record tail of %s", self.path)
        with open(self.path, "r+b") as stream:
            stream.truncate(keep)

    def append(self, records: Iterable[ResultRecord]) -> None:
        lines = "".join(r.to_json() + "\n" for r in records)
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as stream:
                stream.write(lines)
                stream.flush()
                os.fsync(stream.fileno())
