"""Session: the single entry point chains use to get answers.

A session wraps one backend. Ground-truth backends are asked directly; text backends
go through template rendering, the response cache, the in-flight bound, reply
parsing with reminder re-prompts, the transcript and the cost ledger.
"""

from dataclasses import asdict, dataclass
from decimal import Decimal
from typing import Any, Callable, Iterator, List, Optional
import json
import logging
import threading

from ..errors import InvalidAnswer, UnknownModel
from .base import Backend, Completion, GroundTruthBackend, TextBackend
from .cache import CacheKey, ResponseCache
from .cost import CostLedger, UsageEntry
from .parsing import (
    ParseFailure,
    parse_boxes,
    parse_choice,
    parse_labels,
    parse_numbered,
    parse_relation,
    parse_yes_no,
)
from .queries import (
    Answer,
    CoordinateQuery,
    MultiChoiceQuery,
    MultiLabelQuery,
    PairOrderQuery,
    PresenceQuery,
    Query,
    SameObjectQuery,
)
from .templates import PromptTemplate, TemplateRegistry

logger = logging.getLogger(__name__)

REMINDER_TEMPLATE = "reminder"


@dataclass(frozen=True)
class TranscriptEntry:
    """One prompt/reply exchange."""

    query_digest: str
    template: str
    prompt: str
    response: str
    model_id: str
    input_tokens: int
    output_tokens: int
    latency_s: float
    cached: bool

    def usage(self) -> UsageEntry:
        return UsageEntry(self.model_id, self.input_tokens, self.output_tokens)


class Transcript:
    """Append-only log of the exchanges behind one chain outcome."""

    def __init__(self) -> None:
        self._entries: List[TranscriptEntry] = []
        self._lock = threading.Lock()

    def append(self, entry: TranscriptEntry) -> None:
        with self._lock:
            self._entries.append(entry)

    @property
    def entries(self) -> List[TranscriptEntry]:
        with self._lock:
            return list(self._entries)

    def usage(self) -> List[UsageEntry]:
        return [e.usage() for e in self.entries]

    def queries(self) -> int:
        return len(self.entries)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(asdict(e), sort_keys=True) + "\n" for e in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[TranscriptEntry]:
        return iter(self.entries)


def _closed_set(query: Query) -> List[str]:
    if isinstance(query, (MultiChoiceQuery, MultiLabelQuery)):
        return list(query.options)
    if isinstance(query, PairOrderQuery):
        return [r.value for r in query.relations]
    if isinstance(query, CoordinateQuery):
        return ["[x_min, y_min, x_max, y_max]", "none"]
    return ["yes", "no"]


def _parser(query: Query) -> Callable[[str], Any]:
    if isinstance(query, MultiChoiceQuery):
        return lambda text: (parse_choice(text, query.options),)
    if isinstance(query, MultiLabelQuery):
        return lambda text: parse_labels(text, query.options)
    if isinstance(query, PairOrderQuery):
        return lambda text: parse_relation(text, query.relations)
    if isinstance(query, CoordinateQuery):
        return parse_boxes
    if isinstance(query, (PresenceQuery, SameObjectQuery)):
        return parse_yes_no
    raise TypeError(f"Unsupported query kind {type(query).__name__}")


class Session:
    """Answers queries against one backend.

    Args:
        backend: Ground-truth or text backend
        templates: Prompt templates for text backends
        cache: Response cache (text backends only)
        ledger: Cost ledger billed for every text reply, cached or not
        max_in_flight: Concurrent backend requests allowed
        invalid_retries: Reminder re-prompts after an unparsable reply
    """

    def __init__(
        self,
        backend: Backend,
        templates: Optional[TemplateRegistry] = None,
        cache: Optional[ResponseCache] = None,
        ledger: Optional[CostLedger] = None,
        max_in_flight: int = 4,
        invalid_retries: int = 3,
    ):
        if max_in_flight < 1:
            raise ValueError(f"max_in_flight must be at least 1 (got {max_in_flight})")
        if invalid_retries < 0:
            raise ValueError(f"invalid_retries must be non-negative (got {invalid_retries})")
        self.backend = backend
        self.templates = templates or TemplateRegistry()
        self.cache = cache
        self.ledger = ledger
        self.invalid_retries = invalid_retries
        self._slots = threading.BoundedSemaphore(max_in_flight)
        self._counter_lock = threading.Lock()
        self.backend_calls = 0

    @property
    def renders_images(self) -> bool:
        """Whether queries must carry rendered images."""
        return self.backend.renders_images

    def answer(self, query: Query, transcript: Optional[Transcript] = None) -> Answer:
        """Answer a query with a payload from its closed option set.

        Raises:
            InvalidAnswer: If every re-prompt is unparsable
            TransportError: If a text backend stays unreachable
            MissingGroundTruth: If a ground-truth backend lacks the annotations
        """
        if isinstance(self.backend, GroundTruthBackend):
            with self._slots:
                return Answer(self.backend.answer_value(query))
        if isinstance(query, MultiChoiceQuery) and query.batched:
            return self._answer_batch(query, transcript)
        return self._ask(query, _parser(query), transcript)

    def _complete(
        self,
        query: Query,
        template: PromptTemplate,
        prompt: str,
        transcript: Optional[Transcript],
    ) -> Completion:
        assert isinstance(self.backend, TextBackend)
        images = query.images()
        key = CacheKey.build(
            self.backend.backend_id,
            self.backend.model_id,
            template.template_id,
            template.version,
            prompt,
            (image.digest() for image in images),
        )
        completion = self.cache.get(key) if self.cache is not None else None
        cached = completion is not None
        if completion is None:
            with self._slots:
                completion = self.backend.complete(prompt, images)
            with self._counter_lock:
                self.backend_calls += 1
            if self.cache is not None:
                self.cache.put(key, query.digest(), completion)
        entry = TranscriptEntry(
            query_digest=query.digest(),
            template=f"{template.template_id}.v{template.version}",
            prompt=prompt,
            response=completion.text,
            model_id=self.backend.model_id,
            input_tokens=completion.input_tokens,
            output_tokens=completion.output_tokens,
            latency_s=0.0 if cached else completion.latency_s,
            cached=cached,
        )
        if transcript is not None:
            transcript.append(entry)
        if self.ledger is not None and (completion.input_tokens or completion.output_tokens):
            self.ledger.add(entry.usage())
        return completion

    def _ask(
        self, query: Query, parse: Callable[[str], Any], transcript: Optional[Transcript]
    ) -> Answer:
        template = self.templates.get(query.template_id)
        template_name = f"{template.template_id}.v{template.version}"
        prompt = template.render(query.fields())
        reminder = self.templates.get(REMINDER_TEMPLATE).render(
            {"choices": ", ".join(_closed_set(query))}
        )
        text = ""
        for attempt in range(1, self.invalid_retries + 2):
            completion = self._complete(query, template, prompt, transcript)
            text = completion.text
            try:
                return Answer(parse(text), raw_text=text, attempts=attempt)
            except ParseFailure as e:
                logger.info("Unparsable reply to %s (attempt %d): %s", template_name, attempt, e)
            prompt = f"{prompt}\n\n{reminder}"
        raise InvalidAnswer(
            f"No valid answer to {template_name} after {self.invalid_retries + 1} prompts",
            raw_text=text,
            attempts=self.invalid_retries + 1,
        )

    def _answer_batch(self, query: MultiChoiceQuery, transcript: Optional[Transcript]) -> Answer:
        template = self.templates.get(query.template_id)
        template_name = f"{template.template_id}.v{template.version}"
        prompt = template.render(query.fields())
        completion = self._complete(query, template, prompt, transcript)
        lines = parse_numbered(completion.text, len(query.items))
        values: List[Optional[int]] = []
        for index in range(len(query.items)):
            if lines is not None:
                try:
                    values.append(parse_choice(lines[index], query.options))
                    continue
                except ParseFailure:
                    pass
            try:
                single = self._ask(query.item(index), _parser(query), transcript)
                values.append(single.value[0])
            except InvalidAnswer as e:
                logger.warning("Item %d of a batched query left unanswered: %s", index + 1, e)
                values.append(None)
        return Answer(tuple(values), raw_text=completion.text, attempts=1)

    def cost_of(self, transcript: Transcript) -> Decimal:
        """Nominal cost of a transcript at the ledger's prices."""
        if self.ledger is None:
            return Decimal(0)
        total = Decimal(0)
        for usage in transcript.usage():
            try:
                price = self.ledger.prices[usage.model_id]
            except KeyError:
                raise UnknownModel(f"No price for model '{usage.model_id}'") from None
            total += price.cost(usage.input_tokens, usage.output_tokens)
        return total
