"""Executes a run manifest image by image with resumable records.

Run directory layout::

    <output>/
      manifest.json          canonical copy of the manifest
      records.jsonl          one ResultRecord per image, append-only
      transcripts/<id>.jsonl exchanges of each query unit
      predictions/           chain outputs in the dataset layout
      cache/                 provider replies (remote backends)
      summary.json           dataset-level metrics, counts and cost
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Type
import json
import logging

from ..backend import (
    Backend,
    CoordinateQuery,
    CostLedger,
    GroundTruthBackend,
    HttpTextBackend,
    MultiChoiceQuery,
    MultiLabelQuery,
    OracleBackend,
    PairOrderQuery,
    PresenceQuery,
    Query,
    ResponseCache,
    SameObjectQuery,
    ScriptedBackend,
    Session,
    SpecialistBackend,
    TemplateRegistry,
    Transcript,
    load_price_table,
)
from ..chains import ChainContext
from ..core.domain import ClassVocabulary
from ..errors import ChainlensError, ManifestError
from ..metrics import MetricReport
from ..raster import Dataset, DatasetWriter, GroundTruth
from .manifest import BackendSpec, RunManifest, dump_manifest
from .records import STATUS_ERROR, RecordLog, ResultRecord, transcript_digest
from .tasks import PREDICTIONS, ImageResult, TaskRunner, box_from_json, task_runner

logger = logging.getLogger(__name__)

QUERY_KINDS: Dict[str, Type[Query]] = {
    cls.__name__: cls
    for cls in (
        MultiChoiceQuery,
        MultiLabelQuery,
        PresenceQuery,
        CoordinateQuery,
        PairOrderQuery,
        SameObjectQuery,
    )
}


@dataclass(frozen=True)
class RunSummary:
    """Aggregate outcome of a run, derived from its records only.

    Attributes:
        name: Run name
        task: Task kind
        role: oracle, scripted, specialist, blind or model; anchors normalization
        model: Model id of the backend
        report: Dataset-level metrics over successful images
        images: Images in the run
        failures: Ids of images without a successful record
        queries: Exchanges over every attempt
        cost: Nominal API cost over every attempt
    """

    name: str
    task: str
    role: str
    model: str
    report: MetricReport
    images: int
    failures: Tuple[str, ...] = ()
    queries: int = 0
    cost: Decimal = Decimal(0)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "task": self.task,
            "role": self.role,
            "model": self.model,
            "metrics": self.report.to_dict(),
            "images": self.images,
            "failures": list(self.failures),
            "queries": self.queries,
            "cost_usd": str(self.cost),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RunSummary":
        return cls(
            name=str(data["name"]),
            task=str(data["task"]),
            role=str(data.get("role", "model")),
            model=str(data.get("model", "")),
            report=MetricReport.from_dict(data["metrics"]),
            images=int(data.get("images", 0)),
            failures=tuple(data.get("failures", ())),
            queries=int(data.get("queries", 0)),
            cost=Decimal(str(data.get("cost_usd", "0"))),
        )


def run_role(manifest: RunManifest) -> str:
    if manifest.chain.blind:
        return "blind"
    if manifest.backend.remote:
        return "model"
    return manifest.backend.kind


def ground_truth_source(source: Dataset, reference: Dataset, cache_size: int = 256) -> Any:
    """Cached image id -> annotations of source, sized like reference's images."""

    @lru_cache(maxsize=cache_size)
    def load(image_id: str) -> GroundTruth:
        return source.ground_truth(image_id, reference.image(image_id).size)

    return load


def build_backend(spec: BackendSpec, dataset: Dataset) -> Backend:
    """Backend named by the manifest.

    Raises:
        ManifestError: On unknown query kinds in noisy_kinds
        TransportError: If a provider key is missing from the environment
    """
    if spec.kind in ("oracle", "scripted"):
        oracle = OracleBackend(ground_truth_source(dataset, dataset), spec.equal_fraction)
        if spec.kind == "oracle":
            return oracle
        kinds = None
        if spec.noisy_kinds is not None:
            unknown = sorted(set(spec.noisy_kinds) - set(QUERY_KINDS))
            if unknown:
                raise ManifestError(f"backend.noisy_kinds: unknown query kinds {unknown}")
            kinds = [QUERY_KINDS[name] for name in spec.noisy_kinds]
        return ScriptedBackend(oracle, spec.error_rate, spec.seed, spec.multilabel_noise, kinds)
    if spec.kind == "specialist":
        assert spec.predictions is not None
        predictions = Dataset(
            spec.predictions,
            dataset.vocab,
            require_images=False,
            ignore_index=dataset.ignore_index,
        )
        return SpecialistBackend(ground_truth_source(predictions, dataset), spec.equal_fraction)
    assert spec.model is not None
    return HttpTextBackend(
        spec.kind,
        spec.model,
        max_tokens=spec.max_tokens,
        base_url=spec.base_url,
        retries=spec.retries,
        timeout_s=spec.timeout_s,
    )


def build_session(manifest: RunManifest, backend: Backend) -> Session:
    spec = manifest.backend
    cache = ledger = None
    if not isinstance(backend, GroundTruthBackend):
        cache = ResponseCache(manifest.cache or manifest.output / "cache")
        ledger = CostLedger(load_price_table(manifest.prices))
    return Session(
        backend,
        templates=TemplateRegistry(spec.template_dir, spec.templates),
        cache=cache,
        ledger=ledger,
        max_in_flight=spec.max_in_flight,
        invalid_retries=spec.invalid_retries,
    )


def select_images(manifest: RunManifest, dataset: Dataset) -> List[str]:
    ids = dataset.image_ids()
    if manifest.image_ids is not None:
        missing = sorted(set(manifest.image_ids) - set(ids))
        if missing:
            raise ManifestError(f"image_ids: not in the dataset: {missing}")
        chosen = set(manifest.image_ids)
        ids = [i for i in ids if i in chosen]
    if manifest.limit is not None:
        ids = ids[: manifest.limit]
    return ids


def _claim_output(manifest: RunManifest) -> None:
    """Create the run directory, refusing to resume a different manifest into it."""
    manifest.output.mkdir(parents=True, exist_ok=True)
    stored = manifest.output / "manifest.json"
    text = dump_manifest(manifest)
    if stored.is_file():
        if stored.read_text(encoding="utf-8") != text:
            raise ManifestError(f"{manifest.output} holds a run of a different manifest")
        logger.info("Resuming run in %s", manifest.output)
        return
    stored.write_text(text, encoding="utf-8")


@dataclass
class _UnitRunner:
    runner: TaskRunner
    session: Session
    manifest: RunManifest
    transcripts: Path = field(init=False)

    def __post_init__(self) -> None:
        self.transcripts = self.manifest.output / "transcripts"
        self.transcripts.mkdir(parents=True, exist_ok=True)

    def __call__(self, unit: List[str]) -> List[ResultRecord]:
        renderer = self.manifest.chain.renderer(self.manifest.backend.single_image)
        ctx = ChainContext(self.session, renderer, Transcript())
        error: Optional[str] = None
        results: List[ImageResult] = []
        try:
            results = self.runner.process(ctx, unit)
        except (ChainlensError, ValueError, KeyError, OSError) as e:
            error = f"{type(e).__name__}: {e}"
            logger.warning("Image %s failed: %s", unit[0], error)
        (self.transcripts / f"{unit[0]}.jsonl").write_text(
            ctx.transcript.to_jsonl(), encoding="utf-8"
        )
        try:
            cost = ctx.cost()
        except ChainlensError as e:
            cost = Decimal(0)
            error = error or f"{type(e).__name__}: {e}"
        digest = transcript_digest(ctx.transcript)

        def shared(first: bool) -> Dict[str, Any]:
            # the unit's queries and cost are booked on its first image
            return {
                "transcript_digest": digest,
                "queries": len(ctx.transcript) if first else 0,
                "cost": str(cost) if first else "0",
                "unit": unit[0],
            }

        if error is not None:
            return [
                ResultRecord(image_id, status=STATUS_ERROR, error=error, **shared(i == 0))
                for i, image_id in enumerate(unit)
            ]
        return [
            ResultRecord(r.image_id, payload=r.payload, metrics=r.metrics, **shared(i == 0))
            for i, r in enumerate(results)
        ]


def _export_predictions(runner: TaskRunner, records: List[ResultRecord]) -> None:
    """Write label and box files so the predictions directory is a dataset of its own."""
    writer = DatasetWriter(
        runner.run_dir / PREDICTIONS, runner.vocab, runner.dataset.ignore_index
    )
    for record in records:
        if runner.task == "classify" and record.payload.get("class") is not None:
            writer.write_label(record.image_id, runner.vocab.id_of(record.payload["class"]))
        elif runner.task in ("detect", "detect_direct"):
            writer.write_boxes(
                record.image_id,
                [box_from_json(b, runner.vocab) for b in record.payload["boxes"]],
            )
    writer.close()


def summarize(manifest: RunManifest, runner: TaskRunner, image_ids: List[str]) -> RunSummary:
    """Summary of the records file, independent of the order records were written in."""
    log = RecordLog(manifest.output / "records.jsonl")
    every = log.load()
    latest = {r.image_id: r for r in every}
    done = [latest[i] for i in image_ids if i in latest and latest[i].ok]
    failures = tuple(i for i in image_ids if i not in latest or not latest[i].ok)
    values = runner.aggregate(done) if done else {}
    return RunSummary(
        name=manifest.run_name,
        task=manifest.task,
        role=run_role(manifest),
        model=manifest.backend.model or manifest.backend.kind,
        report=MetricReport(manifest.task, values, len(done)),
        images=len(image_ids),
        failures=failures,
        queries=sum(r.queries for r in every),
        cost=sum((r.cost_value for r in every), Decimal(0)),
    )


def run(manifest: RunManifest, backend: Optional[Backend] = None) -> RunSummary:
    """Run the manifest's chain on every selected image and write the summary.

    Images with a successful record are skipped, so an interrupted run resumes where it
    stopped and a finished one issues no queries at all.

    Args:
        manifest: Validated run description
        backend: Backend override (tests); built from the manifest otherwise

    Raises:
        ManifestError: If the output belongs to another manifest or ids are unknown
    """
    dataset = Dataset(
        manifest.dataset, _vocabulary(manifest), ignore_index=manifest.ignore_index
    )
    image_ids = select_images(manifest, dataset)
    _claim_output(manifest)

    runner = task_runner(manifest, dataset, manifest.output)
    log = RecordLog(manifest.output / "records.jsonl")
    log.repair()
    completed = log.completed()
    pending = [u for u in runner.units(image_ids) if not all(i in completed for i in u)]
    logger.info(
        "Run '%s' (%s): %d images, %d units pending",
        manifest.run_name,
        manifest.task,
        len(image_ids),
        len(pending),
    )

    if pending:
        session = build_session(manifest, backend or build_backend(manifest.backend, dataset))
        process = _UnitRunner(runner, session, manifest)
        with ThreadPoolExecutor(max_workers=manifest.workers) as pool:
            # map yields in submission order, so records land in image order
            for records in pool.map(process, pending):
                log.append(records)
        logger.info("Backend calls this invocation: %d", session.backend_calls)
        close = getattr(session.backend, "close", None)
        if callable(close):
            close()

    summary = summarize(manifest, runner, image_ids)
    _export_predictions(runner, [r for r in log.latest().values() if r.ok])
    (manifest.output / "summary.json").write_text(
        json.dumps(summary.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    if summary.failures:
        logger.warning("%d of %d images failed", len(summary.failures), summary.images)
    return summary


def _vocabulary(manifest: RunManifest) -> Optional[ClassVocabulary]:
    if manifest.vocabulary is None:
        return None
    return ClassVocabulary.from_file(manifest.vocabulary)
