"""Run manifests, resumable execution, baselines and reports."""

from .manifest import (
    TASKS,
    BackendSpec,
    ChainParams,
    GridSpec,
    RunManifest,
    dump_manifest,
    load_manifest,
    parse_manifest,
)
from .records import RecordLog, ResultRecord, transcript_digest
from .tasks import TASK_RUNNERS, ImageResult, TaskRunner, task_runner
from .runner import RunSummary, build_backend, build_session, run, summarize
from .specialist import run_specialist_chain, specialist_manifest
from .report import Report, build_report, load_summary, report_runs, write_report
from .synthetic import VOCABULARY, generate_dataset, synthetic_sample, synthetic_samples

__all__ = [
    "TASKS",
    "BackendSpec",
    "ChainParams",
    "GridSpec",
    "RunManifest",
    "dump_manifest",
    "load_manifest",
    "parse_manifest",
    "RecordLog",
    "ResultRecord",
    "transcript_digest",
    "TASK_RUNNERS",
    "ImageResult",
    "TaskRunner",
    "task_runner",
    "RunSummary",
    "build_backend",
    "build_session",
    "run",
    "summarize",
    "run_specialist_chain",
    "specialist_manifest",
    "Report",
    "build_report",
    "load_summary",
    "report_runs",
    "write_report",
    "VOCABULARY",
    "generate_dataset",
    "synthetic_sample",
    "synthetic_samples",
]
