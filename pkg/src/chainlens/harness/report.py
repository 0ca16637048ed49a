"""Cross-run reports: raw metric tables, normalized scores and cost.

Scores are normalized per task between two anchor runs, the blind-guess baseline
(0) and the specialist baseline (1). A task missing either anchor, or whose anchors
coincide on a metric, is reported raw only with a warning.
"""

from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union
import json
import logging

from ..core.domain import normalize_axis
from ..errors import DegenerateBounds
from .runner import RunSummary

logger = logging.getLogger(__name__)

# Metric drawn on the radar chart for each task.
HEADLINE: Dict[str, str] = {
    "classify": "top1",
    "list": "recall",
    "detect": "AP50",
    "detect_direct": "AP50",
    "segment": "mIoU",
    "segment_direct": "mIoU",
    "group": "mean_iou",
    "depth": "rho",
    "normals": "rho",
}


def _fmt(value: Optional[float]) -> str:
    return "n/a" if value is None else f"{value:.4f}"


def load_summary(run_dir: Union[str, Path]) -> RunSummary:
    path = Path(run_dir) / "summary.json"
    if not path.is_file():
        raise FileNotFoundError(f"{run_dir} has no summary.json; is the run finished?")
    return RunSummary.from_dict(json.loads(path.read_text(encoding="utf-8")))


@dataclass
class TaskTable:
    """Raw and normalized metrics of every run on one task.

    Attributes:
        task: Task kind
        metrics: Column order, sorted by name
        rows: Run name to raw metric values
        normalized: Run name to normalized values (anchored metrics only)
        anchors: (blind, specialist) run names when both exist
    """

    task: str
    metrics: List[str] = field(default_factory=list)
    rows: Dict[str, Dict[str, Optional[float]]] = field(default_factory=dict)
    normalized: Dict[str, Dict[str, float]] = field(default_factory=dict)
    anchors: Optional[Tuple[str, str]] = None


@dataclass
class Report:
    tables: Dict[str, TaskTable]
    summaries: List[RunSummary]
    warnings: List[str] = field(default_factory=list)

    def radar(self) -> Tuple[List[str], Dict[str, List[Optional[float]]]]:
        """Axes with a normalized headline metric and one score list per series.

        Runs are grouped into series by model (anchors and oracles by role), so one
        model's runs on different tasks form one polygon.
        """
        axes = [
            task
            for task, table in sorted(self.tables.items())
            if any(HEADLINE.get(task) in n for n in table.normalized.values())
        ]
        series: Dict[str, List[Optional[float]]] = {}
        for summary in sorted(self.summaries, key=lambda s: s.name):
            key = summary.model if summary.role == "model" else summary.role
            scores = series.setdefault(key, [None] * len(axes))
            if summary.task in axes:
                table = self.tables[summary.task]
                value = table.normalized.get(summary.name, {}).get(HEADLINE[summary.task])
                scores[axes.index(summary.task)] = value
        return axes, series

    def cost_rows(self) -> List[Tuple[str, str, str, int, Decimal]]:
        return [
            (s.name, s.task, s.model, s.queries, s.cost)
            for s in sorted(self.summaries, key=lambda s: (s.task, s.name))
        ]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tasks": {
                task: {
                    "metrics": table.metrics,
                    "raw": table.rows,
                    "normalized": table.normalized,
                    "anchors": list(table.anchors) if table.anchors else None,
                }
                for task, table in sorted(self.tables.items())
            },
            "cost": [
                {"run": r, "task": t, "model": m, "queries": q, "cost_usd": str(c)}
                for r, t, m, q, c in self.cost_rows()
            ],
            "total_cost_usd": str(sum((s.cost for s in self.summaries), Decimal(0))),
            "warnings": self.warnings,
        }

    def to_markdown(self) -> str:
        lines = ["# Results", ""]
        for task, table in sorted(self.tables.items()):
            lines += [f"## {task}", ""]
            if table.anchors:
                low, high = table.anchors
                lines += [f"Normalized between blind `{low}` and specialist `{high}`.", ""]
            header = ["run", *table.metrics]
            lines.append("| " + " | ".join(header) + " |")
            lines.append("|" + "|".join("---" for _ in header) + "|")
            for run, values in sorted(table.rows.items()):
                cells = [_fmt(values.get(m)) for m in table.metrics]
                lines.append("| " + " | ".join([run, *cells]) + " |")
            if table.normalized:
                lines += ["", "Normalized:", ""]
                columns = sorted({m for n in table.normalized.values() for m in n})
                lines.append("| " + " | ".join(["run", *columns]) + " |")
                lines.append("|" + "|".join("---" for _ in range(len(columns) + 1)) + "|")
                for run, values in sorted(table.normalized.items()):
                    cells = [_fmt(values.get(m)) for m in columns]
                    lines.append("| " + " | ".join([run, *cells]) + " |")
            lines.append("")
        lines += ["## Cost", "", "| run | task | model | queries | cost (USD) |"]
        lines.append("|---|---|---|---|---|")
        for run, task, model, queries, cost in self.cost_rows():
            lines.append(f"| {run} | {task} | {model} | {queries} | {cost:.2f} |")
        total = sum((s.cost for s in self.summaries), Decimal(0))
        lines += ["", f"Total: ${total:.2f}", ""]
        if self.warnings:
            lines += ["## Warnings", ""]
            lines += [f"- {w}" for w in self.warnings]
            lines.append("")
        return "\n".join(lines)


def _anchor(
    runs: List[RunSummary], role: str, name: Optional[str], task: str
) -> Optional[RunSummary]:
    if name is not None:
        return next((r for r in runs if r.name == name), None)
    candidates = [r for r in runs if r.role == role]
    if len(candidates) > 1:
        logger.warning("Several %s runs for %s; using '%s'", role, task, candidates[0].name)
    return candidates[0] if candidates else None


def build_report(
    summaries: Iterable[RunSummary],
    blind: Optional[str] = None,
    specialist: Optional[str] = None,
) -> Report:
    """Tabulate runs by task and normalize them against their anchors.

    Args:
        summaries: Finished runs
        blind: Name of the run anchoring 0; the task's blind-role run by default
        specialist: Name of the run anchoring 1; the task's specialist-role run by default

    Raises:
        ValueError: If both anchors name the same run
    """
    if blind is not None and blind == specialist:
        raise ValueError(f"Anchors must be different runs (both are '{blind}')")
    summaries = sorted(summaries, key=lambda s: s.name)
    report = Report(tables={}, summaries=list(summaries))
    by_task: Dict[str, List[RunSummary]] = {}
    for summary in summaries:
        by_task.setdefault(summary.task, []).append(summary)

    for task, runs in by_task.items():
        table = TaskTable(task)
        table.metrics = sorted({m for r in runs for m in r.report.values})
        table.rows = {r.name: dict(r.report.values) for r in runs}
        report.tables[task] = table

        low = _anchor(runs, "blind", blind, task)
        high = _anchor(runs, "specialist", specialist, task)
        if low is None or high is None:
            missing = "blind" if low is None else "specialist"
            report.warnings.append(f"{task}: no {missing} run, reporting raw values only")
            continue
        table.anchors = (low.name, high.name)
        for metric in table.metrics:
            lo, hi = low.report.get(metric), high.report.get(metric)
            if lo is None or hi is None:
                continue
            for run in runs:
                value = run.report.get(metric)
                if value is None:
                    continue
                try:
                    score = normalize_axis(value, lo, hi)
                except DegenerateBounds:
                    report.warnings.append(f"{task}: anchors agree on {metric} ({lo})")
                    break
                table.normalized.setdefault(run.name, {})[metric] = score
    for warning in report.warnings:
        logger.warning("%s", warning)
    return report


def write_report(report: Report, out_dir: Union[str, Path]) -> List[Path]:
    """Write report.md, report.json and radar.svg; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [out / "report.md", out / "report.json"]
    written[0].write_text(report.to_markdown(), encoding="utf-8")
    written[1].write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    try:
        from ..export import RadarExporter
    except ImportError:
        logger.warning("svgwrite is not installed; skipping radar.svg")
        return written
    axes, series = report.radar()
    with open(out / "radar.svg", "w", encoding="utf-8") as stream:
        RadarExporter().export(axes, series, stream)
    written.append(out / "radar.svg")
    return written


def report_runs(
    run_dirs: Sequence[Union[str, Path]],
    out_dir: Union[str, Path],
    blind: Optional[str] = None,
    specialist: Optional[str] = None,
) -> Report:
    report = build_report([load_summary(d) for d in run_dirs], blind, specialist)
    write_report(report, out_dir)
    return report
