"""Command-line interface.

Exit codes: 0 when every image succeeded, 1 when a run finished with failed images
or no subset qualified, 2 on invalid input.
"""

from pathlib import Path
from typing import Dict, List, Optional
import json
import logging

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from ..core.geometry import RasterSize
from ..errors import ChainlensError, NoSubsetFound
from ..metrics import select_hardest, select_subset
from .manifest import load_manifest
from .report import report_runs
from .runner import RunSummary, run
from .synthetic import generate_dataset

app = typer.Typer(help="Benchmark multimodal models on vision tasks through prompt chains.")
console = Console()
logger = logging.getLogger("chainlens")

EXIT_FAILURES = 1
EXIT_INVALID = 2


@app.callback()
def configure(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log at DEBUG level"),
) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )


def _summary_table(summary: RunSummary) -> Table:
    table = Table(title=f"{summary.name} ({summary.task})", header_style="bold cyan")
    table.add_column("metric")
    table.add_column("value", justify="right")
    for name, value in sorted(summary.report.values.items()):
        table.add_row(name, "n/a" if value is None else f"{value:.4f}")
    table.add_row("images", f"{summary.report.count}/{summary.images}")
    table.add_row("queries", str(summary.queries))
    table.add_row("cost (USD)", f"{summary.cost:.4f}")
    return table


@app.command("run")
def run_command(
    manifest: Path = typer.Argument(..., help="Run manifest (JSON)"),
) -> None:
    """Run a manifest; resumes when its output directory holds earlier records."""
    try:
        summary = run(load_manifest(manifest))
    except ChainlensError as e:
        console.print(f"[red]Error:[/red] {e}")
        raise typer.Exit(EXIT_INVALID)
    console.print(_summary_table(summary))
    if not summary.ok:
        console.print(f"[yellow]{len(summary.failures)} image(s) failed[/yellow]")
        raise typer.Exit(EXIT_FAILURES)


@app.command("report")
def report_command(
    run_dirs: List[Path] = typer.Argument(..., help="Finished run directories"),
    out: Path = typer.Option(Path("report"), "--out", help="Report directory"),
    blind: Optional[str] = typer.Option(None, help="Run name anchoring 0"),
    specialist: Optional[str] = typer.Option(None, help="Run name anchoring 1"),
) -> None:
    """Write report.md, report.json and radar.svg over several runs."""
    try:
        report = report_runs(run_dirs, out, blind, specialist)
    except (FileNotFoundError, ValueError) as e:
        console.print(f"[red]Error:[/red] {e}")
        raise typer.Exit(EXIT_INVALID)
    for warning in report.warnings:
        console.print(f"[yellow]Warning:[/yellow] {warning}")
    console.print(f"Report written to {out}")


@app.command("gen-synthetic")
def gen_synthetic_command(
    out_dir: Path = typer.Argument(..., help="Dataset directory to create"),
    seed: int = typer.Option(0, help="Generator seed"),
    count: int = typer.Option(500, min=1, help="Number of images"),
    size: int = typer.Option(96, min=16, help="Image side in pixels"),
) -> None:
    """Generate the synthetic dataset used by the acceptance suites."""
    generate_dataset(out_dir, seed=seed, count=count, size=RasterSize(size, size))
    console.print(f"Wrote {count} images to {out_dir}")


def _read_scores(path: Path) -> Dict[str, List[float]]:
    data = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(data, dict) or not data:
        raise ValueError(f"{path} must map model names to per-sample score lists")
    return {str(k): [float(x) for x in v] for k, v in data.items()}


@app.command("select-subset")
def select_subset_command(
    scores_path: Path = typer.Argument(..., help="JSON mapping model -> per-sample scores"),
    sizes: str = typer.Option(..., help="Comma-separated candidate subset sizes"),
    threshold: float = typer.Option(..., help="Minimum mean Kendall tau"),
    bootstraps: int = typer.Option(100, min=1, help="Draws per size"),
    seed: int = typer.Option(0, help="Sampling seed"),
    hardest: int = typer.Option(0, min=0, help="Also list the N hardest samples"),
) -> None:
    """Smallest evaluation subset that ranks the models like the full set."""
    try:
        scores = _read_scores(scores_path)
        candidates = [int(s) for s in sizes.split(",") if s.strip()]
        matrix = list(scores.values())
        selection = select_subset(matrix, candidates, threshold, bootstraps, seed)
    except NoSubsetFound as e:
        console.print(f"[yellow]{e}[/yellow]")
        raise typer.Exit(EXIT_FAILURES)
    except (OSError, ValueError) as e:
        console.print(f"[red]Error:[/red] {e}")
        raise typer.Exit(EXIT_INVALID)
    console.print(
        json.dumps(
            {
                "size": selection.size,
                "mean_tau": selection.mean_tau,
                "indices": list(selection.indices),
                "hardest": list(select_hardest(matrix, hardest)) if hardest else [],
            }
        )
    )


def main() -> None:
    app()


if __name__ == "__main__":
    main()
