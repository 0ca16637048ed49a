"""Specialist-constrained baseline: the chains answered from a vision specialist's outputs."""

from pathlib import Path
from typing import Optional, Union

from ..backend import Backend
from .manifest import RunManifest, parse_manifest
from .runner import RunSummary, run


def specialist_manifest(
    manifest: RunManifest, predictions: Union[str, Path], output: Optional[Path] = None
) -> RunManifest:
    """Same run answered by the specialist backend over predictions.

    Raises:
        ManifestError: If predictions lack what the task's queries need
    """
    data = manifest.model_dump(mode="python")
    data["backend"] = {
        **data["backend"],
        "kind": "specialist",
        "model": None,
        "predictions": Path(predictions),
    }
    if output is not None:
        data["output"] = output
    return parse_manifest(data)


def run_specialist_chain(
    manifest: RunManifest,
    predictions: Union[str, Path],
    output: Optional[Path] = None,
    backend: Optional[Backend] = None,
) -> RunSummary:
    """Run the manifest's chain with every sub-task answered from the specialist's outputs.

    Detection keeps a grid cell iff it intersects a predicted box, segmentation
    assigns each superpixel its predicted majority class, and depth or normal
    relations compare predicted region means. The predictions use the dataset layout;
    the ``predictions/`` directory of any finished run qualifies.

    Args:
        manifest: Run description; its backend section is replaced
        predictions: Specialist output directory
        output: Run directory override
        backend: Backend override (tests)
    """
    return run(specialist_manifest(manifest, predictions, output), backend)
