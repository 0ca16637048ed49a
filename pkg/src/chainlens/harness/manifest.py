"""Run manifests: one JSON document describing one reproducible run."""

from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union, get_args
import json

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..backend import PROFILE_NAMES
from ..chains import GridParams, Renderer
from ..errors import ManifestError
from ..globalize import ObjectiveWeights
from ..superpixel import MarkerSpec, MarkerStyle

TaskKind = Literal[
    "classify",
    "list",
    "detect",
    "detect_direct",
    "segment",
    "segment_direct",
    "group",
    "depth",
    "normals",
]
TASKS: Tuple[str, ...] = get_args(TaskKind)
GROUND_TRUTH_KINDS = ("oracle", "scripted", "specialist")
# Backends that answer exactly from annotations; blind runs refuse them.
SIGHTED_KINDS = ("oracle", "specialist")

# Ground truth each task is scored against.
TASK_ANNOTATIONS: Dict[str, Tuple[str, ...]] = {
    "classify": ("labels.jsonl",),
    "list": ("boxes.jsonl",),
    "detect": ("boxes.jsonl",),
    "detect_direct": ("boxes.jsonl",),
    "segment": ("masks",),
    "segment_direct": ("masks",),
    "group": ("points.jsonl",),
    "depth": ("depth",),
    "normals": ("normals_x", "normals_y", "normals_z"),
}

class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class BackendSpec(_Strict):
    """Which backend answers the queries.

    ``kind`` is a ground-truth answerer (oracle, scripted, specialist) or a provider
    profile name; providers also need ``model``.
    """

    kind: str = "oracle"
    model: Optional[str] = None
    base_url: Optional[str] = None
    max_tokens: int = Field(256, ge=1)
    retries: int = Field(3, ge=0)
    timeout_s: float = Field(120.0, gt=0)
    max_in_flight: int = Field(4, ge=1)
    invalid_retries: int = Field(3, ge=0)
    single_image: bool = False
    template_dir: Optional[Path] = None
    templates: Dict[str, str] = Field(default_factory=dict)
    # scripted
    error_rate: float = Field(0.0, ge=0.0, le=1.0)
    seed: int = 0
    multilabel_noise: Literal["toggle", "add_only"] = "toggle"
    noisy_kinds: Optional[List[str]] = None
    # oracle, scripted and specialist
    equal_fraction: float = Field(0.05, ge=0.0, lt=1.0)
    predictions: Optional[Path] = None

    @model_validator(mode="after")
    def _check_kind(self) -> "BackendSpec":
        if self.kind not in GROUND_TRUTH_KINDS and self.kind not in PROFILE_NAMES:
            known = ", ".join((*GROUND_TRUTH_KINDS, *PROFILE_NAMES))
            raise ValueError(f"Unknown backend kind '{self.kind}' (known: {known})")
        if self.kind in PROFILE_NAMES and not self.model:
            raise ValueError(f"Backend '{self.kind}' needs a model id")
        if self.kind == "specialist" and self.predictions is None:
            raise ValueError("The specialist backend needs a predictions directory")
        return self

    @property
    def remote(self) -> bool:
        return self.kind in PROFILE_NAMES


class GridSpec(_Strict):
    coarse: Tuple[int, int] = (3, 3)
    fine: Tuple[int, int] = (1, 3)
    adaptive_fine: bool = True
    max_iterations: int = Field(10, ge=1)
    min_window: int = Field(1, ge=1)

    def to_params(self) -> GridParams:
        return GridParams(
            coarse=self.coarse,
            fine=self.fine,
            adaptive_fine=self.adaptive_fine,
            max_iterations=self.max_iterations,
            min_window=self.min_window,
        )


class ChainParams(_Strict):
    """Every chain knob of the experiments."""

    k: int = Field(100, ge=1)
    n_pairs: int = Field(200, ge=1)
    compactness: float = Field(10.0, gt=0)
    lambda_gt: float = Field(1.0, ge=0)
    lambda_lt: float = Field(1.0, ge=0)
    lambda_eq: float = Field(1.0, ge=0)
    lambda_s: float = Field(1.0, ge=0)
    ternary_depth: bool = False
    ternary_normals: bool = True
    classify_batch_size: int = Field(100, ge=1)
    segment_batch_size: int = Field(16, ge=1)
    history: bool = True
    list_strategy: Literal["whole", "regions"] = "regions"
    grid: GridSpec = GridSpec()
    marker_style: MarkerStyle = "curve"
    marker_color: Tuple[int, int, int] = (255, 0, 0)
    marker_thickness: int = Field(2, ge=1)
    context_factor: float = Field(2.0, ge=1.0)
    blind: bool = False
    blank_color: Tuple[int, int, int] = (0, 0, 0)

    def weights(self) -> ObjectiveWeights:
        return ObjectiveWeights(
            greater=self.lambda_gt, less=self.lambda_lt, equal=self.lambda_eq, smooth=self.lambda_s
        )

    def renderer(self, single_image: bool = False) -> Renderer:
        marker = MarkerSpec(
            style=self.marker_style, color=self.marker_color, thickness=self.marker_thickness
        )
        return Renderer(
            marker=marker,
            context_factor=self.context_factor,
            single_image=single_image,
        )


class RunManifest(_Strict):
    """A complete run description.

    Relative paths are resolved against the manifest's directory by ``load_manifest``.
    """

    task: TaskKind
    dataset: Path
    output: Path
    name: Optional[str] = None
    vocabulary: Optional[Path] = None
    backend: BackendSpec = BackendSpec()
    chain: ChainParams = ChainParams()
    seed: int = 0
    workers: int = Field(1, ge=1)
    prices: Optional[Path] = None
    cache: Optional[Path] = None
    image_ids: Optional[List[str]] = None
    limit: Optional[int] = Field(None, ge=1)
    ignore_index: Optional[int] = Field(None, ge=0, le=65535)

    @model_validator(mode="after")
    def _check_blind(self) -> "RunManifest":
        if self.chain.blind and self.backend.kind in SIGHTED_KINDS:
            raise ValueError(
                f"chain.blind cannot use the '{self.backend.kind}' backend: it answers from "
                "annotations, not pixels (use a provider or 'scripted')"
            )
        return self

    @property
    def run_name(self) -> str:
        return self.name or self.output.name

    def validate_paths(self) -> List[str]:
        """Check that every referenced file and annotation family exists.

        Returns:
            List of error messages (empty if valid)
        """
        errors = []
        if not self.dataset.is_dir():
            return [f"dataset: {self.dataset} does not exist"]
        if not (self.dataset / "images").is_dir():
            errors.append(f"dataset: {self.dataset} has no images/ directory")
        vocabulary = self.vocabulary or self.dataset / "vocab.txt"
        if not vocabulary.is_file():
            errors.append(f"vocabulary: {vocabulary} does not exist")
        for entry in TASK_ANNOTATIONS[self.task]:
            if not (self.dataset / entry).exists():
                errors.append(f"dataset: task '{self.task}' needs {self.dataset / entry}")
        if self.prices is not None and not self.prices.is_file():
            errors.append(f"prices: {self.prices} does not exist")
        if self.backend.template_dir is not None and not self.backend.template_dir.is_dir():
            errors.append(f"backend.template_dir: {self.backend.template_dir} does not exist")
        predictions = self.backend.predictions
        if predictions is not None and not predictions.is_dir():
            errors.append(f"backend.predictions: {predictions} does not exist")
        elif predictions is not None and self.backend.kind == "specialist":
            for entry in TASK_ANNOTATIONS[self.task]:
                if not (predictions / entry).exists():
                    errors.append(
                        f"backend.predictions: task '{self.task}' needs {predictions / entry}"
                    )
        errors.extend(f"chain.grid: {e}" for e in self.chain.grid.to_params().validate())
        return errors

    def resolved(self, base: Path) -> "RunManifest":
        """Copy with relative paths anchored at base."""

        def anchor(path: Optional[Path]) -> Optional[Path]:
            if path is None or path.is_absolute():
                return path
            return base / path

        backend = self.backend.model_copy(
            update={
                "template_dir": anchor(self.backend.template_dir),
                "predictions": anchor(self.backend.predictions),
            }
        )
        return self.model_copy(
            update={
                "dataset": anchor(self.dataset),
                "output": anchor(self.output),
                "vocabulary": anchor(self.vocabulary),
                "prices": anchor(self.prices),
                "cache": anchor(self.cache),
                "backend": backend,
            }
        )


def parse_manifest(data: Union[str, bytes, dict], base: Optional[Path] = None) -> RunManifest:
    """Validate manifest content.

    Raises:
        ManifestError: Listing every schema and path problem at once
    """
    try:
        if isinstance(data, dict):
            manifest = RunManifest.model_validate(data)
        else:
            manifest = RunManifest.model_validate_json(data)
    except ValidationError as e:
        problems = [
            f"{'.'.join(str(p) for p in err['loc']) or '(root)'}: {err['msg']}"
            for err in e.errors()
        ]
        raise ManifestError("; ".join(problems)) from None
    if base is not None:
        manifest = manifest.resolved(base)
    errors = manifest.validate_paths()
    if errors:
        raise ManifestError("; ".join(errors))
    return manifest


def load_manifest(path: Union[str, Path]) -> RunManifest:
    """Read and validate a manifest file; relative paths resolve against its directory."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ManifestError(f"Cannot read manifest {path}: {e}") from None
    return parse_manifest(text, base=path.parent)


def dump_manifest(manifest: RunManifest) -> str:
    """Canonical JSON form, stored next to the run's records."""
    return json.dumps(manifest.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"
