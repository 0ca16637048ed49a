"""Shared fixtures: synthetic samples, oracle sessions and a counting text backend."""

from decimal import Decimal
from pathlib import Path
from typing import Callable, Dict, List, Sequence

import numpy as np
import pytest

from chainlens.backend import (
    Completion,
    CostLedger,
    ModelPrice,
    OracleBackend,
    ResponseCache,
    Session,
    TextBackend,
)
from chainlens.chains import ChainContext
from chainlens.core.geometry import RasterSize
from chainlens.harness import VOCABULARY, generate_dataset, synthetic_samples
from chainlens.raster import GroundTruth, ImageBuffer

FAKE_MODEL = "fake-model"


class CountingTextBackend(TextBackend):
    """Replies through a function of the prompt and counts every call."""

    backend_id = "fake"
    model_id = FAKE_MODEL

    def __init__(
        self, reply: Callable[[str], str], input_tokens: int = 100, output_tokens: int = 5
    ):
        self.reply = reply
        self.input_tokens = input_tokens
        self.output_tokens = output_tokens
        self.calls = 0
        self.prompts: List[str] = []
        self.image_counts: List[int] = []

    def complete(self, prompt: str, images: Sequence[ImageBuffer]) -> Completion:
        self.calls += 1
        self.prompts.append(prompt)
        self.image_counts.append(len(images))
        return Completion(self.reply(prompt), self.input_tokens, self.output_tokens, 0.01)


def fake_prices() -> Dict[str, ModelPrice]:
    return {FAKE_MODEL: ModelPrice(Decimal("2.50"), Decimal("10.00"))}


@pytest.fixture
def vocab():
    return VOCABULARY


@pytest.fixture(scope="session")
def samples():
    """Twelve synthetic 96x96 images with every annotation family."""
    return synthetic_samples(seed=7, count=12)


@pytest.fixture(scope="session")
def truth(samples) -> Dict[str, GroundTruth]:
    return {s.truth.image_id: s.truth for s in samples}


@pytest.fixture
def oracle(truth):
    return OracleBackend(truth)


@pytest.fixture
def oracle_ctx(oracle) -> ChainContext:
    return ChainContext(Session(oracle))


@pytest.fixture
def make_text_ctx(tmp_path):
    """Builds a context around a CountingTextBackend with a cache and ledger."""

    def build(reply: Callable[[str], str], cache: bool = True, **kwargs):
        backend = CountingTextBackend(reply, **kwargs)
        session = Session(
            backend,
            cache=ResponseCache(tmp_path / "cache") if cache else None,
            ledger=CostLedger(fake_prices()),
            invalid_retries=1,
        )
        return backend, ChainContext(session)

    return build


@pytest.fixture(scope="session")
def synthetic_root(tmp_path_factory) -> Path:
    """Small on-disk synthetic dataset shared across harness tests."""
    root = tmp_path_factory.mktemp("synthetic")
    return generate_dataset(root, seed=3, count=6, size=RasterSize(64, 64))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
