"""End-to-end suites over generated synthetic data.

Ground-truth answers run through the full chains; scripted noise checks that the
metrics move the right way as answers get worse.
"""

from typing import List

import numpy as np
import pytest

from chainlens.backend import OracleBackend, ScriptedBackend, Session
from chainlens.chains import (
    ChainContext,
    classify_batch,
    detect,
    estimate_depth_ranks,
    estimate_normal_ranks,
    locate_object,
    segment_image,
)
from chainlens.core.geometry import box_iou
from chainlens.errors import NotFound
from chainlens.harness import VOCABULARY, synthetic_samples
from chainlens.metrics import (
    average_precision,
    majority_fill,
    normal_axis_rho,
    pairwise_accuracy,
    raster_spearman,
    seg_metrics,
    segment_means,
    superpixel_upper_bound,
)
from chainlens.superpixel import slic

pytestmark = pytest.mark.slow

NOISE_LEVELS = (0.0, 0.1, 0.3)


def oracle_context(samples) -> ChainContext:
    return ChainContext(Session(OracleBackend({s.truth.image_id: s.truth for s in samples})))


def scripted_context(samples, error_rate: float, seed: int) -> ChainContext:
    oracle = OracleBackend({s.truth.image_id: s.truth for s in samples})
    return ChainContext(Session(ScriptedBackend(oracle, error_rate, seed=seed)))


def strictly_decreasing(values: List[float]) -> bool:
    return all(a > b for a, b in zip(values, values[1:]))


def non_decreasing(values: List[float]) -> bool:
    return all(b >= a for a, b in zip(values, values[1:]))


class TestOracleDetection:
    """Detection with ground-truth answers."""

    def test_ap50(self):
        """Test AP50 over 500 images with the default grid settings."""
        samples = synthetic_samples(seed=11, count=500)
        ctx = oracle_context(samples)
        preds = [detect(ctx, s.truth.image_id, s.image, VOCABULARY) for s in samples]
        scores = average_precision(preds, [s.truth.boxes for s in samples])
        assert scores["AP50"] >= 0.90


class TestOracleSegmentation:
    """Segmentation with ground-truth answers."""

    def test_equals_majority_fill(self):
        """Test exact agreement with the independently computed superpixel fill."""
        samples = synthetic_samples(seed=12, count=100)
        ctx = oracle_context(samples)
        for s in samples:
            mask = segment_image(ctx, s.truth.image_id, s.image, VOCABULARY)
            spmap = slic(s.image, 100)
            assert np.array_equal(mask.labels, majority_fill(spmap, s.truth.mask).labels)
            bound = superpixel_upper_bound(spmap, s.truth.mask)
            assert seg_metrics(mask, s.truth.mask)["mIoU"] == pytest.approx(bound, abs=1e-12)

    def test_finer_superpixels_never_hurt(self):
        """Test that the ceiling does not drop as superpixels get smaller."""
        samples = synthetic_samples(seed=13, count=20)
        means = [
            np.mean([superpixel_upper_bound(slic(s.image, k), s.truth.mask) for s in samples])
            for k in (50, 100, 200)
        ]
        assert non_decreasing(means)


class TestOracleDepth:
    """Depth ranking with ground-truth answers."""

    def test_rank_correlation(self):
        """Test mean rho over 50 smooth depth fields at 100 superpixels and 200 pairs."""
        samples = synthetic_samples(seed=14, count=50)
        ctx = oracle_context(samples)
        rhos, accuracies = [], []
        for s in samples:
            estimate = estimate_depth_ranks(ctx, s.truth.image_id, s.image, k=100, n_pairs=200)
            rhos.append(raster_spearman(estimate.raster, s.truth.depth))
            truth = segment_means(estimate.spmap, s.truth.depth)
            accuracies.append(pairwise_accuracy(estimate.comparisons, truth))
        assert np.mean(rhos) >= 0.80
        assert all(a == 100.0 for a in accuracies)

    def test_more_pairs_never_hurt(self):
        """Test that rho does not drop as more pairs are compared."""
        samples = synthetic_samples(seed=15, count=20)
        ctx = oracle_context(samples)
        means = [
            np.mean(
                [
                    raster_spearman(
                        estimate_depth_ranks(ctx, s.truth.image_id, s.image, n_pairs=n).raster,
                        s.truth.depth,
                    )
                    for s in samples
                ]
            )
            for n in (100, 200, 400)
        ]
        assert non_decreasing(means)


class TestOracleNormals:
    """Surface normal ranking with ground-truth answers."""

    def test_per_axis_correlation(self):
        """Test mean rho of every axis on sphere normals."""
        samples = synthetic_samples(seed=16, count=20)
        ctx = oracle_context(samples)
        per_axis: List[List[float]] = [[], [], []]
        for s in samples:
            estimate = estimate_normal_ranks(ctx, s.truth.image_id, s.image)
            for axis, (pred, gt) in enumerate(zip(estimate.rasters(), s.truth.normals)):
                rho = normal_axis_rho(pred, gt)
                if rho is not None:
                    per_axis[axis].append(rho)
        for rhos in per_axis:
            assert rhos and np.mean(rhos) >= 0.6


class TestScriptedNoise:
    """Chains under answers that are wrong with probability ε."""

    def test_classification_accuracy(self):
        """Test that accuracy sits near 1 - ε."""
        samples = synthetic_samples(seed=17, count=1000)
        ctx = scripted_context(samples, 0.2, seed=3)
        labels = classify_batch(ctx, [(s.truth.image_id, s.image) for s in samples], VOCABULARY)
        accuracy = np.mean([a == s.truth.label for a, s in zip(labels, samples)])
        assert 0.76 <= accuracy <= 0.84

    def test_detection_iou_degrades(self):
        """Test that mean localization IoU falls as ε grows, for most seeds."""
        samples = synthetic_samples(seed=18, count=40)

        def mean_iou(error_rate: float, seed: int) -> float:
            ctx = scripted_context(samples, error_rate, seed)
            ious = []
            for s in samples:
                for gt in s.truth.boxes:
                    try:
                        box = locate_object(ctx, s.truth.image_id, s.image, gt.class_id, VOCABULARY)
                    except NotFound:
                        ious.append(0.0)
                        continue
                    ious.append(box_iou(box, gt.box))
            return float(np.mean(ious))

        wins = sum(
            strictly_decreasing([mean_iou(eps, seed) for eps in NOISE_LEVELS]) for seed in range(3)
        )
        assert wins >= 2

    def test_depth_rho_degrades(self):
        """Test that mean depth rho falls as ε grows, for most seeds."""
        samples = synthetic_samples(seed=19, count=15)

        def mean_rho(error_rate: float, seed: int) -> float:
            ctx = scripted_context(samples, error_rate, seed)
            return float(
                np.mean(
                    [
                        raster_spearman(
                            estimate_depth_ranks(ctx, s.truth.image_id, s.image).raster,
                            s.truth.depth,
                        )
                        for s in samples
                    ]
                )
            )

        wins = sum(
            strictly_decreasing([mean_rho(eps, seed) for eps in NOISE_LEVELS]) for seed in range(3)
        )
        assert wins >= 2
