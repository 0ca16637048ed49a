"""Tests for superpixel segmentation."""

import re

import numpy as np
import pytest

from chainlens.chains import IGNORE_INDEX, fill_segments, segment_direct, segment_image
from chainlens.core.domain import ClassVocabulary
from chainlens.metrics import majority_fill, seg_metrics, superpixel_upper_bound
from chainlens.superpixel import SuperpixelMap, slic


class TestFillSegments:
    """Tests for fill_segments."""

    def test_lookup(self):
        """Test that every pixel takes its segment's class."""
        spmap = SuperpixelMap.from_labels([[0, 0, 1], [2, 2, 1]])
        mask = fill_segments(spmap, [4, None, 1])
        assert mask.labels.tolist() == [[4, 4, IGNORE_INDEX], [1, 1, IGNORE_INDEX]]
        assert mask.ignore_index == IGNORE_INDEX

    def test_count_mismatch(self):
        """Test that one class per segment is required."""
        with pytest.raises(ValueError, match="2 classes for 3 segments"):
            fill_segments(SuperpixelMap.from_labels([[0, 1, 2]]), [0, 1])


class TestSegmentImage:
    """Tests for segment_image."""

    def test_oracle_matches_majority_fill(self, oracle_ctx, samples, vocab):
        """Test that ground-truth answers reproduce the superpixel ceiling."""
        for s in samples[:4]:
            mask = segment_image(oracle_ctx, s.truth.image_id, s.image, vocab, k=50)
            expected = majority_fill(slic(s.image, 50), s.truth.mask)
            assert np.array_equal(mask.labels, expected.labels)
            bound = superpixel_upper_bound(slic(s.image, 50), s.truth.mask)
            assert seg_metrics(mask, s.truth.mask)["mIoU"] == pytest.approx(bound, abs=1e-12)

    def test_single_segment(self, oracle_ctx, samples, vocab):
        """Test k=1 labels the whole image with one class."""
        s = samples[0]
        mask = segment_image(oracle_ctx, s.truth.image_id, s.image, vocab, k=1)
        assert len(np.unique(mask.labels)) == 1

    def test_history_irrelevant_for_oracle(self, oracle_ctx, samples, vocab):
        """Test that earlier answers do not sway ground-truth answers."""
        s = samples[3]
        with_history = segment_image(oracle_ctx, "00003", s.image, vocab, k=40, batch_size=8)
        without = segment_image(
            oracle_ctx, "00003", s.image, vocab, k=40, batch_size=8, history=False
        )
        assert with_history == without

    def test_history_in_later_prompts(self, make_text_ctx, samples, vocab):
        """Test that the second batch sees the first batch's answers."""

        def reply(prompt):
            count = int(prompt.split("You will see ")[1].split(" ")[0])
            return "\n".join(f"{n}. `ground`" for n in range(1, count + 1))

        backend, ctx = make_text_ctx(reply)
        mask = segment_image(ctx, "a", samples[0].image, vocab, k=16, batch_size=4)
        assert set(np.unique(mask.labels)) == {1}
        assert "(none)" in backend.prompts[0]
        assert "region 1: ground" in backend.prompts[1]
        assert backend.image_counts[0] == 4 * 3

    def test_unanswerable_batch(self, make_text_ctx, samples, vocab):
        """Test that regions without a valid answer are ignored."""
        _, ctx = make_text_ctx(lambda p: "no idea")
        mask = segment_image(ctx, "a", samples[0].image, vocab, k=4, batch_size=4)
        assert set(np.unique(mask.labels)) == {IGNORE_INDEX}

    def test_sentinel_follows_vocabulary(self, make_text_ctx, samples):
        """Test that unanswered regions get 65535 once the vocabulary passes a byte."""
        _, ctx = make_text_ctx(lambda p: "no idea")
        large = ClassVocabulary.from_names([f"c{i}" for i in range(300)])
        mask = segment_image(ctx, "a", samples[0].image, large, k=4, batch_size=4)
        assert mask.ignore_index == 65535
        assert set(np.unique(mask.labels)) == {65535}

    def test_colliding_sentinel(self, oracle_ctx, samples, vocab):
        """Test that the sentinel may not be a class id."""
        with pytest.raises(ValueError, match="collides"):
            segment_image(oracle_ctx, "00000", samples[0].image, vocab, ignore_index=3)

    def test_invalid_batch_size(self, oracle_ctx, samples, vocab):
        """Test that batches need at least one region."""
        with pytest.raises(ValueError):
            segment_image(oracle_ctx, "00000", samples[0].image, vocab, batch_size=0)


def numbered_regions(name):
    """Reply naming one class for every region the prompt asks about."""

    def reply(prompt):
        first, last = re.search(r"region\(s\) (\d+)(?: to (\d+))?", prompt).groups()
        count = int(last or first) - int(first) + 1
        return "\n".join(f"{n}. `{name}`" for n in range(1, count + 1))

    return reply


class TestSegmentDirect:
    """Tests for segment_direct."""

    def test_oracle_reaches_superpixel_ceiling(self, oracle_ctx, samples, vocab):
        """Test that ground-truth answers give the majority fill."""
        for s in samples[:3]:
            mask = segment_direct(oracle_ctx, s.truth.image_id, s.image, vocab, k=50)
            expected = majority_fill(slic(s.image, 50), s.truth.mask)
            assert np.array_equal(mask.labels, expected.labels)

    def test_one_question_one_image(self, make_text_ctx, samples, vocab):
        """Test that all superpixels are asked about over a single numbered image."""
        backend, ctx = make_text_ctx(numbered_regions("ground"))
        mask = segment_direct(ctx, "a", samples[0].image, vocab, k=16)
        assert set(np.unique(mask.labels)) == {1}
        assert backend.calls == 1
        assert backend.image_counts == [1]
        k = slic(samples[0].image, 16).k
        assert f"region(s) 1 to {k}" in backend.prompts[0]

    def test_unanswered(self, make_text_ctx, samples, vocab):
        """Test that regions without a valid answer are ignored."""
        _, ctx = make_text_ctx(lambda p: "no idea")
        mask = segment_direct(ctx, "a", samples[0].image, vocab, k=4)
        assert set(np.unique(mask.labels)) == {IGNORE_INDEX}
