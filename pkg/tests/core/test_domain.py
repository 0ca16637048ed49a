"""Tests for vocabularies and normalized scores."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from chainlens.core.domain import ClassVocabulary, normalize_axis
from chainlens.errors import DegenerateBounds


class TestClassVocabulary:
    """Tests for ClassVocabulary."""

    def test_ids_follow_order(self):
        """Test that ids are line positions."""
        vocab = ClassVocabulary.from_names(["cat", "dog"])
        assert vocab.id_of("dog") == 1
        assert vocab.name_of(0) == "cat"
        assert "cat" in vocab and len(vocab) == 2

    def test_unknown_name(self):
        """Test lookup of a missing class."""
        with pytest.raises(KeyError):
            ClassVocabulary.from_names(["cat"]).id_of("cow")

    def test_out_of_range_id(self):
        """Test lookup of a missing id."""
        with pytest.raises(IndexError):
            ClassVocabulary.from_names(["cat"]).name_of(3)

    def test_duplicates_rejected(self):
        """Test that repeated names are refused."""
        with pytest.raises(ValueError, match="more than once"):
            ClassVocabulary.from_names(["cat", "cat"])

    def test_empty_rejected(self):
        """Test that a vocabulary needs a class."""
        with pytest.raises(ValueError):
            ClassVocabulary.from_names([])

    def test_file_round_trip(self, tmp_path):
        """Test writing and reading the one-name-per-line format."""
        vocab = ClassVocabulary.from_names(["road", "sky", "traffic light"])
        vocab.write(tmp_path / "vocab.txt")
        (tmp_path / "vocab.txt").write_text("road\nsky\ntraffic light\n\n", encoding="utf-8")
        assert ClassVocabulary.from_file(tmp_path / "vocab.txt") == vocab

    def test_ignore_index_widens(self):
        """Test that the mask sentinel moves to 65535 once ids pass a byte."""
        assert ClassVocabulary.from_names([f"c{i}" for i in range(255)]).ignore_index == 255
        assert ClassVocabulary.from_names([f"c{i}" for i in range(256)]).ignore_index == 65535

    def test_sentinel_collisions(self):
        """Test that a sentinel inside the id range is reported."""
        vocab = ClassVocabulary.from_names([f"c{i}" for i in range(300)])
        assert vocab.ignore_index_errors(65535) == []
        assert "collides" in vocab.ignore_index_errors(255)[0]
        assert "16 bits" in vocab.ignore_index_errors(70000)[0]

    def test_no_room_for_sentinel(self):
        """Test that a vocabulary may not reach the 16-bit sentinel."""
        with pytest.raises(ValueError, match="no room for the ignore index"):
            ClassVocabulary.from_names([f"c{i}" for i in range(65535)])


class TestNormalizeAxis:
    """Tests for normalize_axis."""

    def test_anchors_map_to_bounds(self):
        """Test that the anchors map to 0 and 1."""
        assert normalize_axis(0.2, blind=0.2, specialist=0.8) == 0.0
        assert normalize_axis(0.8, blind=0.2, specialist=0.8) == 1.0
        assert normalize_axis(0.5, blind=0.2, specialist=0.8) == pytest.approx(0.5)

    def test_clamped(self):
        """Test that scores beyond the anchors are clamped."""
        assert normalize_axis(0.95, blind=0.2, specialist=0.8) == 1.0
        assert normalize_axis(0.0, blind=0.2, specialist=0.8) == 0.0

    def test_lower_is_better(self):
        """Test a metric where the specialist scores below the blind guess."""
        assert normalize_axis(0.3, blind=0.5, specialist=0.1) == pytest.approx(0.5)

    def test_coinciding_anchors(self):
        """Test that equal anchors raise."""
        with pytest.raises(DegenerateBounds):
            normalize_axis(0.4, blind=0.4, specialist=0.4)

    @given(st.floats(-10, 10), st.floats(-10, 10), st.floats(-10, 10))
    def test_always_in_unit_interval(self, value, blind, specialist):
        """Test the clamp for arbitrary inputs."""
        if blind == specialist:
            return
        assert 0.0 <= normalize_axis(value, blind, specialist) <= 1.0
