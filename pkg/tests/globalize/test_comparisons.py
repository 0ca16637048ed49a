"""Tests for relations and comparison sets."""

import pytest

from chainlens.globalize import Axis, Comparison, ComparisonSet, Relation, relation_between


class TestRelation:
    """Tests for Relation and relation_between."""

    def test_inverted(self):
        """Test swapping the pair order."""
        assert Relation.GREATER.inverted() is Relation.LESS
        assert Relation.LESS.inverted() is Relation.GREATER
        assert Relation.EQUAL.inverted() is Relation.EQUAL

    def test_binary(self):
        """Test that without a tolerance there is no 'equal'."""
        assert relation_between(2.0, 1.0) is Relation.GREATER
        assert relation_between(1.0, 1.0) is Relation.LESS

    def test_tolerance_band(self):
        """Test the equal band."""
        assert relation_between(1.05, 1.0, 0.1) is Relation.EQUAL
        assert relation_between(1.2, 1.0, 0.1) is Relation.GREATER
        assert relation_between(1.0, 1.0, 0.0) is Relation.EQUAL


class TestComparisonSet:
    """Tests for Comparison and ComparisonSet."""

    def test_self_comparison(self):
        """Test that a segment cannot be compared with itself."""
        with pytest.raises(ValueError):
            Comparison(2, 2, Relation.LESS)

    def test_out_of_range(self):
        """Test that ids must be below k."""
        with pytest.raises(ValueError, match="outside 3 segments"):
            ComparisonSet.build(Axis.DEPTH, 3, [Comparison(0, 3, Relation.LESS)])

    def test_contradictions_kept(self):
        """Test that both answers for one pair survive."""
        comparisons = ComparisonSet.build(
            Axis.DEPTH, 2, [Comparison(0, 1, Relation.LESS), Comparison(0, 1, Relation.GREATER)]
        )
        assert len(comparisons) == 2
