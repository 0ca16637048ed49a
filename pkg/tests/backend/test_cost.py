"""Tests for pricing and the cost ledger."""

from decimal import Decimal

import pytest

from chainlens.backend import CostLedger, ModelPrice, UsageEntry, load_price_table, record_cost
from chainlens.errors import UnknownModel


class TestPriceTable:
    """Tests for load_price_table."""

    def test_bundled_rates(self):
        """Test one million input tokens of the bundled GPT-4o entry."""
        table = load_price_table()
        assert table["gpt-4o-2024-08-06"].cost(1_000_000, 0) == Decimal("2.50")

    def test_custom_file(self, tmp_path):
        """Test exact decimal parsing of a custom table."""
        (tmp_path / "p.json").write_text('{"m": {"input": 0.15, "output": 0.60}}')
        price = load_price_table(tmp_path / "p.json")["m"]
        assert price == ModelPrice(Decimal("0.15"), Decimal("0.60"))

    def test_negative_rate(self):
        """Test that negative rates are refused."""
        with pytest.raises(ValueError):
            ModelPrice(Decimal("-1"), Decimal("0"))


class TestCostLedger:
    """Tests for CostLedger."""

    def test_totals(self):
        """Test accumulation across calls."""
        ledger = CostLedger({"m": ModelPrice(Decimal("2.50"), Decimal("10.00"))})
        assert ledger.add(UsageEntry("m", 1000, 100)) == Decimal("0.0035")
        ledger.add(UsageEntry("m", 1000, 100))
        assert ledger.total_cost == Decimal("0.007")
        assert ledger.to_dict()["m"]["calls"] == "2"

    def test_unknown_model(self):
        """Test billing a model without a price."""
        with pytest.raises(UnknownModel):
            CostLedger({}).add(UsageEntry("m", 1, 1))


class TestRecordCost:
    """Tests for record_cost."""

    def test_zero_usage_leaves_ledger(self):
        """Test that an empty entry is not billed."""
        ledger = CostLedger({"m": ModelPrice(Decimal(1), Decimal(1))})
        record_cost([UsageEntry("m", 0, 0)], ledger)
        assert ledger.total_cost == 0 and ledger.totals == {}

    def test_unknown_model_even_without_tokens(self):
        """Test that an unpriced model is reported before billing."""
        with pytest.raises(UnknownModel):
            record_cost([UsageEntry("x", 0, 0)], CostLedger({}))
