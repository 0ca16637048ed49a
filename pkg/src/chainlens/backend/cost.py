"""Token pricing and accumulated spend.

Prices are kept as ``Decimal`` dollars per million tokens so that totals are exact.
"""

from dataclasses import dataclass, field
from decimal import Decimal
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, Mapping, Optional, Union
import json
import threading

from ..errors import UnknownModel

MILLION = Decimal(1_000_000)


@dataclass(frozen=True)
class ModelPrice:
    """Dollars per million input and output tokens."""

    input: Decimal
    output: Decimal

    def __post_init__(self) -> None:
        if self.input < 0 or self.output < 0:
            raise ValueError(f"Prices must be non-negative (got {self.input}, {self.output})")

    def cost(self, input_tokens: int, output_tokens: int) -> Decimal:
        return (self.input * input_tokens + self.output * output_tokens) / MILLION


def load_price_table(path: Optional[Union[str, Path]] = None) -> Dict[str, ModelPrice]:
    """Read ``{model_id: {"input": rate, "output": rate}}``; the bundled table by default."""
    if path is None:
        bundled = resources.files("chainlens").joinpath("data", "prices.json")
        text = bundled.read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    # parse_float keeps "2.50" exact
    table = json.loads(text, parse_float=Decimal)
    return {
        model: ModelPrice(Decimal(rates["input"]), Decimal(rates["output"]))
        for model, rates in table.items()
    }


@dataclass(frozen=True)
class UsageEntry:
    """Tokens billed for one model call."""

    model_id: str
    input_tokens: int
    output_tokens: int


@dataclass
class ModelTotals:
    calls: int = 0
    input_tokens: int = 0
    output_tokens: int = 0
    cost: Decimal = Decimal(0)


@dataclass
class CostLedger:
    """Running spend per model.

    Attributes:
        prices: Price table keyed by model id
        totals: Accumulated calls, tokens and dollars per model
    """

    prices: Mapping[str, ModelPrice]
    totals: Dict[str, ModelTotals] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def add(self, entry: UsageEntry) -> Decimal:
        """Bill one call.

        Raises:
            UnknownModel: If the model has no price entry
        """
        try:
            price = self.prices[entry.model_id]
        except KeyError:
            raise UnknownModel(f"No price for model '{entry.model_id}'") from None
        amount = price.cost(entry.input_tokens, entry.output_tokens)
        with self._lock:
            totals = self.totals.setdefault(entry.model_id, ModelTotals())
            totals.calls += 1
            totals.input_tokens += entry.input_tokens
            totals.output_tokens += entry.output_tokens
            totals.cost += amount
        return amount

    @property
    def total_cost(self) -> Decimal:
        with self._lock:
            return sum((t.cost for t in self.totals.values()), Decimal(0))

    def to_dict(self) -> Dict[str, Dict[str, str]]:
        with self._lock:
            return {
                model: {
                    "calls": str(t.calls),
                    "input_tokens": str(t.input_tokens),
                    "output_tokens": str(t.output_tokens),
                    "cost_usd": str(t.cost),
                }
                for model, t in sorted(self.totals.items())
            }


def record_cost(entries: Iterable[UsageEntry], ledger: CostLedger) -> CostLedger:
    """Bill every entry of a transcript; entries with no tokens leave the ledger unchanged.

    Raises:
        UnknownModel: If any entry names a model missing from the price table
    """
    for entry in entries:
        if entry.model_id not in ledger.prices:
            raise UnknownModel(f"No price for model '{entry.model_id}'")
        if entry.input_tokens == 0 and entry.output_tokens == 0:
            continue
        ledger.add(entry)
    return ledger
