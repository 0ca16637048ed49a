"""Exception hierarchy shared by every chainlens subpackage."""

from typing import Optional


class ChainlensError(Exception):
    """Base class for all errors raised by chainlens."""


class PfmFormatError(ChainlensError, ValueError):
    """A PFM file has a malformed header or a truncated payload."""


class MaskFormatError(ChainlensError, ValueError):
    """An index mask PNG is unreadable or holds labels outside the vocabulary."""


class DatasetError(ChainlensError):
    """The dataset directory does not follow the expected layout."""


class InvalidAnswer(ChainlensError):
    """A backend reply could not be mapped onto the query's closed option set.

    Attributes:
        raw_text: The last raw reply received from the backend
        attempts: Number of prompts issued before giving up
    """

    def __init__(self, message: str, raw_text: str = "", attempts: int = 0):
        super().__init__(message)
        self.raw_text = raw_text
        self.attempts = attempts


class TransportError(ChainlensError):
    """The provider could not be reached after all retries."""


class ResponseFormatError(ChainlensError):
    """A provider response lacks an expected field.

    Attributes:
        path: JSON path of the missing or malformed field
    """

    def __init__(self, path: str, detail: str = ""):
        message = f"Response is missing '{path}'"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)
        self.path = path


class PayloadTooLarge(ChainlensError):
    """An encoded image exceeds the provider's payload limit."""


class MissingGroundTruth(ChainlensError):
    """A ground-truth backend was asked a question its annotations cannot answer."""


class UnknownModel(ChainlensError, KeyError):
    """A model id is absent from the price table."""


class NotFound(ChainlensError):
    """Grid search found no cell containing the requested class."""


class DegenerateBounds(ChainlensError, ValueError):
    """Normalization anchors coincide, so no unit score exists."""


class UndefinedCorrelation(ChainlensError, ValueError):
    """A rank correlation was requested for a constant input."""


class NoSubsetFound(ChainlensError):
    """No candidate subset size reached the Kendall tau threshold.

    Attributes:
        best_tau: Highest mean tau attained over all candidate sizes
        best_size: Size at which best_tau was attained
    """

    def __init__(self, best_tau: float, best_size: Optional[int]):
        super().__init__(
            f"No candidate size reached the threshold (best mean tau {best_tau:.4f} "
            f"at size {best_size})"
        )
        self.best_tau = best_tau
        self.best_size = best_size


class ManifestError(ChainlensError, ValueError):
    """A run manifest failed validation."""
