"""Domain model - vocabularies and normalized scores."""

from .vocabulary import ClassVocabulary
from .scoring import normalize_axis

__all__ = ["ClassVocabulary", "normalize_axis"]
