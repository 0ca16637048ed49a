"""Base classes for answer backends."""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Sequence

from ..raster import ImageBuffer
from .queries import Query


@dataclass(frozen=True)
class Completion:
    """One raw model reply.

    Attributes:
        text: Reply text
        input_tokens: Prompt tokens billed
        output_tokens: Completion tokens billed
        latency_s: Wall-clock request time in seconds (0 for cached replies)
    """

    text: str
    input_tokens: int = 0
    output_tokens: int = 0
    latency_s: float = 0.0


class Backend(ABC):
    """Base class for everything that can answer sub-task queries.

    Two families exist:
    - Ground-truth backends (oracle, scripted noise, specialist) answer from
      annotations directly and never look at pixels
    - Text backends send rendered prompts and images to a model and return its raw
      reply; a Session turns that reply into an Answer

    Attributes:
        backend_id: Stable identifier, part of every cache key
        model_id: Model the backend talks to (price table key for text backends)
    """

    backend_id: str
    model_id: str
    renders_images: bool

    def describe(self) -> str:
        return f"{self.backend_id}:{self.model_id}"


class GroundTruthBackend(Backend):
    """Backend that answers from annotations."""

    renders_images = False

    @abstractmethod
    def answer_value(self, query: Query) -> Any:
        """Answer a query.

        Args:
            query: Any supported query kind

        Returns:
            The payload type documented on Answer for the query's kind

        Raises:
            MissingGroundTruth: If the annotations cannot answer this kind of query
        """
        pass


class TextBackend(Backend):
    """Backend that forwards a rendered prompt to a multimodal model."""

    renders_images = True

    @abstractmethod
    def complete(self, prompt: str, images: Sequence[ImageBuffer]) -> Completion:
        """Send one prompt with its images.

        Raises:
            TransportError: If the provider stays unreachable after retries
            ResponseFormatError: If the reply lacks the expected fields
        """
        pass
