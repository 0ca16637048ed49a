"""HTTP transport to remote multimodal models."""

from dataclasses import replace
from typing import Optional, Sequence
import logging
import os
import time

import httpx
from tenacity import (
    RetryError,
    Retrying,
    before_sleep_log,
    retry_if_exception_type,
    stop_after_attempt,
    wait_exponential,
)
from tenacity.wait import wait_base

from ..errors import TransportError
from ..raster import ImageBuffer
from .base import Completion, TextBackend
from .providers import ProviderProfile, build_request, get_profile, parse_response

logger = logging.getLogger(__name__)

RETRY_STATUS = frozenset({408, 409, 429, 500, 502, 503, 504, 529})


class _Retryable(Exception):
    """Transient failure worth another attempt."""


class HttpTextBackend(TextBackend):
    """Sends prompts to a chat API and returns the raw reply.

    Transient failures (connection errors, timeouts, 408/429/5xx) are retried with
    exponential backoff of 1 s, 4 s and 16 s; other HTTP errors fail immediately.

    Args:
        profile: Provider profile name
        model: Model id sent to the provider (and price table key)
        api_key: Key override; read from the profile's environment variable otherwise
        max_tokens: Reply length cap
        retries: Retries after the first attempt
        client: Pre-configured httpx client (tests inject a MockTransport)
        wait: Backoff strategy override
        timeout_s: Per-request timeout
        base_url: Scheme and host override, for proxies and compatible gateways
    """

    def __init__(
        self,
        profile: str,
        model: str,
        api_key: Optional[str] = None,
        max_tokens: int = 256,
        retries: int = 3,
        client: Optional[httpx.Client] = None,
        wait: Optional[wait_base] = None,
        timeout_s: float = 120.0,
        base_url: Optional[str] = None,
    ):
        self.profile: ProviderProfile = get_profile(profile)
        if base_url:
            self.profile = replace(self.profile, base_url=base_url.rstrip("/"))
        self.model_id = model
        self.backend_id = self.profile.name
        self.max_tokens = max_tokens
        self.retries = retries
        key = api_key if api_key is not None else os.environ.get(self.profile.key_env)
        if not key:
            raise TransportError(
                f"No API key for {self.profile.name}: set {self.profile.key_env}"
            )
        self._key = key
        self._client = client or httpx.Client(timeout=timeout_s)
        self._wait = wait if wait is not None else wait_exponential(multiplier=1, exp_base=4)

    def _post(self, body: bytes) -> bytes:
        try:
            response = self._client.post(
                self.profile.url(self.model_id),
                content=body,
                headers=self.profile.headers(self._key),
            )
        except (httpx.TransportError, httpx.TimeoutException) as e:
            raise _Retryable(f"{type(e).__name__}: {e}") from e
        if response.status_code in RETRY_STATUS:
            raise _Retryable(f"HTTP {response.status_code}")
        if response.is_error:
            raise TransportError(
                f"{self.profile.name} returned HTTP {response.status_code}: {response.text[:200]}"
            )
        return response.content

    def complete(self, prompt: str, images: Sequence[ImageBuffer]) -> Completion:
        body = build_request(prompt, images, self.profile, self.model_id, self.max_tokens)
        retrying = Retrying(
            stop=stop_after_attempt(self.retries + 1),
            wait=self._wait,
            retry=retry_if_exception_type(_Retryable),
            before_sleep=before_sleep_log(logger, logging.WARNING),
        )
        started = time.perf_counter()
        try:
            raw = retrying(self._post, body)
        except RetryError as e:
            raise TransportError(
                f"{self.profile.name} unreachable after {self.retries + 1} attempts: "
                f"{e.last_attempt.exception()}"
            ) from None
        completion = parse_response(raw, self.profile)
        return Completion(
            completion.text,
            completion.input_tokens,
            completion.output_tokens,
            latency_s=time.perf_counter() - started,
        )

    def close(self) -> None:
        self._client.close()
