"""Wire formats of the supported chat APIs.

``build_request`` produces the exact request body bytes for a rendered prompt and
``parse_response`` extracts the reply text and token usage. Both are pure so that
bodies can be snapshot-tested without a network.
"""

from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Literal, Mapping, Sequence, Tuple, get_args
import base64
import io
import json

from PIL import Image

from ..errors import PayloadTooLarge, ResponseFormatError
from ..raster import ImageBuffer
from .base import Completion

ProfileName = Literal["openai-chat", "anthropic-messages", "gemini-generate", "openai-responses"]
PROFILE_NAMES: Tuple[str, ...] = get_args(ProfileName)

MB = 1024 * 1024


@dataclass(frozen=True)
class ProviderProfile:
    """Endpoint, credentials and limits of one API family.

    Attributes:
        name: Profile id
        base_url: Scheme and host
        path: Request path; ``{model}`` is substituted
        key_env: Environment variable holding the API key
        max_image_bytes: Largest accepted base64 payload per image
    """

    name: ProfileName
    base_url: str
    path: str
    key_env: str
    max_image_bytes: int

    def url(self, model: str) -> str:
        return self.base_url + self.path.format(model=model)

    def headers(self, api_key: str) -> Dict[str, str]:
        headers = {"content-type": "application/json"}
        if self.name == "anthropic-messages":
            headers["x-api-key"] = api_key
            headers["anthropic-version"] = "2023-06-01"
        elif self.name == "gemini-generate":
            headers["x-goog-api-key"] = api_key
        else:
            headers["authorization"] = f"Bearer {api_key}"
        return headers


PROFILES: Dict[str, ProviderProfile] = {
    "openai-chat": ProviderProfile(
        "openai-chat", "https://api.openai.com", "/v1/chat/completions",
        "CHAINLENS_OPENAI_KEY", 20 * MB,
    ),
    "anthropic-messages": ProviderProfile(
        "anthropic-messages", "https://api.anthropic.com", "/v1/messages",
        "CHAINLENS_ANTHROPIC_KEY", 5 * MB,
    ),
    "gemini-generate": ProviderProfile(
        "gemini-generate", "https://generativelanguage.googleapis.com",
        "/v1beta/models/{model}:generateContent", "CHAINLENS_GEMINI_KEY", 20 * MB,
    ),
    "openai-responses": ProviderProfile(
        "openai-responses", "https://api.openai.com", "/v1/responses",
        "CHAINLENS_OPENAI_KEY", 20 * MB,
    ),
}


def get_profile(name: str) -> ProviderProfile:
    try:
        return PROFILES[name]
    except KeyError:
        raise ValueError(
            f"Unknown provider profile '{name}' (expected one of {PROFILE_NAMES})"
        ) from None


def encode_png(image: ImageBuffer) -> bytes:
    buffer = io.BytesIO()
    Image.fromarray(image.to_array()).save(buffer, format="PNG")
    return buffer.getvalue()


def encode_image(image: ImageBuffer, profile: ProviderProfile) -> str:
    """Base64 PNG payload.

    Raises:
        PayloadTooLarge: If the encoded image exceeds the profile limit
    """
    data = base64.b64encode(encode_png(image)).decode("ascii")
    if len(data) > profile.max_image_bytes:
        raise PayloadTooLarge(
            f"Encoded image of {len(data)} bytes exceeds the {profile.name} limit "
            f"of {profile.max_image_bytes}"
        )
    return data


def _openai_chat(prompt: str, images: List[str], model: str, max_tokens: int) -> Dict[str, Any]:
    content: List[Dict[str, Any]] = [
        {"type": "image_url", "image_url": {"url": f"data:image/png;base64,{data}"}}
        for data in images
    ]
    content.append({"type": "text", "text": prompt})
    return {
        "model": model,
        "messages": [{"role": "user", "content": content}],
        "temperature": 0,
        "max_tokens": max_tokens,
    }


def _anthropic(prompt: str, images: List[str], model: str, max_tokens: int) -> Dict[str, Any]:
    content: List[Dict[str, Any]] = [
        {"type": "image", "source": {"type": "base64", "media_type": "image/png", "data": data}}
        for data in images
    ]
    content.append({"type": "text", "text": prompt})
    return {
        "model": model,
        "max_tokens": max_tokens,
        "temperature": 0,
        "messages": [{"role": "user", "content": content}],
    }


def _gemini(prompt: str, images: List[str], model: str, max_tokens: int) -> Dict[str, Any]:
    parts: List[Dict[str, Any]] = [
        {"inline_data": {"mime_type": "image/png", "data": data}} for data in images
    ]
    parts.append({"text": prompt})
    return {
        "contents": [{"role": "user", "parts": parts}],
        "generationConfig": {"temperature": 0, "maxOutputTokens": max_tokens},
    }


def _openai_responses(
    prompt: str, images: List[str], model: str, max_tokens: int
) -> Dict[str, Any]:
    content: List[Dict[str, Any]] = [
        {"type": "input_image", "image_url": f"data:image/png;base64,{data}"} for data in images
    ]
    content.append({"type": "input_text", "text": prompt})
    return {
        "model": model,
        "input": [{"role": "user", "content": content}],
        "temperature": 0,
        "max_output_tokens": max_tokens,
    }


_BODY_BUILDERS: Mapping[str, Callable[[str, List[str], str, int], Dict[str, Any]]] = {
    "openai-chat": _openai_chat,
    "anthropic-messages": _anthropic,
    "gemini-generate": _gemini,
    "openai-responses": _openai_responses,
}


def build_request(
    prompt: str,
    images: Sequence[ImageBuffer],
    profile: ProviderProfile,
    model: str,
    max_tokens: int = 256,
) -> bytes:
    """Request body bytes: images first, then the prompt text; temperature 0.

    Raises:
        PayloadTooLarge: If any image exceeds the provider limit
    """
    if max_tokens < 1:
        raise ValueError(f"max_tokens must be positive (got {max_tokens})")
    encoded = [encode_image(image, profile) for image in images]
    body = _BODY_BUILDERS[profile.name](prompt, encoded, model, max_tokens)
    return json.dumps(body, separators=(",", ":")).encode("utf-8")


def _walk(document: Any, path: Sequence[Any]) -> Any:
    """Follow keys and indices; raise ResponseFormatError naming the first missing step."""
    node = document
    trail = "$"
    for step in path:
        trail += f"[{step}]" if isinstance(step, int) else f".{step}"
        try:
            node = node[step]
        except (KeyError, IndexError, TypeError):
            raise ResponseFormatError(trail) from None
    return node


def _text(value: Any, trail: str) -> str:
    if not isinstance(value, str):
        raise ResponseFormatError(trail, f"expected a string, got {type(value).__name__}")
    return value


def _tokens(document: Any, path: Sequence[Any]) -> int:
    value = _walk(document, path)
    if not isinstance(value, int) or value < 0:
        raise ResponseFormatError("$." + ".".join(map(str, path)), "expected a token count")
    return value


def parse_response(raw: bytes, profile: ProviderProfile) -> Completion:
    """Reply text and token usage from a response body.

    Raises:
        ResponseFormatError: If the body is not JSON or lacks a required field; the
            error's ``path`` names the field
    """
    try:
        document = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise ResponseFormatError("$", f"body is not JSON ({e})") from None

    if profile.name == "openai-chat":
        text = _text(_walk(document, ["choices", 0, "message", "content"]),
                     "$.choices[0].message.content")
        usage = (["usage", "prompt_tokens"], ["usage", "completion_tokens"])
    elif profile.name == "anthropic-messages":
        blocks = _walk(document, ["content"])
        texts = [b.get("text") for b in blocks if isinstance(b, dict) and b.get("type") == "text"]
        if not texts:
            raise ResponseFormatError("$.content[*].text")
        text = _text(texts[0], "$.content[*].text")
        usage = (["usage", "input_tokens"], ["usage", "output_tokens"])
    elif profile.name == "gemini-generate":
        text = _text(_walk(document, ["candidates", 0, "content", "parts", 0, "text"]),
                     "$.candidates[0].content.parts[0].text")
        usage = (["usageMetadata", "promptTokenCount"], ["usageMetadata", "candidatesTokenCount"])
    else:
        outputs = _walk(document, ["output"])
        texts = [
            part.get("text")
            for item in outputs
            if isinstance(item, dict) and item.get("type") == "message"
            for part in item.get("content", [])
            if isinstance(part, dict) and part.get("type") == "output_text"
        ]
        if not texts:
            raise ResponseFormatError("$.output[*].content[*].text")
        text = _text(texts[0], "$.output[*].content[*].text")
        usage = (["usage", "input_tokens"], ["usage", "output_tokens"])

    return Completion(
        text=text,
        input_tokens=_tokens(document, usage[0]),
        output_tokens=_tokens(document, usage[1]),
    )
