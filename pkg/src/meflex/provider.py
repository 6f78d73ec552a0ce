"""Chat-completion providers: a live HTTP client and a scripted test double.

Both expose ``complete(bundle) -> CompletionResult``. The HTTP client targets
the common chat-completion JSON shape (``messages`` array of role/content
pairs) so any compatible endpoint works. Retry policy: transport errors,
HTTP 429 and 5xx are retried with exponential backoff; all other 4xx fail
immediately. The api_key is a secret: it must never surface in logs, error
messages, or serialized state.
"""
from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Optional, Protocol, Union

import httpx

from .errors import (
    AuthFailedError,
    MalformedResponseError,
    ProviderError,
    ProviderTimeoutError,
    RateLimitedError,
)

DEFAULT_TEMPERATURE = 0.7
DEFAULT_MAX_OUTPUT_TOKENS = 1024


@dataclass
class SamplingParams:
    """Decoding knobs sent with every completion request."""

    temperature: float = DEFAULT_TEMPERATURE
    max_output_tokens: int = DEFAULT_MAX_OUTPUT_TOKENS
    model: str = ""

    def __post_init__(self) -> None:
        if not 0 <= self.temperature <= 2:
            raise ValueError("temperature must be within [0, 2]")
        if self.max_output_tokens <= 0:
            raise ValueError("max_output_tokens must be positive")


@dataclass
class PromptBundle:
    """Everything one completion call needs: system prompt, prior turns,
    the new user message, and sampling parameters.

    History entries are (role, content) with roles "user"/"assistant";
    after any leading context entry the roles must alternate.
    """

    system: str
    history: list[tuple[str, str]]
    user: str
    sampling: SamplingParams = field(default_factory=SamplingParams)

    def __post_init__(self) -> None:
        if not self.system:
            raise ValueError("system prompt must be non-empty")
        if not self.user:
            raise ValueError("user message must be non-empty")
        for (prev, _), (cur, _) in zip(self.history, self.history[1:]):
            if prev == cur:
                raise ValueError("history roles must alternate")

    def messages(self) -> list[dict[str, str]]:
        """Flatten to the wire's messages array."""
        out = [{"role": "system", "content": self.system}]
        out.extend({"role": role, "content": content} for role, content in self.history)
        out.append({"role": "user", "content": self.user})
        return out


class FinishReason(Enum):
    STOP = "stop"
    LENGTH = "length"
    ERROR = "error"


@dataclass
class CompletionResult:
    content: str
    finish_reason: FinishReason
    usage: Optional[tuple[int, int]] = None  # (prompt_tokens, completion_tokens)

    def __post_init__(self) -> None:
        if self.finish_reason is FinishReason.STOP and not self.content:
            raise ValueError("a stop-finished completion must carry content")


class Provider(Protocol):
    def complete(self, bundle: PromptBundle) -> CompletionResult: ...


@dataclass
class ProviderConfig:
    base_url: str
    api_key: str = field(repr=False, default="")
    model: str = ""
    timeout: float = 30.0
    max_retries: int = 2
    backoff_base_ms: int = 250

    def __post_init__(self) -> None:
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if not 0 <= self.max_retries <= 5:
            raise ValueError("max_retries must be within [0, 5]")
        self.base_url = self.base_url.rstrip("/")

    @classmethod
    def from_env(cls, env: Optional[dict[str, str]] = None) -> "ProviderConfig":
        """Build from LLM_BASE_URL / LLM_API_KEY / LLM_MODEL."""
        src = os.environ if env is None else env
        base_url = src.get("LLM_BASE_URL", "")
        if not base_url:
            raise ValueError("LLM_BASE_URL is not set")
        return cls(
            base_url=base_url,
            api_key=src.get("LLM_API_KEY", ""),
            model=src.get("LLM_MODEL", ""),
        )


_RETRYABLE_STATUS = {429}


def _is_retryable(status: int) -> bool:
    return status in _RETRYABLE_STATUS or status >= 500


class HttpProvider:
    """Live chat-completion client with bounded exponential-backoff retries.

    ``sleep`` is injectable so tests can fast-forward the backoff.
    """

    def __init__(
        self,
        config: ProviderConfig,
        client: Optional[httpx.Client] = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.config = config
        self._client = client or httpx.Client(timeout=config.timeout)
        self._sleep = sleep

    def close(self) -> None:
        self._client.close()

    def complete(self, bundle: PromptBundle) -> CompletionResult:
        url = f"{self.config.base_url}/chat/completions"
        payload = {
            "model": bundle.sampling.model or self.config.model,
            "messages": bundle.messages(),
            "temperature": bundle.sampling.temperature,
            "max_tokens": bundle.sampling.max_output_tokens,
        }
        headers = {"Authorization": f"Bearer {self.config.api_key}"}

        attempts = 1 + self.config.max_retries
        last_failure = "no attempt made"
        for attempt in range(1, attempts + 1):
            try:
                response = self._client.post(url, json=payload, headers=headers)
            except httpx.TimeoutException:
                last_failure = "request timed out"
                if attempt < attempts:
                    self._backoff(attempt)
                    continue
                raise ProviderTimeoutError(
                    f"provider timed out after {attempt} attempts"
                ) from None
            except httpx.TransportError as exc:
                # exc carries no auth header; safe to surface its type
                last_failure = f"transport failure ({type(exc).__name__})"
                if attempt < attempts:
                    self._backoff(attempt)
                    continue
                raise ProviderError(
                    f"provider unreachable after {attempt} attempts: {last_failure}"
                ) from None

            status = response.status_code
            if status == 200:
                return self._parse(response)
            if status in (401, 403):
                raise AuthFailedError(f"provider rejected credentials (HTTP {status})")
            if _is_retryable(status):
                last_failure = f"HTTP {status}"
                if attempt < attempts:
                    self._backoff(attempt)
                    continue
                if status == 429:
                    raise RateLimitedError(f"rate limited after {attempt} attempts")
                raise ProviderError(f"provider error HTTP {status} after {attempt} attempts")
            # non-retryable 4xx
            raise ProviderError(f"provider rejected request (HTTP {status})")
        raise ProviderError(f"provider failed: {last_failure}")  # unreachable

    def _backoff(self, attempt: int) -> None:
        delay_ms = self.config.backoff_base_ms * (2 ** (attempt - 1))
        self._sleep(delay_ms / 1000.0)

    def _parse(self, response: httpx.Response) -> CompletionResult:
        try:
            body = response.json()
            choice = body["choices"][0]
            content = choice["message"]["content"]
        except (ValueError, LookupError, TypeError) as exc:
            raise MalformedResponseError(
                f"provider response missing expected fields ({type(exc).__name__})"
            ) from None
        if not isinstance(content, str) or content == "":
            raise MalformedResponseError("provider returned an empty completion")
        raw_reason = choice.get("finish_reason", "stop")
        reason = {
            "stop": FinishReason.STOP,
            "length": FinishReason.LENGTH,
        }.get(raw_reason, FinishReason.ERROR)
        usage = None
        usage_body = body.get("usage")
        if isinstance(usage_body, dict):
            try:
                usage = (
                    int(usage_body["prompt_tokens"]),
                    int(usage_body["completion_tokens"]),
                )
            except (KeyError, TypeError, ValueError):
                usage = None
        return CompletionResult(content=content, finish_reason=reason, usage=usage)


ScriptEntry = Union[str, Exception]


class ScriptedProvider:
    """Deterministic provider for tests: replays a fixed answer queue and
    records every outbound PromptBundle in ``calls``.

    Script entries may also be Exception instances, raised in order, to
    simulate provider failures mid-sequence. An exhausted script raises
    MalformedResponseError.
    """

    def __init__(self, script: list[ScriptEntry]):
        self._script = list(script)
        self._cursor = 0
        self._lock = threading.Lock()
        self.calls: list[PromptBundle] = []

    def complete(self, bundle: PromptBundle) -> CompletionResult:
        with self._lock:
            self.calls.append(bundle)
            if self._cursor >= len(self._script):
                raise MalformedResponseError("scripted provider: script exhausted")
            entry = self._script[self._cursor]
            self._cursor += 1
        if isinstance(entry, Exception):
            raise entry
        return CompletionResult(content=entry, finish_reason=FinishReason.STOP)

    @property
    def remaining(self) -> int:
        with self._lock:
            return len(self._script) - self._cursor


def scripted_provider(script: list[ScriptEntry]) -> ScriptedProvider:
    return ScriptedProvider(script)


def provider_from_env(env: Optional[dict[str, str]] = None) -> HttpProvider:
    """Convenience constructor used by the CLI."""
    return HttpProvider(ProviderConfig.from_env(env))


__all__ = [
    "CompletionResult",
    "DEFAULT_MAX_OUTPUT_TOKENS",
    "DEFAULT_TEMPERATURE",
    "FinishReason",
    "HttpProvider",
    "PromptBundle",
    "Provider",
    "ProviderConfig",
    "SamplingParams",
    "ScriptedProvider",
    "provider_from_env",
    "scripted_provider",
]
