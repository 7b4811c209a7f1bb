"""Text-completion contract with scripted mocks and an HTTP client.

All model access in the package flows through :class:`CompletionClient`.
The HTTP client speaks the de-facto completions wire shape::

    POST {endpoint}  {"model", "prompt", "max_tokens", "temperature"}
    -> {"choices": [{"text": "..."}]}

Mocks are deterministic: scripted replies are keyed by prompt hash or
consumed in sequence, and transcripts (JSON lines of
``{"prompt_sha256", "reply"}``) replay byte-identically.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Protocol

import requests

DEFAULT_MODEL = "gpt-3.5-turbo-instruct"


class FailureKind(Enum):
    TRANSPORT = "transport"
    RATE_LIMIT = "rate-limit"
    MALFORMED_RESPONSE = "malformed-response"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    model: str = DEFAULT_MODEL
    max_tokens: int = 256
    temperature: float = 0.0

    def __post_init__(self) -> None:
        if not self.prompt:
            raise ValueError("prompt must be non-empty")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")


@dataclass(frozen=True)
class CompletionOutcome:
    """Either a reply or a failure kind; never both, never neither."""

    reply: str | None = None
    failure: FailureKind | None = None

    def __post_init__(self) -> None:
        if (self.reply is None) == (self.failure is None):
            raise ValueError("exactly one of reply/failure must be set")


class CompletionClient(Protocol):
    def complete(self, request: CompletionRequest) -> CompletionOutcome: ...


def prompt_sha256(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class MockCompletionClient:
    """Deterministic scripted client for tests and offline runs.

    Replies are looked up by prompt hash first; if absent, the next
    sequential reply is consumed. A prompt with neither source yields a
    malformed-response failure.
    """

    def __init__(
        self,
        script: dict[str, str] | None = None,
        sequence: Iterable[str] | None = None,
    ):
        self.script = dict(script or {})
        self._sequence = list(sequence or [])
        self._cursor = 0
        self._lock = threading.Lock()

    @classmethod
    def scripted(cls, prompts_to_replies: dict[str, str]) -> MockCompletionClient:
        """Build a hash-keyed mock from plain prompt -> reply pairs."""
        return cls(script={prompt_sha256(p): r for p, r in prompts_to_replies.items()})

    def complete(self, request: CompletionRequest) -> CompletionOutcome:
        key = prompt_sha256(request.prompt)
        with self._lock:
            if key in self.script:
                return CompletionOutcome(reply=self.script[key])
            if self._cursor < len(self._sequence):
                reply = self._sequence[self._cursor]
                self._cursor += 1
                return CompletionOutcome(reply=reply)
        return CompletionOutcome(failure=FailureKind.MALFORMED_RESPONSE)


class RecordingClient:
    """Wraps a client and appends successful replies to a transcript."""

    def __init__(self, inner: CompletionClient):
        self.inner = inner
        self.entries: list[dict[str, str]] = []
        self._lock = threading.Lock()

    def complete(self, request: CompletionRequest) -> CompletionOutcome:
        outcome = self.inner.complete(request)
        if outcome.reply is not None:
            with self._lock:
                self.entries.append(
                    {"prompt_sha256": prompt_sha256(request.prompt), "reply": outcome.reply}
                )
        return outcome

    def save(self, path: str | Path) -> None:
        save_transcript(self.entries, path)


def save_transcript(entries: list[dict[str, str]], path: str | Path) -> None:
    lines = [json.dumps(e, ensure_ascii=False) for e in entries]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def load_transcript(path: str | Path) -> dict[str, str]:
    """Read a transcript file into a prompt-hash keyed script."""
    script: dict[str, str] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        entry = json.loads(line)
        script[entry["prompt_sha256"]] = entry["reply"]
    return script


def replay_client(path: str | Path) -> MockCompletionClient:
    return MockCompletionClient(script=load_transcript(path))


class HttpCompletionClient:
    """Client for an OpenAI-compatible completions endpoint.

    Transient failures (transport errors, timeouts, 429, 5xx) are retried
    with exponential backoff up to ``retries`` additional attempts. An
    optional semaphore bounds in-flight requests.
    """

    def __init__(
        self,
        endpoint: str,
        api_key: str = "",
        *,
        timeout: float = 30.0,
        retries: int = 3,
        backoff: float = 0.5,
        max_in_flight: int = 8,
        sleep: Callable[[float], None] = time.sleep,
        session: requests.Session | None = None,
    ):
        self.endpoint = endpoint
        self.api_key = api_key
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self._gate = threading.Semaphore(max_in_flight)
        self._sleep = sleep
        self._session = session or requests.Session()

    def _attempt(self, request: CompletionRequest) -> CompletionOutcome:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {
            "model": request.model,
            "prompt": request.prompt,
            "max_tokens": request.max_tokens,
            "temperature": request.temperature,
        }
        try:
            response = self._session.post(
                self.endpoint, json=body, headers=headers, timeout=self.timeout
            )
        except requests.Timeout:
            return CompletionOutcome(failure=FailureKind.TIMEOUT)
        except requests.RequestException:
            return CompletionOutcome(failure=FailureKind.TRANSPORT)
        if response.status_code == 429:
            return CompletionOutcome(failure=FailureKind.RATE_LIMIT)
        if response.status_code >= 500:
            return CompletionOutcome(failure=FailureKind.TRANSPORT)
        try:
            payload = response.json()
            text = payload["choices"][0]["text"]
        except (ValueError, KeyError, IndexError, TypeError):
            return CompletionOutcome(failure=FailureKind.MALFORMED_RESPONSE)
        if not isinstance(text, str):
            return CompletionOutcome(failure=FailureKind.MALFORMED_RESPONSE)
        return CompletionOutcome(reply=text)

    def complete(self, request: CompletionRequest) -> CompletionOutcome:
        retriable = {FailureKind.TRANSPORT, FailureKind.TIMEOUT, FailureKind.RATE_LIMIT}
        with self._gate:
            outcome = self._attempt(request)
            attempt = 0
            while outcome.failure in retriable and attempt < self.retries:
                self._sleep(self.backoff * (2**attempt))
                outcome = self._attempt(request)
                attempt += 1
        return outcome


def client_from_env(env: dict[str, str] | None = None) -> HttpCompletionClient | None:
    """Build an HTTP client from CPG_LLM_* variables, or None when unset."""
    source = env if env is not None else os.environ
    endpoint = source.get("CPG_LLM_ENDPOINT", "")
    if not endpoint:
        return None
    return HttpCompletionClient(endpoint=endpoint, api_key=source.get("CPG_LLM_KEY", ""))


def model_from_env(env: dict[str, str] | None = None) -> str:
    source = env if env is not None else os.environ
    return source.get("CPG_LLM_MODEL", DEFAULT_MODEL)
