"""Chat-completion backends: live HTTP, scripted fixtures, record/replay cache.

All simulation and judge calls go through the one Backend interface so a run
can be wired to a real OpenAI-compatible endpoint, to deterministic fixtures,
or to a disk cache, without the callers knowing which.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol, Sequence

import httpx

from .errors import BackendError, CacheMissError, FixtureMissError

SIM_TEMPERATURE = 0.7
JUDGE_TEMPERATURE = 0.0

LIVE_TIMEOUT_SECONDS = 60.0
LIVE_MAX_ATTEMPTS = 5
_BACKOFF_BASE_SECONDS = 0.5

Message = dict[str, str]  # {"role": ..., "content": ...}


@dataclass(frozen=True)
class CompletionRequest:
    messages: tuple[Message, ...]
    temperature: float
    max_tokens: int = 1024
    tag: str = ""  # "op:agent_id:tick" convention, for transcripts and caches

    def text(self) -> str:
        return "\n".join(m.get("content", "") for m in self.messages)


@dataclass(frozen=True)
class TranscriptEntry:
    tag: str
    request_hash: str
    response_chars: int


def request_hash(model: str, messages: Sequence[Message], temperature: float) -> str:
    payload = json.dumps(
        {"model": model, "messages": list(messages), "temperature": temperature},
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=False,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class Backend(Protocol):
    kind: str
    model_name: str

    def complete(self, request: CompletionRequest) -> str: ...

    def transcript(self) -> list[TranscriptEntry]: ...

    def add_listener(self, listener: Callable[[TranscriptEntry], None]) -> None: ...


class _BackendBase:
    kind = "base"
    model_name = "none"

    def __init__(self) -> None:
        self._transcript: list[TranscriptEntry] = []
        self._listeners: list[Callable[[TranscriptEntry], None]] = []

    def transcript(self) -> list[TranscriptEntry]:
        return list(self._transcript)

    def add_listener(self, listener: Callable[[TranscriptEntry], None]) -> None:
        if listener not in self._listeners:  # minds may share one backend
            self._listeners.append(listener)

    def _record(self, request: CompletionRequest, response: str) -> None:
        entry = TranscriptEntry(
            tag=request.tag,
            request_hash=request_hash(self.model_name, request.messages, request.temperature),
            response_chars=len(response),
        )
        self._transcript.append(entry)
        for listener in self._listeners:
            listener(entry)


class LiveBackend(_BackendBase):
    """OpenAI-compatible /chat/completions client.

    The API key is read from the named environment variable at call time and
    never stored on the object, in transcripts, or in caches.
    """

    kind = "live"

    def __init__(
        self,
        *,
        base_url: str,
        model: str,
        key_env_var: str = "OPENAI_API_KEY",
        timeout: float = LIVE_TIMEOUT_SECONDS,
        max_attempts: int = LIVE_MAX_ATTEMPTS,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
        rng: random.Random | None = None,
    ) -> None:
        super().__init__()
        self.model_name = model
        self._base_url = base_url.rstrip("/")
        self._key_env_var = key_env_var
        self._max_attempts = max_attempts
        self._sleep = sleep
        self._rng = rng or random.Random()
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def complete(self, request: CompletionRequest) -> str:
        key = os.environ.get(self._key_env_var)
        if not key:
            raise BackendError(f"environment variable {self._key_env_var} is not set")
        body = {
            "model": self.model_name,
            "messages": list(request.messages),
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        last_error = "no attempts made"
        for attempt in range(self._max_attempts):
            if attempt:
                # Exponential backoff with jitter; only retryable failures get here.
                delay = _BACKOFF_BASE_SECONDS * (2 ** (attempt - 1))
                self._sleep(delay + self._rng.uniform(0, _BACKOFF_BASE_SECONDS))
            try:
                response = self._client.post(
                    f"{self._base_url}/chat/completions",
                    json=body,
                    headers={"Authorization": f"Bearer {key}"},
                )
            except httpx.TimeoutException as exc:
                last_error = f"timeout: {exc}"
                continue
            except httpx.HTTPError as exc:
                last_error = f"transport error: {exc}"
                continue
            if response.status_code == 429 or response.status_code >= 500:
                last_error = f"HTTP {response.status_code}"
                continue
            if response.status_code != 200:
                raise BackendError(f"HTTP {response.status_code}: {response.text[:300]}")
            try:
                text = response.json()["choices"][0]["message"]["content"]
            except (KeyError, IndexError, ValueError) as exc:
                raise BackendError(f"malformed completion response: {exc}") from exc
            self._record(request, text)
            return text
        raise BackendError(f"gave up after {self._max_attempts} attempts ({last_error})")


@dataclass
class Fixture:
    """Canned response matched by tag prefix and/or content substring.

    ``response`` may be a string (repeats forever), a sequence (consumed in
    order; an exhausted fixture stops matching), or a deterministic callable.
    """

    tag_prefix: str | None = None
    content_substring: str | None = None
    response: str | Sequence[str] | Callable[[CompletionRequest], str] = ""
    _cursor: int = field(default=0, repr=False)

    def matches(self, request: CompletionRequest) -> bool:
        if self.tag_prefix is not None and not request.tag.startswith(self.tag_prefix):
            return False
        if self.content_substring is not None and self.content_substring not in request.text():
            return False
        if isinstance(self.response, (list, tuple)) and self._cursor >= len(self.response):
            return False
        return True

    def render(self, request: CompletionRequest) -> str:
        if callable(self.response):
            return self.response(request)
        if isinstance(self.response, (list, tuple)):
            text = self.response[self._cursor]
            self._cursor += 1
            return text
        return self.response


class ScriptedBackend(_BackendBase):
    """Replays fixtures; raises FixtureMissError when nothing matches."""

    kind = "scripted"
    model_name = "scripted"

    def __init__(self, fixtures: Sequence[Fixture]) -> None:
        super().__init__()
        self._fixtures = list(fixtures)

    def complete(self, request: CompletionRequest) -> str:
        for fixture in self._fixtures:
            if fixture.matches(request):
                text = fixture.render(request)
                self._record(request, text)
                return text
        raise FixtureMissError(f"no fixture for tag={request.tag!r}")


class RecordReplayBackend(_BackendBase):
    """Disk cache keyed by (model, messages, temperature).

    record mode: delegate to the inner backend and persist each response as
    one file named by the request hash. replay mode: serve from disk only —
    a miss raises CacheMissError and no network I/O can happen.
    """

    def __init__(
        self,
        *,
        cache_dir: str | Path,
        mode: str,
        inner: Backend | None = None,
        model: str | None = None,
    ) -> None:
        super().__init__()
        if mode not in ("record", "replay"):
            raise ValueError(f"mode must be record|replay, got {mode!r}")
        if mode == "record" and inner is None:
            raise ValueError("record mode requires an inner backend")
        self._mode = mode
        self._inner = inner
        self._cache_dir = Path(cache_dir)
        self.model_name = model or (inner.model_name if inner else "scripted")
        self.kind = f"{mode}:{inner.kind if inner else self.model_name}"

    def _path_for(self, request: CompletionRequest) -> Path:
        key = request_hash(self.model_name, request.messages, request.temperature)
        return self._cache_dir / f"{key}.txt"

    def complete(self, request: CompletionRequest) -> str:
        path = self._path_for(request)
        if path.exists():
            text = path.read_text(encoding="utf-8")
            self._record(request, text)
            return text
        if self._mode == "replay":
            raise CacheMissError(f"no cached response for tag={request.tag!r} ({path.name})")
        assert self._inner is not None
        text = self._inner.complete(request)
        self._cache_dir.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        self._record(request, text)
        return text


def corrective_retry(
    backend: Backend,
    request: CompletionRequest,
    parse: Callable[[str], object],
    *,
    attempts: int = 3,
):
    """Call, parse, and on parse failure retry with a corrective follow-up.

    Returns the parsed value; after ``attempts`` total failures re-raises the
    last parse error. Backend errors propagate immediately.
    """
    messages = list(request.messages)
    last_exc: Exception | None = None
    for _ in range(attempts):
        attempt_request = CompletionRequest(
            messages=tuple(messages),
            temperature=request.temperature,
            max_tokens=request.max_tokens,
            tag=request.tag,
        )
        text = backend.complete(attempt_request)
        try:
            return parse(text)
        except ValueError as exc:
            last_exc = exc
            messages.append({"role": "assistant", "content": text})
            messages.append(
                {
                    "role": "user",
                    "content": "Your previous reply could not be parsed. "
                    "Answer again following the required format exactly.",
                }
            )
    assert last_exc is not None
    raise last_exc
