"""Chat-completion backends.

``LiveBackend`` talks to any OpenAI-compatible ``/chat/completions``
endpoint. ``ReplayBackend`` serves responses from a fixture directory, one
``<fingerprint>.txt`` file per request, and never touches the network.
``RecordingBackend`` serves from fixtures when it can and otherwise calls
the live backend and stores what it got back.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol

import httpx

from cas.errors import FixtureMiss, MalformedResponse, NetworkError, RateLimited

log = logging.getLogger(__name__)

ENDPOINT_ENV = "CAS_LLM_ENDPOINT"
API_KEY_ENV = "CAS_LLM_API_KEY"


@dataclass(frozen=True)
class ChatRequest:
    user_text: str
    model_id: str
    system_text: str = ""
    temperature: float = 0.0
    max_tokens: int = 512

    def __post_init__(self):
        if not self.user_text:
            raise ValueError("user_text must be non-empty")
        if not 0.0 <= self.temperature <= 1.0:
            raise ValueError(f"temperature must be in [0, 1], got {self.temperature}")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be positive")

    def messages(self) -> list[dict]:
        msgs = []
        if self.system_text:
            msgs.append({"role": "system", "content": self.system_text})
        msgs.append({"role": "user", "content": self.user_text})
        return msgs


@dataclass(frozen=True)
class ChatResponse:
    text: str
    backend_id: str
    latency: float = 0.0


def fingerprint(req: ChatRequest) -> str:
    """Stable digest of everything that determines a response except max_tokens."""
    payload = json.dumps(
        {
            "model": req.model_id,
            "system": req.system_text,
            "user": req.user_text,
            "temperature": float(req.temperature),
        },
        sort_keys=True,
        ensure_ascii=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("ascii")).hexdigest()[:32]


class Backend(Protocol):
    backend_id: str

    def complete(self, req: ChatRequest) -> ChatResponse: ...


def complete(backend: Backend, req: ChatRequest) -> ChatResponse:
    return backend.complete(req)


class FixtureStore:
    """Directory of ``<fingerprint>.txt`` files holding raw response text."""

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def path(self, fp: str) -> Path:
        return self.root / f"{fp}.txt"

    def get(self, fp: str) -> str | None:
        p = self.path(fp)
        if not p.is_file():
            return None
        return p.read_text(encoding="utf-8")

    def put(self, fp: str, text: str) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=f".{fp}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            os.replace(tmp, self.path(fp))
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise

    def __contains__(self, fp: str) -> bool:
        return self.path(fp).is_file()

    def __len__(self) -> int:
        return sum(1 for _ in self.root.glob("*.txt"))


class ReplayBackend:
    def __init__(self, fixtures: str | Path | FixtureStore):
        self.store = fixtures if isinstance(fixtures, FixtureStore) else FixtureStore(fixtures)
        self.backend_id = f"replay:{self.store.root.name}"

    def complete(self, req: ChatRequest) -> ChatResponse:
        fp = fingerprint(req)
        text = self.store.get(fp)
        if text is None:
            raise FixtureMiss(fp, req.model_id)
        return ChatResponse(text, self.backend_id, 0.0)


class LiveBackend:
    """OpenAI-compatible chat-completions client with bounded retries."""

    RETRY_STATUS = {408, 409, 429, 500, 502, 503, 504}

    def __init__(
        self,
        endpoint: str | None = None,
        api_key: str | None = None,
        *,
        max_attempts: int = 3,
        backoff: float = 1.0,
        timeout: float = 60.0,
        max_in_flight: int = 4,
        client: httpx.Client | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        endpoint = endpoint or os.environ.get(ENDPOINT_ENV)
        if not endpoint:
            raise ValueError(f"no endpoint given and ${ENDPOINT_ENV} is unset")
        self.url = endpoint.rstrip("/")
        if not self.url.endswith("/chat/completions"):
            self.url += "/chat/completions"
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
        self.max_attempts = max_attempts
        self.backoff = backoff
        self.client = client or httpx.Client(timeout=timeout)
        self._slots = threading.BoundedSemaphore(max_in_flight)
        self._sleep = sleep
        self.backend_id = f"live:{self.url}"

    def _post(self, req: ChatRequest) -> httpx.Response:
        body = {
            "model": req.model_id,
            "messages": req.messages(),
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        }
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        with self._slots:
            return self.client.post(self.url, json=body, headers=headers)

    def complete(self, req: ChatRequest) -> ChatResponse:
        last: Exception | None = None
        for attempt in range(self.max_attempts):
            if attempt:
                delay = self.backoff * 2 ** (attempt - 1)
                log.warning("retrying %s in %.1fs (%s)", req.model_id, delay, last)
                self._sleep(delay)
            start = time.monotonic()
            try:
                resp = self._post(req)
            except httpx.TransportError as e:
                last = NetworkError(str(e))
                continue
            if resp.status_code == 429:
                last = RateLimited(f"HTTP 429 from {self.url}")
                continue
            if resp.status_code in self.RETRY_STATUS:
                last = NetworkError(f"HTTP {resp.status_code} from {self.url}")
                continue
            if resp.status_code >= 400:
                raise NetworkError(f"HTTP {resp.status_code} from {self.url}: {resp.text[:200]}")
            return ChatResponse(_extract_text(resp), self.backend_id, time.monotonic() - start)
        assert last is not None
        raise last


def _extract_text(resp: httpx.Response) -> str:
    try:
        data = resp.json()
        text = data["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as e:
        raise MalformedResponse(f"unexpected chat-completions body: {e}") from None
    if not isinstance(text, str):
        raise MalformedResponse("message content is not a string")
    return text


class RecordingBackend:
    """Replay when possible, otherwise call ``live`` and store the response."""

    def __init__(self, live: Backend, fixtures: str | Path | FixtureStore):
        self.live = live
        self.store = fixtures if isinstance(fixtures, FixtureStore) else FixtureStore(fixtures)
        self.backend_id = f"record:{self.store.root.name}"

    def complete(self, req: ChatRequest) -> ChatResponse:
        fp = fingerprint(req)
        text = self.store.get(fp)
        if text is not None:
            return ChatResponse(text, self.backend_id, 0.0)
        resp = self.live.complete(req)
        self.store.put(fp, resp.text)
        return resp
