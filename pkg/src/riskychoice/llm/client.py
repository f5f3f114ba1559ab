"""Chat-completion transport: providers, retries, rate limiting and a disk cache."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import random
import re
import threading
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Optional, Protocol, Sequence, Union

import httpx

logger = logging.getLogger(__name__)

DEFAULT_ENDPOINT = "https://api.openai.com/v1"
DEFAULT_KEY_ENV = "OPENAI_API_KEY"
MAX_ATTEMPTS = 5


class LLMError(RuntimeError):
    pass


class ProviderFailure(LLMError):
    """The provider could not produce a response (retries exhausted or fatal error)."""


class AuthMissing(LLMError):
    pass


class TransientError(LLMError):
    """Retryable transport or server-side failure."""


class CacheCorrupt(LLMError):
    pass


@dataclass(frozen=True)
class CompletionRequest:
    model_id: str
    user_text: str
    system_text: Optional[str] = None
    temperature: float = 0.0
    seed: Optional[int] = None
    max_output_chars: int = 20_000

    def __post_init__(self):
        if not self.user_text:
            raise ValueError("user_text must be non-empty")
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")
        if self.max_output_chars < 1:
            raise ValueError("max_output_chars must be positive")

    def cache_key(self) -> str:
        payload = json.dumps(
            [self.model_id, self.system_text, self.user_text, float(self.temperature), self.seed],
            ensure_ascii=False,
            separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def messages(self) -> list[dict]:
        msgs = []
        if self.system_text:
            msgs.append({"role": "system", "content": self.system_text})
        msgs.append({"role": "user", "content": self.user_text})
        return msgs


class Provider(Protocol):
    def send(self, req: CompletionRequest) -> str: ...


# ---------------------------------------------------------------------------
# Providers
# ---------------------------------------------------------------------------


class OpenAICompatibleProvider:
    """POSTs to ``{endpoint}/chat/completions`` using the common JSON schema.

    Request body: ``model``, ``messages`` (role/content), ``temperature`` and,
    when set, ``seed``. The reply text is read from
    ``choices[0].message.content``.
    """

    def __init__(
        self,
        endpoint: str = DEFAULT_ENDPOINT,
        api_key_env: str = DEFAULT_KEY_ENV,
        timeout: float = 120.0,
        transport: Optional[httpx.BaseTransport] = None,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.api_key_env = api_key_env
        self.timeout = timeout
        self._transport = transport

    def _headers(self) -> dict:
        key = os.environ.get(self.api_key_env, "").strip()
        if not key:
            raise AuthMissing(f"environment variable {self.api_key_env} is not set")
        return {"Authorization": f"Bearer {key}", "Content-Type": "application/json"}

    def _post(self, path: str, body: dict) -> dict:
        headers = self._headers()
        try:
            with httpx.Client(timeout=self.timeout, transport=self._transport) as http:
                resp = http.post(f"{self.endpoint}{path}", json=body, headers=headers)
        except httpx.TransportError as exc:
            raise TransientError(f"transport error: {exc}") from exc
        if resp.status_code == 429 or resp.status_code >= 500:
            raise TransientError(f"HTTP {resp.status_code}: {resp.text[:200]}")
        if resp.status_code >= 400:
            raise ProviderFailure(f"HTTP {resp.status_code}: {resp.text[:500]}")
        try:
            return resp.json()
        except ValueError as exc:
            raise TransientError("response body is not JSON") from exc

    def send(self, req: CompletionRequest) -> str:
        body = {"model": req.model_id, "messages": req.messages(), "temperature": req.temperature}
        if req.seed is not None:
            body["seed"] = req.seed
        data = self._post("/chat/completions", body)
        try:
            text = data["choices"][0]["message"]["content"] or ""
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderFailure(f"unexpected response shape: {str(data)[:200]}") from exc
        return text[: req.max_output_chars]

    def embed(self, texts: Sequence[str], model_id: str) -> list[list[float]]:
        data = self._post("/embeddings", {"model": model_id, "input": list(texts)})
        try:
            rows = sorted(data["data"], key=lambda r: r["index"])
            return [list(map(float, r["embedding"])) for r in rows]
        except (KeyError, TypeError) as exc:
            raise ProviderFailure("unexpected embeddings response shape") from exc


_PROBLEM_ID = re.compile(r"^Problem ID: (.+)$", re.MULTILINE)


class MockProvider:
    """Deterministic offline provider.

    ``replies`` may be a list consumed in order (an Exception instance in the
    list is raised instead of returned) or a callable ``req -> str``. Without
    replies, answers are derived from a hash of the request so that the same
    request always yields the same text, and subject and feature prompts get
    well-formed answers.
    """

    def __init__(self, replies: Union[None, Sequence, Callable[[CompletionRequest], str]] = None):
        self._replies = list(replies) if isinstance(replies, (list, tuple)) else replies
        self._lock = threading.Lock()
        self.calls: list[CompletionRequest] = []

    @property
    def n_calls(self) -> int:
        return len(self.calls)

    def send(self, req: CompletionRequest) -> str:
        with self._lock:
            idx = len(self.calls)
            self.calls.append(req)
        if callable(self._replies):
            return self._replies(req)
        if self._replies is not None:
            if not self._replies:
                raise ProviderFailure("mock script exhausted")
            # past the end of the script the last reply repeats
            reply = self._replies[min(idx, len(self._replies) - 1)]
            if isinstance(reply, BaseException):
                raise reply
            return reply
        return simulated_reply(req)

    def embed(self, texts: Sequence[str], model_id: str, dim: int = 16) -> list[list[float]]:
        out = []
        for t in texts:
            rng = random.Random(hashlib.sha256(f"{model_id}|{t}".encode()).digest())
            out.append([rng.gauss(0.0, 1.0) for _ in range(dim)])
        return out


def _request_rng(req: CompletionRequest) -> random.Random:
    return random.Random(hashlib.sha256(req.cache_key().encode()).digest())


def simulated_reply(req: CompletionRequest) -> str:
    """A plausible, deterministic answer for the prompt families in this package."""
    from .parsing import format_subject_response

    rng = _request_rng(req)
    text = req.user_text
    ids = _PROBLEM_ID.findall(text)
    if ids:
        if "(Problem ID, Choice, Confidence)" in text:
            rows = [(i, rng.choice("AB"), rng.randint(50, 100)) for i in ids]
            return format_subject_response("confidence", rows)
        if "(Problem ID, Preference)" in text:
            return format_subject_response("percentage", [(i, rng.randint(0, 100)) for i in ids])
        return format_subject_response("binary", [(i, rng.choice("AB")) for i in ids])
    if text.startswith("Estimate the percentage"):
        return str(rng.randint(0, 100))
    return rng.choice(["Option A", "Option B", "It is too hard to tell."])


# ---------------------------------------------------------------------------
# Retry, rate limiting, cache
# ---------------------------------------------------------------------------


class RateLimiter:
    """Token bucket allowing ``per_minute`` requests per minute with a burst of ``burst``."""

    def __init__(self, per_minute: float, burst: Optional[int] = None, clock=time.monotonic, sleep=time.sleep):
        if per_minute <= 0:
            raise ValueError("per_minute must be positive")
        self.rate = per_minute / 60.0
        self.capacity = float(burst if burst is not None else max(1, int(per_minute // 60) or 1))
        self._tokens = self.capacity
        self._clock = clock
        self._sleep = sleep
        self._last = clock()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self._clock()
                self._tokens = min(self.capacity, self._tokens + (now - self._last) * self.rate)
                self._last = now
                if self._tokens >= 1.0:
                    self._tokens -= 1.0
                    return
                wait = (1.0 - self._tokens) / self.rate
            self._sleep(wait)


def complete(
    req: CompletionRequest,
    provider: Provider,
    *,
    max_attempts: int = MAX_ATTEMPTS,
    base_delay: float = 1.0,
    sleep: Callable[[float], None] = time.sleep,
    rate_limiter: Optional[RateLimiter] = None,
) -> str:
    """Send ``req``, retrying transient failures with exponential backoff."""
    last: Optional[Exception] = None
    for attempt in range(max_attempts):
        if rate_limiter is not None:
            rate_limiter.acquire()
        try:
            return provider.send(req)
        except TransientError as exc:
            last = exc
            if attempt + 1 < max_attempts:
                delay = base_delay * (2**attempt)
                logger.warning("attempt %d/%d failed (%s); retrying in %.1fs", attempt + 1, max_attempts, exc, delay)
                sleep(delay)
    raise ProviderFailure(f"gave up after {max_attempts} attempts: {last}") from last


class DiskCache:
    """One JSON file per request hash holding the key, a timestamp and the raw text."""

    def __init__(self, directory: Union[str, Path]):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self._write_lock = threading.Lock()

    def path(self, key: str) -> Path:
        return self.dir / f"{key}.json"

    def get(self, key: str) -> Optional[str]:
        p = self.path(key)
        if not p.exists():
            return None
        try:
            entry = json.loads(p.read_text(encoding="utf-8"))
            if entry.get("key") != key or not isinstance(entry.get("response"), str):
                raise CacheCorrupt(f"bad entry in {p}")
            return entry["response"]
        except (OSError, ValueError, CacheCorrupt) as exc:
            logger.warning("cache entry %s unreadable, treating as miss: %s", p.name, exc)
            return None

    def put(self, key: str, text: str, request: Optional[dict] = None) -> None:
        entry = {"key": key, "timestamp": time.time(), "request": request, "response": text}
        tmp = self.path(key).with_suffix(f".{threading.get_ident()}.tmp")
        with self._write_lock:
            tmp.write_text(json.dumps(entry, ensure_ascii=False), encoding="utf-8")
            os.replace(tmp, self.path(key))


def cached_complete(
    req: CompletionRequest,
    provider: Provider,
    cache: Union[DiskCache, str, Path, None],
    **retry_kwargs,
) -> str:
    if cache is None:
        return complete(req, provider, **retry_kwargs)
    if not isinstance(cache, DiskCache):
        cache = DiskCache(cache)
    key = req.cache_key()
    hit = cache.get(key)
    if hit is not None:
        return hit
    text = complete(req, provider, **retry_kwargs)
    cache.put(key, text, asdict(req))
    return text


@dataclass
class LLMClient:
    """Provider plus the settings every prompt-based method shares."""

    provider: Provider
    model_id: str = "gpt-4o"
    temperature: float = 0.0
    cache: Optional[DiskCache] = None
    rate_limiter: Optional[RateLimiter] = None
    parallelism: int = 1
    max_attempts: int = MAX_ATTEMPTS
    base_delay: float = 1.0

    def complete(
        self,
        user_text: str,
        *,
        system_text: Optional[str] = None,
        temperature: Optional[float] = None,
        seed: Optional[int] = None,
    ) -> str:
        req = CompletionRequest(
            model_id=self.model_id,
            user_text=user_text,
            system_text=system_text,
            temperature=self.temperature if temperature is None else temperature,
            seed=seed,
        )
        return cached_complete(
            req,
            self.provider,
            self.cache,
            max_attempts=self.max_attempts,
            base_delay=self.base_delay,
            rate_limiter=self.rate_limiter,
        )


def make_provider(kind: str, *, endpoint: str = DEFAULT_ENDPOINT, api_key_env: str = DEFAULT_KEY_ENV) -> Provider:
    if kind == "mock":
        return MockProvider()
    if kind in ("openai", "remote", "http"):
        return OpenAICompatibleProvider(endpoint, api_key_env)
    raise ValueError(f"unknown provider kind {kind!r}")
