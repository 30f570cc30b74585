"""Completion-provider gateway: caching, retries, and provider backends.

The gateway speaks a plain text-completion wire protocol: POST a JSON body
``{model, prompt, temperature, max_tokens}`` and read the completion text
back.  Identical requests are served from an LRU cache; transient provider
failures are retried with capped exponential backoff.  Auth failures are
terminal, as is a mock miss (retrying cannot fix either).
"""

from __future__ import annotations

import hashlib
import json
import logging
import random
import threading
import time
from collections import OrderedDict
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol

import httpx

from .errors import AuthError, ConfigError, MockMiss, ProviderError, ProviderTimeout
from .prompts import PromptKind

log = logging.getLogger(__name__)

#: the original completion model; long retired, so deployments override it
DEFAULT_MODEL = "text-davinci-002"
DEFAULT_TEMPERATURE = 0.7

#: response budget per prompt kind; attribute answers span the whole canvas
MAX_TOKENS = {
    PromptKind.CLASS: 8,
    PromptKind.ATTRIBUTE: 40,
    PromptKind.ATTRIBUTE_TYPE: 2,
    PromptKind.ASSOCIATION_TYPE: 2,
    PromptKind.ASSOCIATION_NAME: 2,
    PromptKind.INHERITANCE_DIRECTION: 2,
}


@dataclass(frozen=True)
class LlmParams:
    model_name: str = DEFAULT_MODEL
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = 16


def params_for(kind: PromptKind, model_name: str = DEFAULT_MODEL) -> LlmParams:
    return LlmParams(model_name, DEFAULT_TEMPERATURE, MAX_TOKENS[kind])


@dataclass(frozen=True)
class CompletionResponse:
    text: str
    cache_hit: bool = False
    attempts: int = 1


def cache_key(prompt: str, params: LlmParams) -> str:
    """Digest over everything that can change the completion."""
    blob = "\x1f".join(
        [params.model_name, repr(params.temperature), str(params.max_tokens), prompt]
    )
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class PromptCache:
    """Thread-safe LRU keyed by the full request digest."""

    def __init__(self, capacity: int = 1024):
        if capacity < 1:
            raise ConfigError("cache capacity must be positive")
        self.capacity = capacity
        self._entries: OrderedDict[str, str] = OrderedDict()
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, key: str) -> str | None:
        with self._lock:
            if key not in self._entries:
                return None
            self._entries.move_to_end(key)
            return self._entries[key]

    def put(self, key: str, text: str) -> None:
        with self._lock:
            self._entries[key] = text
            self._entries.move_to_end(key)
            while len(self._entries) > self.capacity:
                self._entries.popitem(last=False)


@dataclass(frozen=True)
class BackoffPolicy:
    """Capped exponential backoff with symmetric jitter."""

    base_delay: float = 1.0
    factor: float = 2.0
    max_attempts: int = 5
    max_delay: float = 32.0
    jitter_fraction: float = 0.1

    def delay(self, retry_index: int) -> float:
        return min(self.max_delay, self.base_delay * self.factor**retry_index)

    def jittered_delay(self, retry_index: int, rng: random.Random) -> float:
        base = self.delay(retry_index)
        if not self.jitter_fraction:
            return base
        spread = base * self.jitter_fraction
        return base + rng.uniform(-spread, spread)


class Provider(Protocol):
    def complete_text(self, prompt: str, params: LlmParams) -> str: ...


class HttpProvider:
    """Text-completion backend over HTTP."""

    def __init__(self, base_url: str, api_key: str | None = None, timeout: float = 30.0):
        if not base_url:
            raise ConfigError("provider base_url is required")
        self.base_url = base_url
        self.api_key = api_key
        self._client = httpx.Client(timeout=timeout)

    def complete_text(self, prompt: str, params: LlmParams) -> str:
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {
            "model": params.model_name,
            "prompt": prompt,
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
        }
        try:
            response = self._client.post(self.base_url, json=body, headers=headers)
        except httpx.TimeoutException as err:
            raise ProviderTimeout(f"provider timed out: {err}") from err
        except httpx.HTTPError as err:
            raise ProviderError(f"provider unreachable: {err}") from err

        if response.status_code in (401, 403):
            raise AuthError(f"provider rejected credentials ({response.status_code})")
        if response.status_code >= 400:
            raise ProviderError(f"provider returned {response.status_code}")
        try:
            payload = response.json()
        except json.JSONDecodeError as err:
            raise ProviderError("provider sent non-JSON body") from err
        if isinstance(payload, dict):
            if isinstance(payload.get("text"), str):
                return payload["text"]
            choices = payload.get("choices")
            if isinstance(choices, list) and choices and isinstance(choices[0], dict):
                text = choices[0].get("text")
                if isinstance(text, str):
                    return text
        raise ProviderError("provider response had no completion text")

    def close(self) -> None:
        self._client.close()


class FunctionProvider:
    """Wraps a plain callable; handy for scripted tests."""

    def __init__(self, fn: Callable[[str, LlmParams], str]):
        self._fn = fn

    def complete_text(self, prompt: str, params: LlmParams) -> str:
        return self._fn(prompt, params)


class MockProvider:
    """Deterministic provider answering only prompts it was scripted for.

    Fixture format: a JSON list of records with ``promptSha256``,
    ``promptText`` and ``responseText``.  Responses are matched on the
    exact prompt text; anything else raises MockMiss with a hint at the
    nearest scripted prompt.
    """

    def __init__(self, records: list[dict]):
        self._by_text: dict[str, str] = {}
        for record in records:
            text = record.get("promptText")
            response = record.get("responseText")
            if not isinstance(text, str) or not isinstance(response, str):
                raise ConfigError("mock fixture records need promptText and responseText")
            digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
            stated = record.get("promptSha256")
            if stated is not None and stated != digest:
                raise ConfigError(f"mock fixture sha mismatch for prompt {text[:40]!r}...")
            self._by_text[text] = response

    @classmethod
    def from_file(cls, path: str | Path) -> "MockProvider":
        try:
            data = json.loads(Path(path).read_text("utf-8"))
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cannot load mock fixture {path}: {err}") from err
        if not isinstance(data, list):
            raise ConfigError("mock fixture must be a JSON list of records")
        return cls(data)

    def complete_text(self, prompt: str, params: LlmParams) -> str:
        hit = self._by_text.get(prompt)
        if hit is not None:
            return hit
        nearest = ""
        nearest_len = -1
        for text in self._by_text:
            common = 0
            for a, b in zip(text, prompt):
                if a != b:
                    break
                common += 1
            if common > nearest_len:
                nearest_len = common
                nearest = text
        raise MockMiss(
            f"no scripted response for prompt starting {prompt[:60]!r}; "
            f"nearest fixture key diverges at index {nearest_len}: {nearest[:60]!r}"
        )


def fixture_record(prompt_text: str, response_text: str) -> dict:
    """One mock-fixture record in canonical form."""
    return {
        "promptSha256": hashlib.sha256(prompt_text.encode("utf-8")).hexdigest(),
        "promptText": prompt_text,
        "responseText": response_text,
    }


class Gateway:
    """Caching, retrying front door to a completion provider."""

    def __init__(
        self,
        provider: Provider,
        cache: PromptCache | None = None,
        policy: BackoffPolicy | None = None,
        sleep: Callable[[float], None] = time.sleep,
        rng: random.Random | None = None,
    ):
        self.provider = provider
        self.cache = cache if cache is not None else PromptCache()
        self.policy = policy if policy is not None else BackoffPolicy()
        self._sleep = sleep
        self._rng = rng if rng is not None else random.Random()

    def complete(self, prompt: str, params: LlmParams) -> CompletionResponse:
        key = cache_key(prompt, params)
        cached = self.cache.get(key)
        if cached is not None:
            return CompletionResponse(cached, cache_hit=True, attempts=0)

        last_error: ProviderError | None = None
        for attempt in range(self.policy.max_attempts):
            try:
                text = self.provider.complete_text(prompt, params)
            except AuthError:
                raise
            except ProviderError as err:
                last_error = err
                if attempt + 1 >= self.policy.max_attempts:
                    break
                pause = self.policy.jittered_delay(attempt, self._rng)
                log.warning("provider attempt %d failed (%s); retrying in %.2fs",
                            attempt + 1, err, pause)
                self._sleep(pause)
            else:
                self.cache.put(key, text)
                return CompletionResponse(text, cache_hit=False, attempts=attempt + 1)
        raise ProviderError(
            f"provider failed after {self.policy.max_attempts} attempts: {last_error}"
        ) from last_error
