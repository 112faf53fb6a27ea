"""Completion backends: the seam through which any model is reached.

A backend maps one prompt string to one completion string.  The HTTP
backend speaks a minimal JSON contract; scripted backends replay fixed
tables keyed by prompt hash, which keeps the whole pipeline testable
offline.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass
from typing import Any, Mapping, Protocol

import httpx


class BackendError(RuntimeError):
    """Transport failure or contract violation while fetching a completion."""


class ModelBackend(Protocol):
    def complete(self, prompt: str) -> str: ...


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class ConstantBackend:
    """Always returns the same completion; handy as an entail-everything verifier."""

    def __init__(self, text: str):
        self.text = text
        self.calls = 0

    def complete(self, prompt: str) -> str:
        self.calls += 1
        return self.text


class QueueBackend:
    """Returns scripted completions in order, regardless of the prompt."""

    def __init__(self, completions: list[str]):
        self._queue = list(completions)
        self._lock = threading.Lock()
        self.calls = 0

    def complete(self, prompt: str) -> str:
        with self._lock:
            self.calls += 1
            if not self._queue:
                raise BackendError("queue backend exhausted")
            return self._queue.pop(0)


class ScriptedBackend:
    """Replays a fixed prompt-to-completion table; unknown prompts error.

    Table keys are sha256 hex digests of the exact prompt text; values
    are either one completion or a list consumed across repeated calls.
    """

    def __init__(self, table: Mapping[str, str | list[str]], hashed: bool = True):
        self._table: dict[str, list[str]] = {}
        self._sequenced: set[str] = set()
        for key, value in table.items():
            h = key if hashed else prompt_hash(key)
            if isinstance(value, str):
                self._table[h] = [value]
            else:
                self._table[h] = list(value)
                self._sequenced.add(h)
        self._cursor: dict[str, int] = {}
        self._lock = threading.Lock()
        self.calls: dict[str, int] = {}

    @classmethod
    def from_file(cls, path: str) -> "ScriptedBackend":
        with open(path, "r", encoding="utf-8") as fh:
            return cls(json.load(fh), hashed=True)

    def table(self) -> dict[str, str | list[str]]:
        """Hash-keyed table suitable for serialization."""
        return {
            h: completions if h in self._sequenced else completions[0]
            for h, completions in self._table.items()
        }

    def complete(self, prompt: str) -> str:
        h = prompt_hash(prompt)
        with self._lock:
            if h not in self._table:
                raise BackendError(f"scripted backend has no completion for prompt hash {h}")
            self.calls[h] = self.calls.get(h, 0) + 1
            completions = self._table[h]
            if h in self._sequenced:
                cursor = self._cursor.get(h, 0)
                if cursor >= len(completions):
                    raise BackendError(f"scripted completions exhausted for prompt hash {h}")
                self._cursor[h] = cursor + 1
                return completions[cursor]
            return completions[0]


class HTTPBackend:
    """Single text-completion request/response over a configurable endpoint.

    POSTs ``{"model", "prompt", "temperature"}`` and reads the
    completion from the response JSON; the credential is resolved from
    the named environment variable at call time and sent as a bearer
    token.
    """

    def __init__(
        self,
        endpoint: str,
        model: str,
        credential_env: str = "",
        timeout: float = 30.0,
        temperature: float = 0.0,
        transport: httpx.BaseTransport | None = None,
    ):
        self.endpoint = endpoint
        self.model = model
        self.credential_env = credential_env
        self.timeout = timeout
        self.temperature = temperature
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def complete(self, prompt: str) -> str:
        headers = {}
        if self.credential_env:
            credential = os.environ.get(self.credential_env)
            if not credential:
                raise BackendError(
                    f"credential environment variable {self.credential_env!r} is not set"
                )
            headers["Authorization"] = f"Bearer {credential}"
        payload = {"model": self.model, "prompt": prompt, "temperature": self.temperature}
        try:
            response = self._client.post(self.endpoint, json=payload, headers=headers)
            response.raise_for_status()
            body = response.json()
        except httpx.HTTPError as e:
            raise BackendError(f"completion request failed: {e}") from e
        except ValueError as e:
            raise BackendError(f"completion response is not JSON: {e}") from e
        return _extract_completion(body)


def _extract_completion(body: Any) -> str:
    if isinstance(body, dict):
        if isinstance(body.get("completion"), str):
            return body["completion"]
        if isinstance(body.get("text"), str):
            return body["text"]
        choices = body.get("choices")
        if isinstance(choices, list) and choices:
            first = choices[0]
            if isinstance(first, dict):
                if isinstance(first.get("text"), str):
                    return first["text"]
                message = first.get("message")
                if isinstance(message, dict) and isinstance(message.get("content"), str):
                    return message["content"]
    raise BackendError("completion response carries no completion text")


@dataclass(frozen=True)
class BackendConfig:
    """Declarative backend description, loadable from a config file.

    The config names the credential environment variable, never the
    credential itself.
    """

    type: str
    endpoint: str = ""
    model: str = ""
    credential_env: str = ""
    timeout: float = 30.0
    temperature: float = 0.0
    table: Mapping[str, Any] | None = None
    path: str = ""
    text: str = ""

    @classmethod
    def from_dict(cls, obj: Mapping[str, Any]) -> "BackendConfig":
        kind = obj.get("type")
        if kind not in ("http", "scripted", "constant"):
            raise ValueError(f"unknown backend type: {kind!r}")
        return cls(
            type=kind,
            endpoint=obj.get("endpoint", ""),
            model=obj.get("model", ""),
            credential_env=obj.get("credential_env", ""),
            timeout=float(obj.get("timeout", 30.0)),
            temperature=float(obj.get("temperature", 0.0)),
            table=obj.get("table"),
            path=obj.get("path", ""),
            text=obj.get("text", ""),
        )

    @classmethod
    def from_file(cls, path: str) -> "BackendConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def build(self) -> ModelBackend:
        if self.type == "http":
            if not self.endpoint:
                raise ValueError("http backend requires an endpoint")
            return HTTPBackend(
                self.endpoint, self.model, self.credential_env, self.timeout, self.temperature
            )
        if self.type == "scripted":
            if self.table is not None:
                return ScriptedBackend(self.table, hashed=True)
            if self.path:
                return ScriptedBackend.from_file(self.path)
            raise ValueError("scripted backend requires a table or a path")
        return ConstantBackend(self.text)
