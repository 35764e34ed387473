"""Uniform LLM access: live HTTP chat-completion, record/replay, scripted mock.

Requests are keyed by a digest over (model_id, messages, decode_params) with
a fixed serialization, so a transcript recorded on one machine replays
byte-identically on another. Replay and scripted backends make every
downstream pipeline stage a pure function of corpus + transcripts + seeds.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from .errors import GatewayError, ReplayMiss, ScriptExhausted

DEFAULT_TEMPERATURE = 0.0
DEFAULT_MAX_OUTPUT = 4096
HTTP_RETRIES = 3


@dataclass(frozen=True)
class LlmRequest:
    model_id: str
    messages: tuple[tuple[str, str], ...]  # (role, content), role in {system, user}
    temperature: float
    max_output: int
    request_key: str

    @classmethod
    def build(cls, model_id: str, messages, temperature: float = DEFAULT_TEMPERATURE,
              max_output: int = DEFAULT_MAX_OUTPUT) -> "LlmRequest":
        msgs = tuple((role, content) for role, content in messages)
        for role, _ in msgs:
            if role not in ("system", "user"):
                raise GatewayError(f"unsupported message role: {role}")
        key = cls.compute_key(model_id, msgs, temperature, max_output)
        return cls(model_id=model_id, messages=msgs, temperature=temperature,
                   max_output=max_output, request_key=key)

    @staticmethod
    def compute_key(model_id, messages, temperature, max_output) -> str:
        # fixed serialization: key must be stable across processes and platforms
        payload = json.dumps(
            {
                "model_id": model_id,
                "messages": [[role, content] for role, content in messages],
                "temperature": temperature,
                "max_output": max_output,
            },
            sort_keys=True,
            separators=(",", ":"),
            ensure_ascii=True,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def to_json(self):
        return {
            "model_id": self.model_id,
            "messages": [[role, content] for role, content in self.messages],
            "temperature": self.temperature,
            "max_output": self.max_output,
        }


@dataclass
class LlmExchange:
    request: LlmRequest
    response_text: str
    backend: str  # LIVE | REPLAY | SCRIPTED
    latency: float = 0.0
    recorded_at: float = 0.0


class TranscriptStore:
    """Append-only transcript keyed by request_key; duplicate keys collapse."""

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self.entries: dict[str, dict] = {}
        self.duplicates: int = 0
        if self.path.exists():
            with self.path.open(encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    obj = json.loads(line)
                    self.entries[obj["request_key"]] = obj

    def get(self, request_key: str) -> str | None:
        entry = self.entries.get(request_key)
        return entry["response_text"] if entry else None

    def record(self, request: LlmRequest, response_text: str,
               recorded_at: float | None = None) -> None:
        with self._lock:
            if request.request_key in self.entries:
                self.duplicates += 1
                return
            entry = {
                "request_key": request.request_key,
                "request": request.to_json(),
                "response_text": response_text,
                "recorded_at": recorded_at if recorded_at is not None else time.time(),
            }
            self.entries[request.request_key] = entry
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry, sort_keys=True, separators=(",", ":")) + "\n")

    def __len__(self):
        return len(self.entries)


class ReplayGateway:
    """Serves stored responses only; any unseen request is a hard miss."""

    backend = "REPLAY"

    def __init__(self, transcripts: TranscriptStore):
        self.transcripts = transcripts

    @classmethod
    def from_path(cls, path) -> "ReplayGateway":
        return cls(TranscriptStore(path))

    def complete(self, request: LlmRequest) -> str:
        text = self.transcripts.get(request.request_key)
        if text is None:
            raise ReplayMiss(request.request_key)
        return text


class ScriptedGateway:
    """Returns programmed responses in order, optionally gated by predicates."""

    backend = "SCRIPTED"

    def __init__(self):
        self._lock = threading.Lock()
        self._script: list[tuple] = []  # (predicate | None, response | exception)

    def enqueue(self, response, predicate=None) -> "ScriptedGateway":
        self._script.append((predicate, response))
        return self

    def complete(self, request: LlmRequest) -> str:
        with self._lock:
            for i, (predicate, response) in enumerate(self._script):
                if predicate is None or predicate(request):
                    del self._script[i]
                    if isinstance(response, Exception):
                        raise response
                    return response
        raise ScriptExhausted(
            f"no scripted response matches request {request.request_key[:12]}")


class LiveGateway:
    """One HTTP chat-completion round trip per request, with bounded retry.

    Speaks generic JSON chat-completion: POST {endpoint} with
    {model, messages, temperature, max_tokens}; the response carries
    choices[0].message.content. Auth token read from the named environment
    variable. When a recorder is attached every exchange is persisted.
    """

    backend = "LIVE"

    def __init__(self, endpoint: str, model_id: str, api_key_env: str = "PATCHJUDGE_API_KEY",
                 recorder: TranscriptStore | None = None, retries: int = HTTP_RETRIES,
                 backoff: float = 1.0, timeout: float = 120.0):
        self.endpoint = endpoint
        self.model_id = model_id
        self.api_key_env = api_key_env
        self.recorder = recorder
        self.retries = retries
        self.backoff = backoff
        self.timeout = timeout

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.api_key_env, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def complete(self, request: LlmRequest) -> str:
        import requests

        body = {
            "model": request.model_id,
            "messages": [{"role": role, "content": content}
                         for role, content in request.messages],
            "temperature": request.temperature,
            "max_tokens": request.max_output,
        }
        last_error = GatewayError("no attempts made (retries=0)")
        for attempt in range(max(1, self.retries)):
            try:
                resp = requests.post(self.endpoint, json=body,
                                     headers=self._headers(), timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = GatewayError(f"transport failure: {exc}")
            else:
                if resp.status_code == 200:
                    try:
                        text = resp.json()["choices"][0]["message"]["content"]
                    except (KeyError, IndexError, ValueError) as exc:
                        raise GatewayError(f"malformed completion response: {exc}")
                    if self.recorder is not None:
                        self.recorder.record(request, text)
                    return text
                retry_after = resp.headers.get("Retry-After")
                last_error = GatewayError(
                    f"HTTP {resp.status_code} from {self.endpoint}",
                    retry_after=float(retry_after) if retry_after else None,
                )
                if resp.status_code < 500 and resp.status_code != 429:
                    break  # client errors don't get better with retries
            if attempt + 1 < self.retries:
                time.sleep(self.backoff * (2 ** attempt))
        raise last_error


def gateway_from_spec(spec: str):
    """Build a gateway from a CLI-style spec string.

    Forms: "replay:<transcript-path>", "live:<endpoint>,<model-id>".
    """
    kind, _, rest = spec.partition(":")
    if kind == "replay":
        if not rest:
            raise GatewayError("replay spec needs a transcript path")
        return ReplayGateway.from_path(rest)
    if kind == "live":
        endpoint, _, model_id = rest.rpartition(",")
        if not endpoint or not model_id:
            raise GatewayError("live spec is live:<endpoint>,<model-id>")
        return LiveGateway(endpoint=endpoint, model_id=model_id)
    raise GatewayError(f"unknown gateway kind: {kind!r}")
