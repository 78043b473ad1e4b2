"""Pluggable chat-completion providers.

The engine only ever calls `complete(messages, context)`. The mock provider
answers from a JSON fixture table keyed by (report_id, cycle, sorted
feedback class names) so the whole pipeline runs offline and byte-stable;
the http provider posts {messages:[{role,content}]} to a configured
endpoint and expects {content} back.
"""

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import FaultlineError, ProviderError


@dataclass(frozen=True)
class ProviderContext:
    """Session coordinates threaded to providers alongside the transcript."""

    report_id: str
    cycle: int = 0
    feedback_classes: tuple = ()


class LlmProvider:
    """Interface: complete(messages, context) -> reply text."""

    def complete(self, messages: list[dict], context: ProviderContext | None = None) -> str:
        raise NotImplementedError


def _fixture_key(report_id: str, cycle: int, feedback_classes) -> str:
    return f"{report_id}|{cycle}|{','.join(sorted(set(feedback_classes)))}"


@dataclass
class MockProvider(LlmProvider):
    """Deterministic lookup-table provider for tests and offline runs."""

    replies: dict = field(default_factory=dict)
    default_reply: str = "I cannot determine the cause."
    calls: list = field(default_factory=list)

    @classmethod
    def from_fixture(cls, path) -> "MockProvider":
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise FaultlineError(f"cannot load mock fixtures {path}: {exc}") from exc
        replies = {}
        for entry in doc.get("replies", []):
            key = _fixture_key(entry["report_id"], int(entry.get("cycle", 0)),
                               entry.get("feedback_classes", ()))
            replies[key] = entry["reply"]
        return cls(replies=replies,
                   default_reply=doc.get("default_reply", cls.default_reply))

    def add_reply(self, report_id: str, cycle: int, feedback_classes,
                  reply: str) -> None:
        self.replies[_fixture_key(report_id, cycle, feedback_classes)] = reply

    def complete(self, messages, context=None):
        self.calls.append((tuple((m["role"], m["content"]) for m in messages), context))
        if context is None:
            return self.default_reply
        key = _fixture_key(context.report_id, context.cycle, context.feedback_classes)
        return self.replies.get(key, self.default_reply)


class FailingProvider(LlmProvider):
    """Always errors; exercises retry/fallback paths."""

    def complete(self, messages, context=None):
        raise ProviderError("provider unavailable", retriable=True)


class HttpProvider(LlmProvider):
    """Chat endpoint client configured from the environment.

    FAULTLINE_LLM_URL, FAULTLINE_LLM_MODEL, FAULTLINE_LLM_API_KEY.
    """

    def __init__(self, url=None, model=None, api_key=None, timeout=60.0):
        self.url = url or os.environ.get("FAULTLINE_LLM_URL")
        self.model = model or os.environ.get("FAULTLINE_LLM_MODEL", "gpt-4")
        self.api_key = api_key or os.environ.get("FAULTLINE_LLM_API_KEY")
        self.timeout = timeout
        if not self.url:
            raise ProviderError("FAULTLINE_LLM_URL is not set", retriable=False)

    def complete(self, messages, context=None):
        import requests

        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {"model": self.model, "messages": list(messages)}
        try:
            resp = requests.post(self.url, json=body, headers=headers,
                                 timeout=self.timeout)
        except requests.RequestException as exc:
            raise ProviderError(f"provider request failed: {exc}") from exc
        if resp.status_code >= 500:
            raise ProviderError(f"provider error {resp.status_code}", retriable=True)
        if resp.status_code >= 400:
            raise ProviderError(f"provider rejected request: {resp.status_code}",
                                retriable=False)
        try:
            return resp.json()["content"]
        except (ValueError, KeyError) as exc:
            raise ProviderError(f"malformed provider response: {exc}",
                                retriable=False) from exc


def make_provider(kind: str, fixtures=None) -> LlmProvider:
    if kind == "mock":
        if fixtures:
            return MockProvider.from_fixture(fixtures)
        return MockProvider()
    if kind == "http":
        return HttpProvider()
    raise FaultlineError(f"unknown provider kind: {kind!r}")
