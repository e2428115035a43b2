"""Critic/refiner loop over generated pages with a pluggable chat endpoint.

The loop seeds itself with the deterministic rule-based draft, then
alternates a critic (structured JSON issue list, temperature 0.5) and a
refiner (full revised document, temperature 0.0) until the critique comes
back empty or the iteration budget runs out. Any endpoint speaking the
chat-completions JSON exchange plugs in; tests use scripted stubs.

The critic sees a re-rendered screenshot each iteration when a rerender
callback is supplied, otherwise the initial screenshot is reused (the
protocol does not pin this down; re-rendering is the assumption here).
"""
from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Protocol

import requests

from .codegen import FAITHFUL_ABSOLUTE, CodegenConfig, GeneratedPage, generate
from .errors import InvalidModelOutput, ModelUnavailable, SchemaViolation, UnparsableDocument
from .htmlmodel import parse_html
from .ir import UiIr
from .metrics import MetricsReport, evaluate

ISSUE_TYPES = ("Layout", "Styling", "Component", "MissingContent", "Accessibility")

STOP_MAX_ITERS = "MAX_ITERS"
STOP_EMPTY_CRITIQUE = "EMPTY_CRITIQUE"
STOP_MODEL_ERROR = "MODEL_ERROR"


def _prompt(name: str) -> str:
    return resources.files("figforge.prompts").joinpath(name).read_text(encoding="utf-8")


@dataclass
class CritiqueIssue:
    issue_type: str  # canonical name, or "Other" with the raw value kept
    description: str
    suggestion: str
    raw_type: str = ""


@dataclass
class Critique:
    issues: list[CritiqueIssue] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not self.issues

    def as_dict(self) -> dict:
        return {"critique": [
            {"issue_type": i.raw_type or i.issue_type,
             "description": i.description,
             "suggestion": i.suggestion}
            for i in self.issues
        ]}


class ChatEndpoint(Protocol):
    def complete(self, messages: list[dict], temperature: float) -> str: ...


class HttpChatEndpoint:
    """Chat-completions-style HTTP JSON exchange.

    POSTs {model, messages, temperature} to <base_url>/chat/completions and
    reads choices[0].message.content. The auth token comes from the
    environment variable named in token_env (never from config files).
    """

    def __init__(self, base_url: str, model: str, token_env: str = "FIGFORGE_API_TOKEN",
                 timeout: float = 120.0):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.token_env = token_env
        self.timeout = timeout

    def complete(self, messages: list[dict], temperature: float) -> str:
        import os

        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.token_env, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
        payload = {"model": self.model, "messages": messages, "temperature": temperature}
        try:
            response = requests.post(
                f"{self.base_url}/chat/completions",
                json=payload, headers=headers, timeout=self.timeout,
            )
            response.raise_for_status()
            body = response.json()
            content = body["choices"][0]["message"]["content"]
        except (requests.RequestException, KeyError, IndexError, ValueError) as exc:
            raise ModelUnavailable(f"chat endpoint failed: {exc}") from None
        if isinstance(content, list):  # multi-part content: concatenate text parts
            content = "".join(part.get("text", "") for part in content if isinstance(part, dict))
        return str(content)


class ScriptedEndpoint:
    """Deterministic test double: answers from a callable or a fixed list."""

    def __init__(self, script: Callable[[list[dict], float], str] | list[str]):
        self._script = script
        self._cursor = 0

    def complete(self, messages: list[dict], temperature: float) -> str:
        if callable(self._script):
            return self._script(messages, temperature)
        if self._cursor >= len(self._script):
            raise ModelUnavailable("scripted endpoint exhausted")
        answer = self._script[self._cursor]
        self._cursor += 1
        return answer


@dataclass
class AgentConfig:
    max_iterations: int = 3
    critic_enabled: bool = True
    critic_temperature: float = 0.5
    refiner_temperature: float = 0.0
    model_endpoint: ChatEndpoint | None = None

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass
class IterationRecord:
    html_before: str
    critique: Critique | None
    html_after: str
    metrics_snapshot: MetricsReport | None


@dataclass
class AgentTrace:
    iterations: list[IterationRecord] = field(default_factory=list)
    stop_reason: str = STOP_MAX_ITERS

    def to_json(self) -> str:
        payload = {
            "stop_reason": self.stop_reason,
            "iterations": [
                {
                    "html_before": record.html_before,
                    "critique": record.critique.as_dict() if record.critique else None,
                    "html_after": record.html_after,
                    "metrics": record.metrics_snapshot.as_dict() if record.metrics_snapshot else None,
                }
                for record in self.iterations
            ],
        }
        return json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# prompts

def summarize_ir(ir: UiIr, max_chars: int = 4000) -> str:
    """Compact deterministic sketch of the IR for prompt context."""
    def node_obj(node):
        out = {"role": node.role, "box": [node.box.x, node.box.y, node.box.width, node.box.height]}
        if node.role == "TEXT" and node.text:
            out["text"] = node.text.content[:120]
        if node.role == "IMAGE":
            out["image"] = node.image_path
        if node.children:
            out["children"] = [node_obj(c) for c in node.children]
        return out

    summary = json.dumps({
        "page_size": list(ir.page_size),
        "assets": list(ir.asset_manifest),
        "tree": node_obj(ir.root),
    }, ensure_ascii=False)
    return summary[:max_chars]


def render_critic_prompt(html: str, ir_summary: str, screenshot: bytes | str | Path) -> list[dict]:
    """Critic messages with the screenshot attached base64, exactly once."""
    if isinstance(screenshot, (str, Path)):
        screenshot = Path(screenshot).read_bytes()
    encoded = base64.b64encode(screenshot).decode("ascii")
    user_text = _prompt("critic_user.txt").format(ir_summary=ir_summary, html=html)
    return [
        {"role": "system", "content": _prompt("critic_system.txt")},
        {
            "role": "user",
            "content": [
                {"type": "text", "text": user_text},
                {"type": "image_url", "image_url": {"url": f"data:image/png;base64,{encoded}"}},
            ],
        },
    ]


def render_refiner_prompt(html: str, critique: Critique | None) -> list[dict]:
    critique_text = json.dumps(critique.as_dict(), ensure_ascii=False) if critique else "(none provided)"
    user_text = _prompt("refiner_user.txt").format(html=html, critique=critique_text)
    return [
        {"role": "system", "content": _prompt("refiner_system.txt")},
        {"role": "user", "content": user_text},
    ]


# ---------------------------------------------------------------------------
# critique parsing

_CANONICAL = {
    "layout": "Layout",
    "styling": "Styling",
    "component": "Component",
    "missingcontent": "MissingContent",
    "missing content": "MissingContent",
    "accessibility": "Accessibility",
}


def parse_critique(model_text: str) -> Critique:
    """Strict parse of the critic's JSON object; surrounding prose rejected."""
    try:
        payload = json.loads(model_text)
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"critique is not strict JSON: {exc}") from None
    if not isinstance(payload, dict) or "critique" not in payload:
        raise SchemaViolation("critique object must contain a 'critique' array")
    items = payload["critique"]
    if not isinstance(items, list):
        raise SchemaViolation("'critique' must be an array")
    issues = []
    for index, item in enumerate(items):
        if not isinstance(item, dict):
            raise SchemaViolation(f"critique[{index}] is not an object")
        for key in ("issue_type", "description", "suggestion"):
            if key not in item or not isinstance(item[key], str):
                raise SchemaViolation(f"critique[{index}].{key} missing or not a string")
        raw = item["issue_type"]
        canonical = _CANONICAL.get(raw.strip().lower(), "Other")
        issues.append(CritiqueIssue(
            issue_type=canonical,
            description=item["description"],
            suggestion=item["suggestion"],
            raw_type=raw if canonical == "Other" else "",
        ))
    return Critique(issues=issues)


# ---------------------------------------------------------------------------
# the loop

def _html_is_valid(text: str) -> bool:
    try:
        parse_html(text)
    except UnparsableDocument:
        return False
    return "<html" in text.lower()


def run_agent(
    ir: UiIr,
    screenshot_path: str | Path,
    config: AgentConfig,
    codegen_config: CodegenConfig | None = None,
    rerender: Callable[[str], bytes] | None = None,
) -> tuple[GeneratedPage, AgentTrace]:
    """Draft deterministically, then critique-and-refine until done.

    Raises InvalidModelOutput (trace attached, stop_reason MODEL_ERROR) when
    the refiner fails HTML validation twice, or the critic breaks its JSON
    contract twice.
    """
    if config.model_endpoint is None:
        raise ModelUnavailable("no model endpoint configured")
    endpoint = config.model_endpoint

    draft = generate(ir, codegen_config or CodegenConfig(mode=FAITHFUL_ABSOLUTE))
    current = draft.html
    used = set(draft.asset_refs_used)
    ir_summary = summarize_ir(ir)
    screenshot = Path(screenshot_path).read_bytes()
    trace = AgentTrace()

    for _ in range(config.max_iterations):
        if rerender is not None:
            screenshot = rerender(current)

        critique: Critique | None = None
        if config.critic_enabled:
            messages = render_critic_prompt(current, ir_summary, screenshot)
            critique = _call_critic(endpoint, messages, config.critic_temperature, trace, current)
            if critique.empty:
                trace.iterations.append(IterationRecord(
                    html_before=current, critique=critique,
                    html_after=current, metrics_snapshot=evaluate(current)))
                trace.stop_reason = STOP_EMPTY_CRITIQUE
                return GeneratedPage(html=current, asset_refs_used=used), trace

        refined = _call_refiner(endpoint, current, critique, config.refiner_temperature, trace)
        trace.iterations.append(IterationRecord(
            html_before=current, critique=critique,
            html_after=refined, metrics_snapshot=evaluate(refined)))
        current = refined

    trace.stop_reason = STOP_MAX_ITERS
    return GeneratedPage(html=current, asset_refs_used=used), trace


def _call_critic(endpoint: ChatEndpoint, messages: list[dict], temperature: float,
                 trace: AgentTrace, current: str) -> Critique:
    for attempt in (0, 1):
        text = endpoint.complete(messages, temperature)
        try:
            return parse_critique(text)
        except SchemaViolation:
            if attempt == 1:
                trace.stop_reason = STOP_MODEL_ERROR
                trace.iterations.append(IterationRecord(
                    html_before=current, critique=None, html_after=current,
                    metrics_snapshot=None))
                raise InvalidModelOutput("critic violated its JSON contract twice", trace=trace)
    raise AssertionError("unreachable")


def _call_refiner(endpoint: ChatEndpoint, current: str, critique: Critique | None,
                  temperature: float, trace: AgentTrace) -> str:
    messages = render_refiner_prompt(current, critique)
    for attempt in (0, 1):
        text = endpoint.complete(messages, temperature)
        if _html_is_valid(text):
            return text
        if attempt == 1:
            trace.stop_reason = STOP_MODEL_ERROR
            trace.iterations.append(IterationRecord(
                html_before=current, critique=critique, html_after=current,
                metrics_snapshot=None))
            raise InvalidModelOutput("refiner produced unparsable HTML twice", trace=trace)
    raise AssertionError("unreachable")
