"""Static responsiveness and maintainability metrics for HTML/Tailwind pages.

Eight ratios, each reported with its raw numerator/denominator. Degenerate
denominators yield 0 with an explicit flag so corpus aggregation stays total.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .htmlmodel import HtmlDocumentModel, HtmlElement, parse_html
from .tailwind import (
    ARBITRARY_VALUE,
    BREAKPOINT_BANDS,
    BREAKPOINT_MIN_WIDTHS,
    CUSTOM,
    LAYOUT_SIZE,
    SPACING,
)

SEMANTIC_TAGS = frozenset({
    "header", "nav", "main", "section", "article", "aside", "footer",
    "h1", "h2", "h3", "h4", "h5", "h6", "p", "ul", "ol", "li",
    "table", "thead", "tbody", "tr", "th", "td",
    "form", "label", "button", "input", "select", "textarea",
    "figure", "figcaption", "img", "a",
})

POSITION_CLASSES = frozenset({"absolute", "fixed", "relative", "sticky"})
ABSPOS_CLASSES = frozenset({"absolute", "fixed"})
FLEXGRID_CLASSES = frozenset({"flex", "inline-flex", "grid", "inline-grid"})

_LAYOUT_PROPS = re.compile(
    r"^(width|height|min-width|min-height|max-width|max-height|"
    r"margin(-top|-right|-bottom|-left)?|padding(-top|-right|-bottom|-left)?|"
    r"top|right|bottom|left|inset|gap)$"
)
_REL_UNIT = re.compile(r"\d\s*(%|em|rem|vw|vh|vmin|vmax|fr)\b|\d%")
_ABS_UNIT = re.compile(r"\d\s*(px|pt|pc|cm|mm|in)\b")
_MEDIA_MIN_WIDTH = re.compile(r"@media[^{]*?min-width\s*:\s*(\d+(?:\.\d+)?)px")


@dataclass
class MetricValue:
    value: float
    numerator: int
    denominator: int
    flag: str | None = None


@dataclass
class MetricsReport:
    rur: MetricValue
    apr: MetricValue
    fu: MetricValue
    bc: MetricValue
    str: MetricValue
    avu: MetricValue
    isr: MetricValue
    ccr: MetricValue
    flags: list = field(default_factory=list)

    _ORDER = ("rur", "apr", "fu", "bc", "str", "avu", "isr", "ccr")

    def as_dict(self) -> dict:
        out = {}
        for name in self._ORDER:
            metric: MetricValue = getattr(self, name)
            out[name] = {
                "value": metric.value,
                "numerator": metric.numerator,
                "denominator": metric.denominator,
                "flag": metric.flag,
            }
        out["flags"] = list(self.flags)
        return out


def _ratio(numerator: int, denominator: int, flag_name: str) -> MetricValue:
    if denominator <= 0:
        return MetricValue(0.0, numerator, denominator, flag=f"{flag_name}_DEGENERATE")
    return MetricValue(numerator / denominator, numerator, denominator)


def _body_scope(model: HtmlDocumentModel) -> tuple[HtmlElement | None, list[HtmlElement], list[HtmlElement]]:
    """(body, body + descendants, strict descendants)."""
    body = model.body
    if body is None:
        elements = list(model.iter())
        return None, elements, elements
    with_body = list(body.iter())
    return body, with_body, with_body[1:]


def _inline_value_unit(value: str) -> bool | None:
    if _REL_UNIT.search(value):
        return True
    if _ABS_UNIT.search(value):
        return False
    return None


def rur(model: HtmlDocumentModel) -> MetricValue:
    """Relative units among layout-related declarations (classes + inline)."""
    _, scope, _ = _body_scope(model)
    relative = total = 0
    for element in scope:
        for token in element.classes:
            if token.property_group in (LAYOUT_SIZE, SPACING) and token.is_relative is not None:
                total += 1
                if token.is_relative:
                    relative += 1
        for prop, value in element.inline_style or []:
            if _LAYOUT_PROPS.match(prop):
                unit = _inline_value_unit(value)
                if unit is not None:
                    total += 1
                    if unit:
                        relative += 1
    return _ratio(relative, total, "RUR")


def _element_position(element: HtmlElement) -> str | None:
    position = None
    for token in element.classes:
        if token.base in POSITION_CLASSES:
            if token.base in ABSPOS_CLASSES:
                return token.base
            position = token.base
    for prop, value in element.inline_style or []:
        if prop == "position":
            value = value.strip().lower()
            if value in ABSPOS_CLASSES:
                return value
            if value in POSITION_CLASSES:
                position = value
    return position


def apr(model: HtmlDocumentModel) -> MetricValue:
    """absolute/fixed among positioned elements."""
    _, scope, _ = _body_scope(model)
    abspos = positioned = 0
    for element in scope:
        position = _element_position(element)
        if position is None:
            continue
        positioned += 1
        if position in ABSPOS_CLASSES:
            abspos += 1
    return _ratio(abspos, positioned, "APR")


def fu(model: HtmlDocumentModel) -> MetricValue:
    """flex/grid adoption among container elements (>= 1 element child)."""
    _, scope, _ = _body_scope(model)
    flexgrid = containers = 0
    for element in scope:
        if not element.children:
            continue
        containers += 1
        uses = any(t.base in FLEXGRID_CLASSES for t in element.classes)
        if not uses:
            uses = any(
                prop == "display" and value.strip().lower() in ("flex", "grid", "inline-flex", "inline-grid")
                for prop, value in element.inline_style or []
            )
        if uses:
            flexgrid += 1
    return _ratio(flexgrid, containers, "FU")


def _band_for_min_width(px: float) -> str:
    if px >= BREAKPOINT_MIN_WIDTHS["xl"]:
        return "XL"
    if px >= BREAKPOINT_MIN_WIDTHS["lg"]:
        return "L"
    if px >= BREAKPOINT_MIN_WIDTHS["md"]:
        return "M"
    return "S"


def bc(model: HtmlDocumentModel) -> MetricValue:
    """Coverage of the four standard viewport bands (S/M/L/XL)."""
    covered: set[str] = set()
    _, scope, _ = _body_scope(model)
    for element in scope:
        for token in element.classes:
            for prefix in token.variant_prefixes:
                if prefix in BREAKPOINT_BANDS:
                    covered.add(BREAKPOINT_BANDS[prefix])
    for css in model.style_texts:
        for match in _MEDIA_MIN_WIDTH.finditer(css):
            covered.add(_band_for_min_width(float(match.group(1))))
    return MetricValue(len(covered) / 4, len(covered), 4)


def str_ratio(model: HtmlDocumentModel) -> MetricValue:
    """Semantic tags among body descendants."""
    _, _, descendants = _body_scope(model)
    semantic = sum(1 for e in descendants if e.tag in SEMANTIC_TAGS)
    return _ratio(semantic, len(descendants), "STR")


def avu(model: HtmlDocumentModel) -> MetricValue:
    """Arbitrary-value tokens among all class tokens."""
    _, scope, _ = _body_scope(model)
    arbitrary = total = 0
    for element in scope:
        for token in element.classes:
            total += 1
            if token.kind == ARBITRARY_VALUE:
                arbitrary += 1
    return _ratio(arbitrary, total, "AVU")


def isr(model: HtmlDocumentModel) -> MetricValue:
    """Elements carrying inline style declarations among body descendants."""
    _, _, descendants = _body_scope(model)
    styled = sum(1 for e in descendants if e.inline_style)
    return _ratio(styled, len(descendants), "ISR")


def ccr(model: HtmlDocumentModel) -> MetricValue:
    """Custom class names applied to >= 2 elements among distinct customs."""
    _, scope, _ = _body_scope(model)
    usage: dict[str, int] = {}
    for element in scope:
        seen_here = set()
        for token in element.classes:
            if token.kind == CUSTOM and token.raw not in seen_here:
                seen_here.add(token.raw)
                usage[token.raw] = usage.get(token.raw, 0) + 1
    reused = sum(1 for count in usage.values() if count >= 2)
    return _ratio(reused, len(usage), "CCR")


def evaluate_model(model: HtmlDocumentModel) -> MetricsReport:
    values = {
        "rur": rur(model),
        "apr": apr(model),
        "fu": fu(model),
        "bc": bc(model),
        "str": str_ratio(model),
        "avu": avu(model),
        "isr": isr(model),
        "ccr": ccr(model),
    }
    flags = [v.flag for v in values.values() if v.flag]
    return MetricsReport(flags=flags, **values)


def evaluate(html: str) -> MetricsReport:
    """All eight metrics for one document. Deterministic and pure."""
    return evaluate_model(parse_html(html))
