"""Controlled metadata ablations: geometry, style, image content, hierarchy, text.

Each transform operates on the serialized JSON form so the key removal also
reaches override tables and other payloads preserved inside ``extra``, then
re-parses. All transforms are pure and idempotent; the exact key lists are
module constants mirrored by the test suite.
"""
from __future__ import annotations

import copy
from typing import Any

from .errors import DuplicateId
from .model import FigmaDocument, FigmaNode, document_to_obj, parse_document, walk

GEOMETRY_KEYS = frozenset({
    "x", "y", "width", "height",
    "absoluteBoundingBox", "absoluteRenderBounds",
    "relativeTransform", "transform", "size", "rotation",
})

STYLE_KEYS = frozenset({
    "fills", "strokes", "effects", "opacity",
    "cornerRadius", "rectangleCornerRadii", "cornerSmoothing",
    "style", "fontName", "fontSize", "fontWeight", "fontFamily",
    "textCase", "textDecoration", "letterSpacing", "lineHeight",
    "fillStyleId", "strokeStyleId", "textStyleId", "effectStyleId", "gridStyleId",
    "styles", "background", "backgroundColor", "strokeWeight", "strokeAlign",
})

IMAGE_KEYS = frozenset({"imageRef", "imageHash"})

TEXT_KEYS = frozenset({"characters", "text"})

ABLATION_KEYS: dict[str, frozenset[str]] = {
    "GEOMETRY": GEOMETRY_KEYS,
    "STYLE": STYLE_KEYS,
    "IMAGE_CONTENT": IMAGE_KEYS,
    "TEXT": TEXT_KEYS,
}

ABLATION_KINDS = ("GEOMETRY", "STYLE", "IMAGE_CONTENT", "HIERARCHY", "TEXT")


def _strip_keys(obj: Any, keys: frozenset[str]) -> Any:
    if isinstance(obj, dict):
        return {k: _strip_keys(v, keys) for k, v in obj.items() if k not in keys}
    if isinstance(obj, list):
        return [_strip_keys(v, keys) for v in obj]
    return obj


def _drop_image_paints(obj: Any) -> Any:
    if isinstance(obj, dict):
        out = {}
        for key, value in obj.items():
            if key in ("fills", "background", "strokes") and isinstance(value, list):
                value = [
                    p for p in value
                    if not (isinstance(p, dict) and p.get("type") == "IMAGE")
                ]
            out[key] = _drop_image_paints(value)
        return out
    if isinstance(obj, list):
        return [_drop_image_paints(v) for v in obj]
    return obj


def _rebuild(obj: dict) -> FigmaDocument:
    return parse_document(obj)


def ablate_geometry(doc: FigmaDocument) -> FigmaDocument:
    """Remove every geometric property, including inside override payloads."""
    return _rebuild(_strip_keys(document_to_obj(doc), GEOMETRY_KEYS))


def ablate_style(doc: FigmaDocument) -> FigmaDocument:
    """Remove fills, strokes, effects, typography, radii, opacity, and
    style-library references everywhere. Text content and layout modes stay."""
    return _rebuild(_strip_keys(document_to_obj(doc), STYLE_KEYS))


def ablate_image_content(doc: FigmaDocument) -> FigmaDocument:
    """Remove image references and drop IMAGE paints, leaving other paints."""
    obj = _strip_keys(document_to_obj(doc), IMAGE_KEYS)
    return _rebuild(_drop_image_paints(obj))


def ablate_hierarchy(doc: FigmaDocument) -> FigmaDocument:
    """Flatten to depth one: root's children become the preorder list of all
    other nodes, each childless. The node-id multiset is preserved exactly."""
    doc = copy.deepcopy(doc)
    flat: list[FigmaNode] = []
    seen: set[str] = set()
    for node, _, _ in walk(doc, "PRE"):
        if node.id in seen:
            raise DuplicateId(f"duplicate node id {node.id!r}")
        seen.add(node.id)
        if node is not doc.root:
            flat.append(node)
    for node in flat:
        node.children = []
    doc.root.children = flat
    return doc


def _clear_text_property_values(obj: Any) -> Any:
    # component properties carry literal strings as {"type": "TEXT", "value": ...}
    if isinstance(obj, dict):
        out = {}
        for key, value in obj.items():
            if key == "value" and obj.get("type") == "TEXT":
                continue
            out[key] = _clear_text_property_values(value)
        return out
    if isinstance(obj, list):
        return [_clear_text_property_values(v) for v in obj]
    return obj


def ablate_text(doc: FigmaDocument) -> FigmaDocument:
    """Remove all textual content and anonymize TEXT node names as text-<k>,
    k being the node's preorder index among TEXT nodes. Typography stays
    (that belongs to the style ablation)."""
    obj = _clear_text_property_values(_strip_keys(document_to_obj(doc), TEXT_KEYS))
    out = _rebuild(obj)
    k = 0
    for node, _, _ in walk(out, "PRE"):
        if node.node_type == "TEXT":
            node.name = f"text-{k}"
            k += 1
    return out


_ABLATORS = {
    "GEOMETRY": ablate_geometry,
    "STYLE": ablate_style,
    "IMAGE_CONTENT": ablate_image_content,
    "HIERARCHY": ablate_hierarchy,
    "TEXT": ablate_text,
}


def ablate(doc: FigmaDocument, kind: str) -> FigmaDocument:
    """Apply one ablation by kind (see ABLATION_KINDS)."""
    kind = kind.upper()
    if kind not in _ABLATORS:
        raise ValueError(f"unknown ablation kind {kind!r}; expected one of {ABLATION_KINDS}")
    return _ABLATORS[kind](doc)
