"""Figma design-document data model: parse, validate, serialize, traverse.

The parser is lossless: every JSON key it does not lift into a typed field
is preserved verbatim in an ``extra`` bag and written back on serialization,
so downstream passes (not the parser) decide what to strip.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterator

from .errors import MalformedJson, SchemaViolation

CONTAINER_TYPES = frozenset({"FRAME", "GROUP", "COMPONENT", "COMPONENT_SET", "INSTANCE", "SECTION"})
VECTOR_TYPES = frozenset({"VECTOR", "STAR", "LINE", "ELLIPSE", "REGULAR_POLYGON", "BOOLEAN_OPERATION"})
LAYOUT_MODES = ("NONE", "HORIZONTAL", "VERTICAL")

# Node-level keys lifted into typed fields; anything else lands in `extra`.
_RECOGNIZED_KEYS = frozenset({
    "id", "name", "type", "visible", "opacity", "absoluteBoundingBox",
    "fills", "strokes", "effects", "cornerRadius", "characters", "style",
    "layoutMode", "children",
})

_PAINT_KEYS = frozenset({"type", "color", "imageRef", "gradientStops"})
_EFFECT_KEYS = frozenset({"type", "visible", "offset", "radius", "color"})
_TEXT_STYLE_KEYS = frozenset({"fontFamily", "fontSize", "fontWeight", "textAlignHorizontal"})


@dataclass
class RGBA:
    """Color with channels in [0, 1], matching the Figma export convention."""

    r: float
    g: float
    b: float
    a: float = 1.0

    def to_hex(self) -> str:
        return "#{:02X}{:02X}{:02X}".format(
            round(self.r * 255), round(self.g * 255), round(self.b * 255)
        )

    def to_rgb255(self) -> tuple[int, int, int]:
        return (round(self.r * 255), round(self.g * 255), round(self.b * 255))


@dataclass
class Rect:
    x: float
    y: float
    width: float
    height: float

    def contains(self, other: "Rect") -> bool:
        """Axis-aligned containment; touching edges counts as contained."""
        return (
            self.x <= other.x
            and self.y <= other.y
            and other.x + other.width <= self.x + self.width
            and other.y + other.height <= self.y + self.height
        )

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass
class Paint:
    """One fill or stroke. paint_type is SOLID, GRADIENT, or IMAGE."""

    paint_type: str
    color: RGBA | None = None
    image_ref: str | None = None
    gradient_stops: list | None = None
    raw_type: str = ""  # original Figma type string, e.g. GRADIENT_LINEAR
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.raw_type:
            self.raw_type = self.paint_type


@dataclass
class Effect:
    effect_type: str
    visible: bool = True
    offset: tuple[float, float] = (0.0, 0.0)
    radius: float = 0.0
    color: RGBA | None = None
    extra: dict = field(default_factory=dict)


@dataclass
class TextStyle:
    font_family: str | None = None
    font_size: float | None = None
    font_weight: int | None = None
    text_align_horizontal: str | None = None
    extra: dict = field(default_factory=dict)


@dataclass
class FigmaNode:
    id: str
    name: str = ""
    node_type: str = "FRAME"
    visible: bool = True
    opacity: float = 1.0
    bounding_box: Rect | None = None
    fills: list[Paint] = field(default_factory=list)
    strokes: list[Paint] = field(default_factory=list)
    effects: list[Effect] = field(default_factory=list)
    corner_radius: float | None = None
    characters: str | None = None
    text_style: TextStyle | None = None
    layout_mode: str = "NONE"
    children: list["FigmaNode"] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def is_container(self) -> bool:
        return self.node_type in CONTAINER_TYPES or bool(self.children)

    def image_refs(self) -> list[str]:
        return [p.image_ref for p in self.fills if p.paint_type == "IMAGE" and p.image_ref]


@dataclass
class FigmaDocument:
    root: FigmaNode
    components: dict[str, dict] = field(default_factory=dict)
    component_sets: dict[str, dict] = field(default_factory=dict)
    styles: dict[str, dict] = field(default_factory=dict)
    source_meta: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def __eq__(self, other):
        if not isinstance(other, FigmaDocument):
            return NotImplemented
        # warnings are parse-time diagnostics, not document content
        return (
            self.root == other.root
            and self.components == other.components
            and self.component_sets == other.component_sets
            and self.styles == other.styles
            and self.source_meta == other.source_meta
        )

    def node_ids(self) -> set[str]:
        return {node.id for node, _, _ in walk(self, "PRE")}

    def node_count(self) -> int:
        return sum(1 for _ in walk(self, "PRE"))

    def find(self, node_id: str) -> FigmaNode | None:
        for node, _, _ in walk(self, "PRE"):
            if node.id == node_id:
                return node
        return None


@dataclass
class AssetStore:
    """Design assets keyed by path (or opaque ref before integration)."""

    assets: dict[str, bytes] = field(default_factory=dict)
    dedup_map: dict[str, str] = field(default_factory=dict)
    kinds: dict[str, str] = field(default_factory=dict)  # path -> PNG | SVG

    @staticmethod
    def sniff_kind(data: bytes) -> str:
        if data[:8] == b"\x89PNG\r\n\x1a\n":
            return "PNG"
        head = data[:512].lstrip()
        if head.startswith(b"<?xml") or head.startswith(b"<svg"):
            return "SVG"
        return "PNG"

    def put(self, key: str, data: bytes, kind: str | None = None) -> None:
        self.assets[key] = data
        self.kinds[key] = kind or self.sniff_kind(data)

    def lookup_ref(self, ref: str) -> str | None:
        """Resolve an image reference to a store key (exact key or file stem)."""
        if ref in self.assets:
            return ref
        for key in self.assets:
            stem = key.rsplit("/", 1)[-1].rsplit(".", 1)[0]
            if stem == ref:
                return key
        return None

    @classmethod
    def from_dir(cls, sample_dir) -> "AssetStore":
        """Load every file under <sample_dir>/assets keyed by relative path."""
        from pathlib import Path

        store = cls()
        assets_dir = Path(sample_dir) / "assets"
        if assets_dir.is_dir():
            for path in sorted(assets_dir.rglob("*")):
                if path.is_file():
                    rel = path.relative_to(Path(sample_dir)).as_posix()
                    store.put(rel, path.read_bytes())
        return store

    def write_dir(self, sample_dir) -> None:
        from pathlib import Path

        base = Path(sample_dir)
        for key, data in self.assets.items():
            target = base / key
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(data)


# ---------------------------------------------------------------------------
# parsing

def _parse_color(obj: Any, path: str) -> RGBA:
    if not isinstance(obj, dict):
        raise SchemaViolation("color must be an object", path)
    return RGBA(
        r=float(obj.get("r", 0.0)),
        g=float(obj.get("g", 0.0)),
        b=float(obj.get("b", 0.0)),
        a=float(obj.get("a", 1.0)),
    )


def _serialize_color(color: RGBA) -> dict:
    return {"r": color.r, "g": color.g, "b": color.b, "a": color.a}


def _parse_paint(obj: Any, path: str) -> Paint:
    if not isinstance(obj, dict):
        raise SchemaViolation("paint must be an object", path)
    raw_type = str(obj.get("type", "SOLID"))
    if raw_type.startswith("GRADIENT"):
        paint_type = "GRADIENT"
    elif raw_type in ("SOLID", "IMAGE"):
        paint_type = raw_type
    else:
        paint_type = "SOLID"
    color = _parse_color(obj["color"], f"{path}.color") if "color" in obj else None
    image_ref = obj.get("imageRef")
    stops = obj.get("gradientStops")
    if paint_type == "IMAGE" and not image_ref:
        raise SchemaViolation("IMAGE paint requires imageRef", path)
    if paint_type == "SOLID" and color is None:
        raise SchemaViolation("SOLID paint requires color", path)
    extra = {k: v for k, v in obj.items() if k not in _PAINT_KEYS}
    return Paint(
        paint_type=paint_type,
        color=color,
        image_ref=image_ref,
        gradient_stops=stops,
        raw_type=raw_type,
        extra=extra,
    )


def _serialize_paint(paint: Paint) -> dict:
    out: dict[str, Any] = {"type": paint.raw_type}
    if paint.color is not None:
        out["color"] = _serialize_color(paint.color)
    if paint.image_ref is not None:
        out["imageRef"] = paint.image_ref
    if paint.gradient_stops is not None:
        out["gradientStops"] = paint.gradient_stops
    out.update(paint.extra)
    return out


def _parse_effect(obj: Any, path: str) -> Effect:
    if not isinstance(obj, dict):
        raise SchemaViolation("effect must be an object", path)
    offset = obj.get("offset") or {}
    color = _parse_color(obj["color"], f"{path}.color") if "color" in obj else None
    extra = {k: v for k, v in obj.items() if k not in _EFFECT_KEYS}
    return Effect(
        effect_type=str(obj.get("type", "DROP_SHADOW")),
        visible=bool(obj.get("visible", True)),
        offset=(float(offset.get("x", 0.0)), float(offset.get("y", 0.0))),
        radius=float(obj.get("radius", 0.0)),
        color=color,
        extra=extra,
    )


def _serialize_effect(effect: Effect) -> dict:
    out: dict[str, Any] = {"type": effect.effect_type}
    if not effect.visible:
        out["visible"] = False
    if effect.offset != (0.0, 0.0):
        out["offset"] = {"x": effect.offset[0], "y": effect.offset[1]}
    if effect.radius:
        out["radius"] = effect.radius
    if effect.color is not None:
        out["color"] = _serialize_color(effect.color)
    out.update(effect.extra)
    return out


def _parse_text_style(obj: Any) -> TextStyle:
    obj = obj if isinstance(obj, dict) else {}
    weight = obj.get("fontWeight")
    return TextStyle(
        font_family=obj.get("fontFamily"),
        font_size=float(obj["fontSize"]) if "fontSize" in obj else None,
        font_weight=int(weight) if weight is not None else None,
        text_align_horizontal=obj.get("textAlignHorizontal"),
        extra={k: v for k, v in obj.items() if k not in _TEXT_STYLE_KEYS},
    )


def _serialize_text_style(style: TextStyle) -> dict:
    out: dict[str, Any] = {}
    if style.font_family is not None:
        out["fontFamily"] = style.font_family
    if style.font_size is not None:
        out["fontSize"] = style.font_size
    if style.font_weight is not None:
        out["fontWeight"] = style.font_weight
    if style.text_align_horizontal is not None:
        out["textAlignHorizontal"] = style.text_align_horizontal
    out.update(style.extra)
    return out


def _parse_rect(obj: Any, path: str) -> Rect:
    if not isinstance(obj, dict):
        raise SchemaViolation("bounding box must be an object", path)
    try:
        rect = Rect(
            x=float(obj.get("x", 0.0)),
            y=float(obj.get("y", 0.0)),
            width=float(obj.get("width", 0.0)),
            height=float(obj.get("height", 0.0)),
        )
    except (TypeError, ValueError) as exc:
        raise SchemaViolation(f"non-numeric geometry: {exc}", path) from None
    for value in (rect.x, rect.y, rect.width, rect.height):
        if not math.isfinite(value):
            raise SchemaViolation("geometry must be finite", path)
    return rect


def _parse_node(obj: Any, path: str, seen_ids: set[str], warnings: list[str]) -> FigmaNode:
    if not isinstance(obj, dict):
        raise SchemaViolation("node must be an object", path)
    if "id" not in obj or not isinstance(obj["id"], str) or not obj["id"]:
        raise SchemaViolation("node is missing its id", path)
    node_id = obj["id"]
    if node_id in seen_ids:
        raise SchemaViolation(f"duplicate node id {node_id!r}", path)
    seen_ids.add(node_id)

    node_type = str(obj.get("type", "FRAME"))
    opacity = float(obj.get("opacity", 1.0))
    if not 0.0 <= opacity <= 1.0:
        raise SchemaViolation(f"opacity {opacity} outside [0, 1]", path)

    characters = obj.get("characters")
    if characters is not None and node_type != "TEXT":
        raise SchemaViolation("characters present on a non-TEXT node", path)

    box = None
    if "absoluteBoundingBox" in obj and obj["absoluteBoundingBox"] is not None:
        box = _parse_rect(obj["absoluteBoundingBox"], f"{path}.absoluteBoundingBox")
        if box.width < 0 or box.height < 0 or box.area == 0:
            warnings.append(f"{path}: non-positive size {box.width}x{box.height}")

    layout_mode = str(obj.get("layoutMode", "NONE"))
    if layout_mode not in LAYOUT_MODES:
        warnings.append(f"{path}: unknown layoutMode {layout_mode!r}")
        layout_mode = "NONE"

    fills = [
        _parse_paint(p, f"{path}.fills[{i}]")
        for i, p in enumerate(obj.get("fills") or [])
    ]
    strokes = [
        _parse_paint(p, f"{path}.strokes[{i}]")
        for i, p in enumerate(obj.get("strokes") or [])
    ]
    effects = [
        _parse_effect(e, f"{path}.effects[{i}]")
        for i, e in enumerate(obj.get("effects") or [])
    ]
    children = [
        _parse_node(c, f"{path}.children[{i}]", seen_ids, warnings)
        for i, c in enumerate(obj.get("children") or [])
    ]

    corner_radius = obj.get("cornerRadius")
    text_style = _parse_text_style(obj["style"]) if node_type == "TEXT" and "style" in obj else None
    extra = {k: v for k, v in obj.items() if k not in _RECOGNIZED_KEYS}
    if node_type != "TEXT" and "style" in obj:
        # `style` only carries typography on TEXT nodes; elsewhere keep it raw
        extra["style"] = obj["style"]

    return FigmaNode(
        id=node_id,
        name=str(obj.get("name", "")),
        node_type=node_type,
        visible=bool(obj.get("visible", True)),
        opacity=opacity,
        bounding_box=box,
        fills=fills,
        strokes=strokes,
        effects=effects,
        corner_radius=float(corner_radius) if corner_radius is not None else None,
        characters=characters,
        text_style=text_style,
        layout_mode=layout_mode,
        children=children,
        extra=extra,
    )


def _find_rest_root(document: dict) -> dict:
    """Pick the first FRAME that is a direct child of a CANVAS node."""
    for canvas in document.get("children") or []:
        if isinstance(canvas, dict) and canvas.get("type") == "CANVAS":
            for child in canvas.get("children") or []:
                if isinstance(child, dict) and child.get("type") == "FRAME":
                    return child
    raise SchemaViolation("no FRAME found under a CANVAS node", "document")


def parse_document(raw: bytes | str | dict) -> FigmaDocument:
    """Parse Figma REST-API JSON (or this toolkit's refined envelope).

    Accepted shapes: a full REST file body (``{"document": ...}``), the
    refined envelope (``{"root": ...}``), or a bare FRAME node object.
    """
    if isinstance(raw, (bytes, bytearray)):
        raw = raw.decode("utf-8")
    if isinstance(raw, str):
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise MalformedJson(f"invalid JSON: {exc}") from None
    else:
        data = raw
    if not isinstance(data, dict):
        raise SchemaViolation("document must be a JSON object", "")

    source_meta: dict = {}
    if "document" in data:
        root_obj = _find_rest_root(data["document"])
        source_meta = dict(data.get("source_meta") or {})
    elif "root" in data:
        root_obj = data["root"]
        source_meta = dict(data.get("source_meta") or {})
    else:
        root_obj = data

    warnings: list[str] = []
    root = _parse_node(root_obj, "root", set(), warnings)
    return FigmaDocument(
        root=root,
        components=dict(data.get("components") or {}) if root_obj is not data else {},
        component_sets=dict(data.get("componentSets") or {}) if root_obj is not data else {},
        styles=dict(data.get("styles") or {}) if root_obj is not data else {},
        source_meta=source_meta,
        warnings=warnings,
    )


# ---------------------------------------------------------------------------
# serialization

def serialize_node(node: FigmaNode) -> dict:
    """Node back to its JSON form. Default-valued fields are omitted."""
    out: dict[str, Any] = {"id": node.id, "name": node.name, "type": node.node_type}
    if not node.visible:
        out["visible"] = False
    if node.opacity != 1.0:
        out["opacity"] = node.opacity
    if node.bounding_box is not None:
        box = node.bounding_box
        out["absoluteBoundingBox"] = {
            "x": box.x, "y": box.y, "width": box.width, "height": box.height,
        }
    if node.fills:
        out["fills"] = [_serialize_paint(p) for p in node.fills]
    if node.strokes:
        out["strokes"] = [_serialize_paint(p) for p in node.strokes]
    if node.effects:
        out["effects"] = [_serialize_effect(e) for e in node.effects]
    if node.corner_radius is not None:
        out["cornerRadius"] = node.corner_radius
    if node.characters is not None:
        out["characters"] = node.characters
    if node.text_style is not None:
        out["style"] = _serialize_text_style(node.text_style)
    if node.layout_mode != "NONE":
        out["layoutMode"] = node.layout_mode
    out.update(node.extra)
    if node.children:
        out["children"] = [serialize_node(c) for c in node.children]
    return out


def document_to_obj(doc: FigmaDocument) -> dict:
    out: dict[str, Any] = {"root": serialize_node(doc.root)}
    if doc.components:
        out["components"] = doc.components
    if doc.component_sets:
        out["componentSets"] = doc.component_sets
    if doc.styles:
        out["styles"] = doc.styles
    if doc.source_meta:
        out["source_meta"] = doc.source_meta
    return out


def serialize_document(doc: FigmaDocument) -> bytes:
    """Inverse of parse_document up to structural equality."""
    return json.dumps(document_to_obj(doc), ensure_ascii=False, indent=2).encode("utf-8")


# ---------------------------------------------------------------------------
# traversal

def _walk_pre(node: FigmaNode, depth: int, path: tuple[str, ...]) -> Iterator[tuple[FigmaNode, int, tuple[str, ...]]]:
    yield node, depth, path
    for child in node.children:
        yield from _walk_pre(child, depth + 1, path + (node.id,))


def _walk_reverse_z(node: FigmaNode, depth: int, path: tuple[str, ...]) -> Iterator[tuple[FigmaNode, int, tuple[str, ...]]]:
    for child in reversed(node.children):
        yield from _walk_reverse_z(child, depth + 1, path + (node.id,))
    yield node, depth, path


def walk(doc: FigmaDocument | FigmaNode, order: str = "PRE") -> Iterator[tuple[FigmaNode, int, tuple[str, ...]]]:
    """Yield (node, depth, ancestor-id-path).

    PRE is document order (paint order). REVERSE_Z visits topmost first:
    later siblings before earlier ones, children before their parent.
    """
    root = doc.root if isinstance(doc, FigmaDocument) else doc
    if order == "PRE":
        return _walk_pre(root, 0, ())
    if order == "REVERSE_Z":
        return _walk_reverse_z(root, 0, ())
    raise ValueError(f"unknown traversal order {order!r}")
