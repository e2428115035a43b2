"""Intermediate representation: a normalized layout tree bridging refined
design metadata and code generation.

Conversion resolves styles, inlines embedded component references, and
re-expresses geometry parent-relative. Layout stays ABSOLUTE for frames
without auto-layout; flow recovery happens at generation time.
"""
from __future__ import annotations

import copy
import json
import logging
from dataclasses import dataclass, field

from .errors import UnresolvedReference
from .model import (
    CONTAINER_TYPES,
    FigmaDocument,
    FigmaNode,
    Rect,
    RGBA,
    _parse_node,
)

logger = logging.getLogger(__name__)

IR_VERSION = 1

ROLE_CONTAINER = "CONTAINER"
ROLE_TEXT = "TEXT"
ROLE_IMAGE = "IMAGE"

LAYOUT_ABSOLUTE = "ABSOLUTE"
LAYOUT_ROW = "ROW"
LAYOUT_COLUMN = "COLUMN"

DEFAULT_STACK_TOLERANCE = 2.0


@dataclass
class Border:
    width: float
    color: RGBA


@dataclass
class Shadow:
    x: float
    y: float
    blur: float
    color: RGBA


@dataclass
class ResolvedStyle:
    background: RGBA | None = None
    background_image: str | None = None
    border: Border | None = None
    radius: float = 0.0
    shadow: Shadow | None = None
    opacity: float = 1.0


@dataclass
class TextContent:
    content: str
    font_size: float = 16.0
    weight: int = 400
    color: RGBA = field(default_factory=lambda: RGBA(0, 0, 0, 1))
    align: str = "LEFT"


@dataclass
class IrNode:
    role: str
    box: Rect  # relative to parent
    layout: str = LAYOUT_ABSOLUTE
    gap: float = 0.0
    padding: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    style: ResolvedStyle = field(default_factory=ResolvedStyle)
    text: TextContent | None = None
    image_path: str | None = None
    children: list["IrNode"] = field(default_factory=list)
    name: str = ""

    def iter(self):
        yield self
        for child in self.children:
            yield from child.iter()


@dataclass
class UiIr:
    root: IrNode
    page_size: tuple[float, float]
    asset_manifest: list[str] = field(default_factory=list)


# ---------------------------------------------------------------------------
# conversion

def _first_visible_paint(paints):
    for paint in paints:
        if paint.extra.get("visible", True):
            return paint
    return None


def _paint_color(paint) -> RGBA | None:
    if paint is None:
        return None
    if paint.paint_type == "SOLID":
        return paint.color
    if paint.paint_type == "GRADIENT" and paint.gradient_stops:
        stop = paint.gradient_stops[0]
        color = stop.get("color", {}) if isinstance(stop, dict) else {}
        return RGBA(
            r=float(color.get("r", 0)), g=float(color.get("g", 0)),
            b=float(color.get("b", 0)), a=float(color.get("a", 1)),
        )
    return None


def _fills_from_style_ref(node: FigmaNode, doc: FigmaDocument) -> list:
    """Enriched embedded style definitions can carry the actual paints."""
    refs = node.extra.get("styles")
    if not isinstance(refs, dict) or "fill" not in refs:
        return []
    key = str(refs["fill"])
    definition = doc.styles.get(key)
    if definition is None:
        raise UnresolvedReference(key)
    paints = definition.get("fills") if isinstance(definition, dict) else None
    if not paints:
        return []
    from .model import _parse_paint

    return [_parse_paint(p, f"styles[{key}].fills[{i}]") for i, p in enumerate(paints)]


def _resolve_style(node: FigmaNode, doc: FigmaDocument | None = None) -> ResolvedStyle:
    style = ResolvedStyle(opacity=node.opacity)
    if not node.fills and doc is not None:
        inlined = _fills_from_style_ref(node, doc)
        if inlined:
            node = copy.copy(node)
            node.fills = inlined
    paint = _first_visible_paint(node.fills)
    if paint is not None:
        if paint.paint_type == "IMAGE":
            style.background_image = paint.image_ref
        else:
            style.background = _paint_color(paint)

    stroke = _first_visible_paint(node.strokes)
    if stroke is not None:
        color = _paint_color(stroke)
        if color is not None:
            width = float(node.extra.get("strokeWeight", 1.0))
            style.border = Border(width=width, color=color)

    if node.corner_radius is not None:
        style.radius = node.corner_radius
    elif node.node_type == "ELLIPSE" and node.bounding_box is not None:
        style.radius = min(node.bounding_box.width, node.bounding_box.height) / 2

    for effect in node.effects:
        if effect.visible and effect.effect_type == "DROP_SHADOW":
            style.shadow = Shadow(
                x=effect.offset[0], y=effect.offset[1],
                blur=effect.radius, color=effect.color or RGBA(0, 0, 0, 0.25),
            )
            break
    return style


def _text_content(node: FigmaNode) -> TextContent:
    ts = node.text_style
    fill = _paint_color(_first_visible_paint(node.fills))
    return TextContent(
        content=node.characters or "",
        font_size=(ts.font_size if ts and ts.font_size else 16.0),
        weight=(ts.font_weight if ts and ts.font_weight else 400),
        color=fill or RGBA(0, 0, 0, 1),
        align=(ts.text_align_horizontal if ts and ts.text_align_horizontal else "LEFT"),
    )


def _layout_for(node: FigmaNode) -> str:
    if node.layout_mode == "HORIZONTAL":
        return LAYOUT_ROW
    if node.layout_mode == "VERTICAL":
        return LAYOUT_COLUMN
    return LAYOUT_ABSOLUTE


def _padding_for(node: FigmaNode) -> tuple[float, float, float, float]:
    return (
        float(node.extra.get("paddingTop", 0.0)),
        float(node.extra.get("paddingRight", 0.0)),
        float(node.extra.get("paddingBottom", 0.0)),
        float(node.extra.get("paddingLeft", 0.0)),
    )


def _shift_boxes(node: FigmaNode, dx: float, dy: float) -> None:
    if node.bounding_box is not None:
        node.bounding_box.x += dx
        node.bounding_box.y += dy
    for child in node.children:
        _shift_boxes(child, dx, dy)


def _inline_component(node: FigmaNode, doc: FigmaDocument) -> FigmaNode | None:
    """Expand a childless INSTANCE from the embedded component definitions."""
    key = node.extra.get("componentId")
    if not key:
        return None
    definition = doc.components.get(key)
    if definition is None:
        raise UnresolvedReference(str(key))
    payload = definition.get("root", definition) if isinstance(definition, dict) else definition
    subtree = _parse_node(copy.deepcopy(payload), f"components[{key}]", set(), [])

    if subtree.bounding_box is not None and node.bounding_box is not None:
        dx = node.bounding_box.x - subtree.bounding_box.x
        dy = node.bounding_box.y - subtree.bounding_box.y
        _shift_boxes(subtree, dx, dy)

    overrides = node.extra.get("overrides") or []
    by_id = {n.id: n for n, _, _ in _iter_nodes(subtree)}
    for entry in overrides:
        target = by_id.get(entry.get("id", ""))
        if target is None:
            continue
        if "characters" in entry and target.node_type == "TEXT":
            target.characters = entry["characters"]
        if "name" in entry:
            target.name = entry["name"]
        if "visible" in entry:
            target.visible = bool(entry["visible"])
    return subtree


def _iter_nodes(node: FigmaNode):
    yield node, 0, ()
    for child in node.children:
        yield from _iter_nodes(child)


def to_ir(doc: FigmaDocument) -> UiIr:
    """Convert a refined document into the IR. Pure and deterministic."""
    manifest: list[str] = []

    def register(path: str | None) -> None:
        if path and path not in manifest:
            manifest.append(path)

    def convert(node: FigmaNode, parent_box: Rect) -> IrNode | None:
        if not node.visible:
            return None
        if node.node_type == "INSTANCE" and not node.children:
            expanded = _inline_component(node, doc)
            if expanded is not None:
                return convert(expanded, parent_box)

        abs_box = node.bounding_box or Rect(parent_box.x, parent_box.y, 0.0, 0.0)
        rel_box = Rect(abs_box.x - parent_box.x, abs_box.y - parent_box.y,
                       abs_box.width, abs_box.height)
        style = _resolve_style(node, doc)

        if node.node_type == "TEXT":
            return IrNode(role=ROLE_TEXT, box=rel_box, style=style,
                          text=_text_content(node), name=node.name)

        image_ref = node.image_refs()[0] if node.image_refs() else None
        if image_ref is not None and not node.children:
            register(image_ref)
            return IrNode(role=ROLE_IMAGE, box=rel_box, style=style,
                          image_path=image_ref, name=node.name)

        if node.node_type not in CONTAINER_TYPES and node.node_type not in (
                "RECTANGLE", "ELLIPSE", "VECTOR", "STAR", "LINE",
                "REGULAR_POLYGON", "BOOLEAN_OPERATION", "SVG_ASSET"):
            logger.warning("unknown node type %r mapped to CONTAINER", node.node_type)

        if style.background_image:
            register(style.background_image)
        children = [convert(c, abs_box) for c in node.children]
        return IrNode(
            role=ROLE_CONTAINER,
            box=rel_box,
            layout=_layout_for(node),
            gap=float(node.extra.get("itemSpacing", 0.0)),
            padding=_padding_for(node),
            style=style,
            children=[c for c in children if c is not None],
            name=node.name,
        )

    root_abs = doc.root.bounding_box or Rect(0, 0, 0, 0)
    root = convert(doc.root, Rect(root_abs.x, root_abs.y, 0, 0))
    if root is None:  # hidden root still yields an empty page
        root = IrNode(role=ROLE_CONTAINER, box=Rect(0, 0, root_abs.width, root_abs.height))
    return UiIr(root=root, page_size=(root_abs.width, root_abs.height), asset_manifest=manifest)


# ---------------------------------------------------------------------------
# stacking recovery

def infer_stacking(children: list[Rect], tolerance: float = DEFAULT_STACK_TOLERANCE) -> str:
    """ROW/COLUMN when >= 2 sibling boxes stack cleanly on one axis, else NONE.

    A ROW needs left-to-right order without horizontal overlap (beyond the
    tolerance) and vertical centers aligned within the tolerance; COLUMN is
    symmetric.
    """
    if len(children) < 2:
        return "NONE"

    by_x = sorted(children, key=lambda b: (b.x, b.y))
    centers_y = [b.y + b.height / 2 for b in by_x]
    row = max(centers_y) - min(centers_y) <= tolerance and all(
        nxt.x + tolerance >= prev.x + prev.width
        for prev, nxt in zip(by_x, by_x[1:])
    )
    if row:
        return LAYOUT_ROW

    by_y = sorted(children, key=lambda b: (b.y, b.x))
    centers_x = [b.x + b.width / 2 for b in by_y]
    column = max(centers_x) - min(centers_x) <= tolerance and all(
        nxt.y + tolerance >= prev.y + prev.height
        for prev, nxt in zip(by_y, by_y[1:])
    )
    if column:
        return LAYOUT_COLUMN
    return "NONE"


# ---------------------------------------------------------------------------
# versioned JSON schema (the irgen <-> codegen <-> agent contract)

def _color_obj(color: RGBA | None):
    if color is None:
        return None
    return {"r": color.r, "g": color.g, "b": color.b, "a": color.a}


def _color_from(obj) -> RGBA | None:
    if obj is None:
        return None
    return RGBA(r=obj["r"], g=obj["g"], b=obj["b"], a=obj.get("a", 1.0))


def _node_to_obj(node: IrNode) -> dict:
    out: dict = {
        "role": node.role,
        "box": [node.box.x, node.box.y, node.box.width, node.box.height],
        "layout": node.layout,
    }
    if node.name:
        out["name"] = node.name
    if node.gap:
        out["gap"] = node.gap
    if any(node.padding):
        out["padding"] = list(node.padding)
    style = node.style
    style_obj: dict = {}
    if style.background is not None:
        style_obj["background"] = _color_obj(style.background)
    if style.background_image is not None:
        style_obj["backgroundImage"] = style.background_image
    if style.border is not None:
        style_obj["border"] = {"width": style.border.width, "color": _color_obj(style.border.color)}
    if style.radius:
        style_obj["radius"] = style.radius
    if style.shadow is not None:
        style_obj["shadow"] = {"x": style.shadow.x, "y": style.shadow.y,
                               "blur": style.shadow.blur, "color": _color_obj(style.shadow.color)}
    if style.opacity != 1.0:
        style_obj["opacity"] = style.opacity
    if style_obj:
        out["style"] = style_obj
    if node.text is not None:
        out["text"] = {
            "content": node.text.content,
            "fontSize": node.text.font_size,
            "weight": node.text.weight,
            "color": _color_obj(node.text.color),
            "align": node.text.align,
        }
    if node.image_path is not None:
        out["image"] = node.image_path
    if node.children:
        out["children"] = [_node_to_obj(c) for c in node.children]
    return out


def _node_from_obj(obj: dict) -> IrNode:
    box = obj.get("box", [0, 0, 0, 0])
    style_obj = obj.get("style", {})
    border_obj = style_obj.get("border")
    shadow_obj = style_obj.get("shadow")
    text_obj = obj.get("text")
    return IrNode(
        role=obj.get("role", ROLE_CONTAINER),
        box=Rect(*[float(v) for v in box]),
        layout=obj.get("layout", LAYOUT_ABSOLUTE),
        gap=float(obj.get("gap", 0.0)),
        padding=tuple(float(v) for v in obj.get("padding", (0.0, 0.0, 0.0, 0.0))),
        style=ResolvedStyle(
            background=_color_from(style_obj.get("background")),
            background_image=style_obj.get("backgroundImage"),
            border=Border(width=border_obj["width"], color=_color_from(border_obj["color"]))
            if border_obj else None,
            radius=float(style_obj.get("radius", 0.0)),
            shadow=Shadow(x=shadow_obj["x"], y=shadow_obj["y"], blur=shadow_obj["blur"],
                          color=_color_from(shadow_obj["color"])) if shadow_obj else None,
            opacity=float(style_obj.get("opacity", 1.0)),
        ),
        text=TextContent(
            content=text_obj["content"],
            font_size=float(text_obj.get("fontSize", 16.0)),
            weight=int(text_obj.get("weight", 400)),
            color=_color_from(text_obj.get("color")) or RGBA(0, 0, 0, 1),
            align=text_obj.get("align", "LEFT"),
        ) if text_obj else None,
        image_path=obj.get("image"),
        children=[_node_from_obj(c) for c in obj.get("children", [])],
        name=obj.get("name", ""),
    )


def ir_to_json(ir: UiIr) -> str:
    obj = {
        "ir_version": IR_VERSION,
        "page_size": [ir.page_size[0], ir.page_size[1]],
        "asset_manifest": list(ir.asset_manifest),
        "root": _node_to_obj(ir.root),
    }
    return json.dumps(obj, ensure_ascii=False, indent=2)


def ir_from_json(payload: str) -> UiIr:
    obj = json.loads(payload)
    version = obj.get("ir_version")
    if version != IR_VERSION:
        raise ValueError(f"unsupported ir_version {version!r}")
    return UiIr(
        root=_node_from_obj(obj["root"]),
        page_size=tuple(float(v) for v in obj.get("page_size", (0, 0))),
        asset_manifest=list(obj.get("asset_manifest", [])),
    )
