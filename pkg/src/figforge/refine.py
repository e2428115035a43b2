"""Metadata refinement: structure pruning/abstraction and asset integration.

Eight passes compose into :func:`refine`, each a pure tree-to-tree function:
invisible-node pruning, empty-shape pruning, occlusion pruning, single-child
flattening, editor-property stripping, icon abstraction, coordinate
standardization, and asset integration. The pipeline is idempotent and
render-preserving for the fixtures the generator can draw.
"""
from __future__ import annotations

import copy
import logging
import re
from dataclasses import dataclass, field, fields
from decimal import ROUND_HALF_UP, Decimal
from xml.sax.saxutils import quoteattr

from .errors import GeometryMissing, MissingAsset
from .model import (
    VECTOR_TYPES,
    AssetStore,
    FigmaDocument,
    FigmaNode,
    Paint,
    Rect,
    walk,
)

logger = logging.getLogger(__name__)

DEFAULT_STRIP_LIST = [
    "locked",
    "exportSettings",
    "pluginData",
    "sharedPluginData",
    "prototypeStartNodeID",
    "transitionNodeID",
    "interactions",
    "reactions",
]


@dataclass
class RefineConfig:
    decimal_places: int = 3
    editor_property_strip_list: list[str] = field(default_factory=lambda: list(DEFAULT_STRIP_LIST))
    icon_name_marker: str = "merge"
    occlusion_requires_full_cover: bool = True

    def __post_init__(self):
        if self.decimal_places < 0:
            raise ValueError("decimal_places must be >= 0")


@dataclass
class RefineReport:
    removed_invisible: int = 0
    removed_empty_shapes: int = 0
    removed_occluded: int = 0
    flattened_containers: int = 0
    stripped_properties: int = 0
    merged_icons: int = 0
    dedup_collapsed: int = 0
    before_nodes: int = 0
    after_nodes: int = 0

    def merge(self, delta: "RefineReport") -> None:
        for f in fields(self):
            if f.name not in ("before_nodes", "after_nodes"):
                setattr(self, f.name, getattr(self, f.name) + getattr(delta, f.name))


def _subtree_size(node: FigmaNode) -> int:
    return 1 + sum(_subtree_size(c) for c in node.children)


# ---------------------------------------------------------------------------
# node refinement

def prune_invisible(doc: FigmaDocument) -> tuple[FigmaDocument, RefineReport]:
    """Drop nodes hidden from rendering (visible false or opacity 0)."""
    doc = copy.deepcopy(doc)
    delta = RefineReport()

    def keep(node: FigmaNode) -> bool:
        return node.visible and node.opacity != 0.0

    def prune(node: FigmaNode) -> None:
        kept = []
        for child in node.children:
            if keep(child):
                prune(child)
                kept.append(child)
            else:
                delta.removed_invisible += _subtree_size(child)
        node.children = kept

    # the page root itself is never removed
    prune(doc.root)
    return doc, delta


def prune_empty_shapes(doc: FigmaDocument) -> tuple[FigmaDocument, RefineReport]:
    """Drop childless shape nodes that paint nothing (no fills, no strokes)."""
    doc = copy.deepcopy(doc)
    delta = RefineReport()

    def is_empty_shape(node: FigmaNode) -> bool:
        if node.children or node.is_container:
            return False
        if node.node_type in ("TEXT", "SVG_ASSET"):
            return False  # text is content; svg assets reference exported files
        return not node.fills and not node.strokes

    def prune(node: FigmaNode) -> None:
        kept = []
        for child in node.children:
            prune(child)
            if is_empty_shape(child):
                delta.removed_empty_shapes += 1
            else:
                kept.append(child)
        node.children = kept

    prune(doc.root)
    return doc, delta


def _effective_opacities(doc: FigmaDocument) -> dict[str, float]:
    out: dict[str, float] = {}

    def visit(node: FigmaNode, acc: float) -> None:
        # hidden nodes composite like fully transparent ones
        eff = acc * (node.opacity if node.visible else 0.0)
        out[node.id] = eff
        for child in node.children:
            visit(child, eff)

    visit(doc.root, 1.0)
    return out


def _is_opaque_cover(node: FigmaNode, effective_opacity: float) -> bool:
    if effective_opacity != 1.0:
        return False
    for paint in node.fills:
        if not paint.extra.get("visible", True):
            continue
        if paint.paint_type == "IMAGE":
            return True
        if paint.paint_type == "SOLID" and paint.color is not None and paint.color.a == 1.0:
            return True
    return False


def _union_covers(rect: Rect, covers: list[Rect]) -> bool:
    """Exact coverage of rect by a union of rectangles (coordinate sweep)."""
    xs = sorted({rect.x, rect.x + rect.width}
                | {max(rect.x, min(c.x, rect.x + rect.width)) for c in covers}
                | {max(rect.x, min(c.x + c.width, rect.x + rect.width)) for c in covers})
    ys = sorted({rect.y, rect.y + rect.height}
                | {max(rect.y, min(c.y, rect.y + rect.height)) for c in covers}
                | {max(rect.y, min(c.y + c.height, rect.y + rect.height)) for c in covers})
    for x0, x1 in zip(xs, xs[1:]):
        for y0, y1 in zip(ys, ys[1:]):
            if x1 <= x0 or y1 <= y0:
                continue
            cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
            if not any(c.x <= cx <= c.x + c.width and c.y <= cy <= c.y + c.height for c in covers):
                return False
    return True


def prune_occluded(doc: FigmaDocument, config: RefineConfig | None = None) -> tuple[FigmaDocument, RefineReport]:
    """Drop nodes fully hidden behind opaque elements above them in z-order.

    Covers accumulate along a reverse Z-order traversal. With the default
    single-cover semantics a node is hidden only when one opaque box contains
    it; with occlusion_requires_full_cover=False the union of covers counts.
    A subtree is removed only when every node in it is hidden, so content
    overflowing its parent is never lost.
    """
    config = config or RefineConfig()
    doc = copy.deepcopy(doc)
    delta = RefineReport()

    for node, _, _ in walk(doc, "PRE"):
        if node.visible and node.bounding_box is None:
            raise GeometryMissing(f"visible node {node.id!r} has no bounding box")

    eff = _effective_opacities(doc)
    covers: list[Rect] = []
    hidden: set[str] = set()
    for node, _, _ in walk(doc, "REVERSE_Z"):
        box = node.bounding_box
        if node is not doc.root and box is not None:
            if any(c.contains(box) for c in covers):
                hidden.add(node.id)
            elif not config.occlusion_requires_full_cover and covers and _union_covers(box, covers):
                hidden.add(node.id)
        if node.id not in hidden and _is_opaque_cover(node, eff[node.id]):
            covers.append(box)

    def fully_hidden(node: FigmaNode) -> bool:
        return node.id in hidden and all(fully_hidden(c) for c in node.children)

    def prune(node: FigmaNode) -> None:
        kept = []
        for child in node.children:
            if fully_hidden(child):
                delta.removed_occluded += _subtree_size(child)
            else:
                prune(child)
                kept.append(child)
        node.children = kept

    prune(doc.root)
    return doc, delta


# ---------------------------------------------------------------------------
# layer refinement

def _has_own_style(node: FigmaNode) -> bool:
    if node.fills or node.strokes or node.effects or node.corner_radius is not None:
        return True
    # legacy frame backgrounds live in extra
    return "background" in node.extra or "backgroundColor" in node.extra


def flatten_layers(doc: FigmaDocument) -> tuple[FigmaDocument, RefineReport]:
    """Remove style-free FRAME/GROUP wrappers around a single child (to fixpoint).

    The promoted child keeps its absolute geometry; the wrapper's opacity is
    multiplied into the child so compositing is unchanged.
    """
    doc = copy.deepcopy(doc)
    delta = RefineReport()

    def flatten(node: FigmaNode) -> FigmaNode:
        node.children = [flatten(c) for c in node.children]
        while (
            node.node_type in ("FRAME", "GROUP")
            and len(node.children) == 1
            and not _has_own_style(node)
        ):
            child = node.children[0]
            child.opacity = child.opacity * node.opacity
            delta.flattened_containers += 1
            node = child
        return node

    # the page root keeps its level; only descendants are flattened
    doc.root.children = [flatten(c) for c in doc.root.children]
    return doc, delta


def strip_editor_properties(doc: FigmaDocument, config: RefineConfig | None = None) -> tuple[FigmaDocument, RefineReport]:
    """Remove editor-only properties from every node's extra bag."""
    config = config or RefineConfig()
    doc = copy.deepcopy(doc)
    delta = RefineReport()
    strip = set(config.editor_property_strip_list)
    for node, _, _ in walk(doc, "PRE"):
        for key in strip & node.extra.keys():
            del node.extra[key]
            delta.stripped_properties += 1
    return doc, delta


# ---------------------------------------------------------------------------
# asset abstraction

def _node_qualifies_as_icon_part(node: FigmaNode, marker: str) -> bool:
    if node.node_type in ("TEXT", "SVG_ASSET"):
        return False
    if node.image_refs():
        return False  # integrated image rectangles stay as-is (idempotence)
    return node.node_type in VECTOR_TYPES or marker in node.name


def _subtree_is_icon(node: FigmaNode, marker: str) -> bool:
    if node.children:
        self_ok = _node_qualifies_as_icon_part(node, marker) or node.node_type in ("FRAME", "GROUP")
        return self_ok and all(_subtree_is_icon(c, marker) for c in node.children)
    return _node_qualifies_as_icon_part(node, marker)


def _union_box(node: FigmaNode) -> Rect | None:
    boxes = [n.bounding_box for n, _, _ in walk(node, "PRE") if n.bounding_box is not None]
    if not boxes:
        return None
    x0 = min(b.x for b in boxes)
    y0 = min(b.y for b in boxes)
    x1 = max(b.x + b.width for b in boxes)
    y1 = max(b.y + b.height for b in boxes)
    return Rect(x0, y0, x1 - x0, y1 - y0)


def _first_solid_hex(node: FigmaNode, default: str = "#CCCCCC") -> str:
    for paint in node.fills:
        if paint.paint_type == "SOLID" and paint.color is not None:
            return paint.color.to_hex()
    for paint in node.strokes:
        if paint.paint_type == "SOLID" and paint.color is not None:
            return paint.color.to_hex()
    return default


def export_icon_svg(subtree: FigmaNode) -> bytes:
    """Standalone SVG for an icon subtree, sized to its bounding box.

    Embeds raw vector path data when a leaf carries it; otherwise each leaf
    becomes a placeholder shape matching its node type and fill color.
    """
    box = subtree.bounding_box or _union_box(subtree) or Rect(0, 0, 0, 0)
    width = max(box.width, 1.0)
    height = max(box.height, 1.0)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">'
    ]
    for leaf, _, _ in walk(subtree, "PRE"):
        if leaf.children:
            continue
        lbox = leaf.bounding_box or box
        x = lbox.x - box.x
        y = lbox.y - box.y
        w = max(lbox.width, 1.0)
        h = max(lbox.height, 1.0)
        fill = _first_solid_hex(leaf)
        paths = leaf.extra.get("vectorPaths") or leaf.extra.get("fillGeometry")
        if paths:
            for entry in paths:
                d = entry.get("path") or entry.get("data") if isinstance(entry, dict) else entry
                if d:
                    parts.append(f'<path d={quoteattr(str(d))} fill="{fill}"/>')
            continue
        if leaf.node_type == "ELLIPSE":
            parts.append(
                f'<ellipse cx="{_fmt(x + w / 2)}" cy="{_fmt(y + h / 2)}" '
                f'rx="{_fmt(w / 2)}" ry="{_fmt(h / 2)}" fill="{fill}"/>'
            )
        elif leaf.node_type == "LINE":
            parts.append(
                f'<line x1="{_fmt(x)}" y1="{_fmt(y)}" x2="{_fmt(x + w)}" '
                f'y2="{_fmt(y + h)}" stroke="{fill}"/>'
            )
        else:
            parts.append(
                f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" '
                f'height="{_fmt(h)}" fill="{fill}"/>'
            )
    parts.append("</svg>")
    return "".join(parts).encode("utf-8")


def _fmt(value: float) -> str:
    return f"{value:g}"


def abstract_icons(doc: FigmaDocument, config: RefineConfig | None = None) -> tuple[FigmaDocument, RefineReport]:
    """Replace maximal icon-like subtrees with single SVG_ASSET nodes.

    The generated SVG travels in the node's extra under ``svg`` until
    integrate_assets moves it into the store.
    """
    config = config or RefineConfig()
    doc = copy.deepcopy(doc)
    delta = RefineReport()

    def to_asset(node: FigmaNode) -> FigmaNode:
        svg = export_icon_svg(node)
        delta.merged_icons += 1
        return FigmaNode(
            id=node.id,
            name=node.name,
            node_type="SVG_ASSET",
            opacity=node.opacity,
            bounding_box=node.bounding_box or _union_box(node),
            extra={"svg": svg.decode("utf-8")},
        )

    def visit(node: FigmaNode) -> FigmaNode:
        if node is not doc.root and _subtree_is_icon(node, config.icon_name_marker):
            return to_asset(node)
        node.children = [visit(c) for c in node.children]
        return node

    visit(doc.root)
    return doc, delta


# ---------------------------------------------------------------------------
# coordinate standardization

def _round_half_away(value: float, places: int) -> float:
    quantum = Decimal(1).scaleb(-places)
    return float(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def relativize_and_round(doc: FigmaDocument, config: RefineConfig | None = None) -> FigmaDocument:
    """Re-express coordinates relative to the page root and round all
    geometry/style floats half-away-from-zero to the configured precision."""
    config = config or RefineConfig()
    doc = copy.deepcopy(doc)
    places = config.decimal_places

    def rnd(v: float) -> float:
        return _round_half_away(v, places)

    root_box = doc.root.bounding_box
    ox, oy = (root_box.x, root_box.y) if root_box is not None else (0.0, 0.0)

    for node, _, _ in walk(doc, "PRE"):
        if node.bounding_box is not None:
            b = node.bounding_box
            b.x = rnd(b.x - ox)
            b.y = rnd(b.y - oy)
            b.width = rnd(b.width)
            b.height = rnd(b.height)
        node.opacity = rnd(node.opacity)
        if node.corner_radius is not None:
            node.corner_radius = rnd(node.corner_radius)
        if node.text_style is not None and node.text_style.font_size is not None:
            node.text_style.font_size = rnd(node.text_style.font_size)
        for paint in node.fills + node.strokes:
            if paint.color is not None:
                paint.color.r = rnd(paint.color.r)
                paint.color.g = rnd(paint.color.g)
                paint.color.b = rnd(paint.color.b)
                paint.color.a = rnd(paint.color.a)
        for effect in node.effects:
            effect.offset = (rnd(effect.offset[0]), rnd(effect.offset[1]))
            effect.radius = rnd(effect.radius)
            if effect.color is not None:
                effect.color.r = rnd(effect.color.r)
                effect.color.g = rnd(effect.color.g)
                effect.color.b = rnd(effect.color.b)
                effect.color.a = rnd(effect.color.a)
    return doc


# ---------------------------------------------------------------------------
# asset collection and integration

def _slugify(name: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-")
    return slug or "asset"


def _ext_for(kind: str) -> str:
    return "svg" if kind == "SVG" else "png"


def integrate_assets(doc: FigmaDocument, store: AssetStore) -> tuple[FigmaDocument, AssetStore, RefineReport]:
    """Localize every image reference and collapse duplicate asset content.

    Same-name byte-identical assets share one file; SVG_ASSET nodes become
    RECTANGLEs with an IMAGE fill pointing at the exported SVG. Component,
    component-set, and style definitions already ride on the document and
    are serialized with it, keeping each sample self-contained.
    """
    doc = copy.deepcopy(doc)
    new_store = AssetStore(
        assets=dict(store.assets),
        dedup_map=dict(store.dedup_map),
        kinds=dict(store.kinds),
    )
    delta = RefineReport()

    # convert abstracted icons into standard image rectangles first
    pending_svg: dict[str, bytes] = {}
    for node, _, _ in walk(doc, "PRE"):
        if node.node_type == "SVG_ASSET":
            svg_text = node.extra.pop("svg", None)
            svg = svg_text.encode("utf-8") if svg_text else export_icon_svg(node)
            ref = f"svgasset:{node.id}"
            pending_svg[ref] = svg
            node.node_type = "RECTANGLE"
            node.fills = [Paint(paint_type="IMAGE", image_ref=ref, raw_type="IMAGE")]

    # gather references in document order, grouped by owning node name
    entries: list[tuple[str, str, bytes, str]] = []  # (ref, name, bytes, kind)
    seen_refs: set[str] = set()
    for node, _, _ in walk(doc, "PRE"):
        for paint in node.fills + node.strokes:
            if paint.paint_type != "IMAGE" or not paint.image_ref:
                continue
            ref = paint.image_ref
            if ref.startswith("assets/"):
                if ref not in new_store.assets:
                    raise MissingAsset(ref)
                continue  # already integrated
            if ref in seen_refs:
                continue
            seen_refs.add(ref)
            if ref in pending_svg:
                data, kind = pending_svg[ref], "SVG"
            else:
                key = new_store.lookup_ref(ref)
                if key is None:
                    raise MissingAsset(ref)
                data = new_store.assets.pop(key)
                kind = new_store.kinds.pop(key, AssetStore.sniff_kind(data))
            entries.append((ref, node.name, data, kind))

    # same name + same bytes collapse to one file; distinct content keeps
    # distinct suffixed paths
    assigned: dict[str, str] = {}  # ref -> local path
    used_paths: set[str] = set(new_store.assets)
    by_name: dict[str, list[tuple[str, bytes, str]]] = {}
    for ref, name, data, kind in entries:
        by_name.setdefault(name, []).append((ref, data, kind))
    for name, group in by_name.items():
        primary_for_content: dict[bytes, str] = {}
        for ref, data, kind in group:
            if data in primary_for_content:
                primary = primary_for_content[data]
                new_store.dedup_map[ref] = primary
                assigned[ref] = assigned[primary]
                delta.dedup_collapsed += 1
                continue
            primary_for_content[data] = ref
            base = _slugify(name)
            ext = _ext_for(kind)
            path = f"assets/{base}.{ext}"
            serial = 2
            while path in used_paths:
                path = f"assets/{base}-{serial}.{ext}"
                serial += 1
            used_paths.add(path)
            assigned[ref] = path
            new_store.put(path, data, kind)

    for node, _, _ in walk(doc, "PRE"):
        for paint in node.fills + node.strokes:
            if paint.paint_type == "IMAGE" and paint.image_ref in assigned:
                paint.image_ref = assigned[paint.image_ref]

    return doc, new_store, delta


# ---------------------------------------------------------------------------
# full pipeline

def refine(
    doc: FigmaDocument,
    store: AssetStore | None = None,
    config: RefineConfig | None = None,
) -> tuple[FigmaDocument, AssetStore, RefineReport]:
    """Run the full refinement pipeline and aggregate per-pass counts."""
    config = config or RefineConfig()
    store = store or AssetStore()
    report = RefineReport(before_nodes=doc.node_count())

    doc, delta = prune_invisible(doc)
    report.merge(delta)
    doc, delta = prune_empty_shapes(doc)
    report.merge(delta)
    doc, delta = prune_occluded(doc, config)
    report.merge(delta)
    doc, delta = flatten_layers(doc)
    report.merge(delta)
    doc, delta = strip_editor_properties(doc, config)
    report.merge(delta)
    doc, delta = abstract_icons(doc, config)
    report.merge(delta)
    doc = relativize_and_round(doc, config)
    doc, store, delta = integrate_assets(doc, store)
    report.merge(delta)

    report.after_nodes = doc.node_count()
    return doc, store, report
