"""Deterministic rule-based templating from the IR to one HTML document
styled with Tailwind utility classes.

Two modes expose the fidelity-vs-quality tension:

- FAITHFUL_ABSOLUTE reproduces exact pixel geometry: every element is
  absolutely positioned with arbitrary-px classes and non-semantic tags.
- RESPONSIVE_FLOW emits flex flow (recovering stacking for layout-free
  containers), snaps to the spacing scale and palette, and applies the
  semantic tagging heuristic. It never emits absolute positioning.
"""
from __future__ import annotations

import html as html_escape
from dataclasses import dataclass, field
from urllib.parse import quote

from .errors import EmptyIr, MissingAsset
from .ir import (
    LAYOUT_COLUMN,
    LAYOUT_ROW,
    IrNode,
    UiIr,
    infer_stacking,
)
from .model import RGBA
from .tailwind import format_px, snap_color, snap_to_spacing_scale

FAITHFUL_ABSOLUTE = "FAITHFUL_ABSOLUTE"
RESPONSIVE_FLOW = "RESPONSIVE_FLOW"

TAILWIND_CDN = "https://cdn.tailwindcss.com"

_TEXT_SIZE_PX = {"xs": 12, "sm": 14, "base": 16, "lg": 18, "xl": 20, "2xl": 24,
                 "3xl": 30, "4xl": 36, "5xl": 48, "6xl": 60, "7xl": 72,
                 "8xl": 96, "9xl": 128}
_WEIGHT_NAMES = {100: "thin", 200: "extralight", 300: "light", 400: "normal",
                 500: "medium", 600: "semibold", 700: "bold", 800: "extrabold",
                 900: "black"}
_RADIUS_STEPS = {2: "rounded-sm", 4: "rounded", 6: "rounded-md", 8: "rounded-lg",
                 12: "rounded-xl", 16: "rounded-2xl", 24: "rounded-3xl"}
_ALIGN = {"LEFT": "text-left", "CENTER": "text-center", "RIGHT": "text-right",
          "JUSTIFIED": "text-justify"}


@dataclass
class CodegenConfig:
    mode: str = RESPONSIVE_FLOW
    spacing_snap_tolerance: float = 1.0
    palette_snap_distance: float = 8.0
    semantic_tagging: bool = True

    def __post_init__(self):
        if self.spacing_snap_tolerance < 0 or self.palette_snap_distance < 0:
            raise ValueError("tolerances must be >= 0")
        if self.mode not in (FAITHFUL_ABSOLUTE, RESPONSIVE_FLOW):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class GeneratedPage:
    html: str
    asset_refs_used: set[str] = field(default_factory=set)


@dataclass
class TagContext:
    """Page-level facts the tagging heuristic needs beyond the node itself."""

    page_size: tuple[float, float]
    font_sizes_desc: list[float]
    abs_pos: tuple[float, float] = (0.0, 0.0)
    parent_tag: str = ""
    ancestors: tuple[str, ...] = ()
    is_root_child: bool = False
    is_largest_root_child: bool = False


def choose_semantic_tag(node: IrNode, context: TagContext) -> str:
    """Deterministic tag choice: page bands to header/footer/main, repeated
    equal cards to ul/li, text by font-size rank to h1/h2/h3/p, else div."""
    if node.role == "IMAGE":
        return "img"
    if node.role == "TEXT":
        sizes = context.font_sizes_desc
        size = node.text.font_size if node.text else 16.0
        rank = sizes.index(size) if size in sizes else len(sizes)
        return ("h1", "h2", "h3")[rank] if rank < 3 else "p"

    if context.parent_tag == "ul":
        return "li"
    page_w, page_h = context.page_size
    x, y = context.abs_pos
    if context.is_root_child and page_w > 0 and page_h > 0:
        full_width = node.box.width >= 0.9 * page_w
        if full_width and y <= 0.02 * page_h:
            return "header"
        if full_width and y + node.box.height >= 0.98 * page_h:
            return "footer"
        if context.is_largest_root_child:
            return "main"
    equal_children = _equal_size_container_children(node)
    if equal_children >= 3:
        return "ul"
    return "div"


def _equal_size_container_children(node: IrNode) -> int:
    sizes: dict[tuple[float, float], int] = {}
    for child in node.children:
        if child.role == "CONTAINER":
            key = (round(child.box.width, 1), round(child.box.height, 1))
            sizes[key] = sizes.get(key, 0) + 1
    return max(sizes.values(), default=0)


# ---------------------------------------------------------------------------
# class builders

def _color_suffix(color: RGBA, config: CodegenConfig) -> str:
    return snap_color(color.to_rgb255(), config.palette_snap_distance)


def _dim(prefix: str, px: float, config: CodegenConfig, snap: bool) -> str:
    if snap:
        return f"{prefix}-{snap_to_spacing_scale(max(px, 0.0), config.spacing_snap_tolerance)}"
    return f"{prefix}-[{format_px(max(px, 0.0))}px]"


def _style_classes(node: IrNode, config: CodegenConfig, snap: bool) -> list[str]:
    classes: list[str] = []
    style = node.style
    if style.background is not None and style.background.a > 0:
        classes.append(f"bg-{_color_suffix(style.background, config)}")
    if style.border is not None:
        width = style.border.width
        if width in (1, 2, 4, 8):
            classes.append("border" if width == 1 else f"border-{format_px(width)}")
        else:
            classes.append(f"border-[{format_px(width)}px]")
        classes.append(f"border-{_color_suffix(style.border.color, config)}")
    if style.radius > 0:
        min_side = min(node.box.width, node.box.height)
        if min_side > 0 and style.radius >= min_side / 2:
            classes.append("rounded-full")
        elif snap and round(style.radius) in _RADIUS_STEPS and abs(style.radius - round(style.radius)) <= config.spacing_snap_tolerance:
            classes.append(_RADIUS_STEPS[round(style.radius)])
        else:
            classes.append(f"rounded-[{format_px(style.radius)}px]")
    if style.shadow is not None:
        classes.append("shadow")
    if style.opacity != 1.0:
        percent = style.opacity * 100
        if percent == int(percent) and int(percent) % 5 == 0:
            classes.append(f"opacity-{int(percent)}")
        else:
            classes.append(f"opacity-[{style.opacity:g}]")
    return classes


def _text_classes(node: IrNode, config: CodegenConfig, snap: bool) -> list[str]:
    text = node.text
    classes: list[str] = []
    size = text.font_size
    if snap:
        named = next((name for name, px in _TEXT_SIZE_PX.items()
                      if abs(px - size) <= config.spacing_snap_tolerance), None)
        classes.append(f"text-{named}" if named else f"text-[{format_px(size)}px]")
    else:
        classes.append(f"text-[{format_px(size)}px]")
    weight = min(_WEIGHT_NAMES, key=lambda w: (abs(w - text.weight), w))
    if weight != 400:
        classes.append(f"font-{_WEIGHT_NAMES[weight]}")
    if text.color.to_rgb255() != (0, 0, 0) or text.color.a != 1.0:
        classes.append(f"text-{_color_suffix(text.color, config)}")
    align = _ALIGN.get(text.align, "")
    if align and align != "text-left":
        classes.append(align)
    return classes


def _padding_classes(node: IrNode, config: CodegenConfig) -> list[str]:
    top, right, bottom, left = node.padding
    if not any(node.padding):
        return []
    tol = config.spacing_snap_tolerance
    if top == right == bottom == left:
        return [f"p-{snap_to_spacing_scale(top, tol)}"]
    classes = []
    if top == bottom and top:
        classes.append(f"py-{snap_to_spacing_scale(top, tol)}")
    else:
        if top:
            classes.append(f"pt-{snap_to_spacing_scale(top, tol)}")
        if bottom:
            classes.append(f"pb-{snap_to_spacing_scale(bottom, tol)}")
    if left == right and left:
        classes.append(f"px-{snap_to_spacing_scale(left, tol)}")
    else:
        if left:
            classes.append(f"pl-{snap_to_spacing_scale(left, tol)}")
        if right:
            classes.append(f"pr-{snap_to_spacing_scale(right, tol)}")
    return classes


# ---------------------------------------------------------------------------
# emission

def _escape_text(text: str) -> str:
    return html_escape.escape(text, quote=False)


def _escape_src(path: str) -> str:
    return quote(path, safe="/-_.~")


class _Emitter:
    def __init__(self, ir: UiIr, config: CodegenConfig):
        self.ir = ir
        self.config = config
        self.used: set[str] = set()
        self.lines: list[str] = []
        self.faithful = config.mode == FAITHFUL_ABSOLUTE
        self.tagging = config.semantic_tagging and not self.faithful
        font_sizes = sorted(
            {n.text.font_size for n in ir.root.iter() if n.role == "TEXT" and n.text},
            reverse=True,
        )
        self.font_sizes_desc = font_sizes
        areas = [c.box.width * c.box.height for c in ir.root.children if c.role == "CONTAINER"]
        self.largest_root_child_area = max(areas, default=0.0)

    # -- tags ----------------------------------------------------------------
    def tag_for(self, node: IrNode, parent_tag: str, ancestors: tuple[str, ...],
                abs_pos: tuple[float, float], is_root_child: bool) -> str:
        if node.role == "IMAGE":
            return "img"
        if not self.tagging:
            return "div"
        context = TagContext(
            page_size=self.ir.page_size,
            font_sizes_desc=self.font_sizes_desc,
            abs_pos=abs_pos,
            parent_tag=parent_tag,
            ancestors=ancestors,
            is_root_child=is_root_child,
            is_largest_root_child=(
                is_root_child and node.role == "CONTAINER"
                and node.box.width * node.box.height == self.largest_root_child_area
                and self.largest_root_child_area > 0
            ),
        )
        return choose_semantic_tag(node, context)

    # -- faithful mode ---------------------------------------------------------
    def emit_faithful(self, node: IrNode, depth: int, positioned: bool) -> None:
        pad = "  " * depth
        classes = []
        if positioned:
            classes += [
                "absolute",
                f"left-[{format_px(node.box.x)}px]",
                f"top-[{format_px(node.box.y)}px]",
            ]
        classes += [
            f"w-[{format_px(node.box.width)}px]",
            f"h-[{format_px(node.box.height)}px]",
        ]
        classes += _style_classes(node, self.config, snap=False)

        if node.role == "IMAGE":
            self._check_asset(node.image_path)
            self.lines.append(
                f'{pad}<img src="{_escape_src(node.image_path)}" alt="{_escape_text(node.name)}" '
                f'class="{" ".join(classes)}">'
            )
            return
        if node.role == "TEXT":
            classes += _text_classes(node, self.config, snap=False)
            self.lines.append(
                f'{pad}<div class="{" ".join(classes)}">{_escape_text(node.text.content)}</div>'
            )
            return
        if node.style.background_image:
            self._check_asset(node.style.background_image)
            classes.append(f"bg-[url('{_escape_src(node.style.background_image)}')]")
        if not node.children:
            self.lines.append(f'{pad}<div class="{" ".join(classes)}"></div>')
            return
        self.lines.append(f'{pad}<div class="{" ".join(classes)}">')
        for child in node.children:
            self.emit_faithful(child, depth + 1, positioned=True)
        self.lines.append(f"{pad}</div>")

    # -- responsive mode ---------------------------------------------------------
    def flow_layout(self, node: IrNode) -> tuple[str, list[IrNode], float]:
        """(axis, ordered children, gap) for a container in flow mode."""
        if node.layout in (LAYOUT_ROW, LAYOUT_COLUMN):
            gaps = node.gap
            return node.layout, list(node.children), gaps
        inferred = infer_stacking([c.box for c in node.children])
        if inferred == LAYOUT_ROW:
            ordered = sorted(node.children, key=lambda c: (c.box.x, c.box.y))
            gaps = [nxt.box.x - (prev.box.x + prev.box.width)
                    for prev, nxt in zip(ordered, ordered[1:])]
            return LAYOUT_ROW, ordered, max(min(gaps, default=0.0), 0.0)
        if inferred == LAYOUT_COLUMN:
            ordered = sorted(node.children, key=lambda c: (c.box.y, c.box.x))
            gaps = [nxt.box.y - (prev.box.y + prev.box.height)
                    for prev, nxt in zip(ordered, ordered[1:])]
            return LAYOUT_COLUMN, ordered, max(min(gaps, default=0.0), 0.0)
        # recovery failed: stack top-to-bottom in document order, never absolute
        return LAYOUT_COLUMN, list(node.children), 0.0

    def emit_flow(self, node: IrNode, depth: int, parent_tag: str,
                  ancestors: tuple[str, ...], abs_pos: tuple[float, float],
                  is_root_child: bool) -> None:
        pad = "  " * depth
        tag = self.tag_for(node, parent_tag, ancestors, abs_pos, is_root_child)
        tol = self.config.spacing_snap_tolerance

        if node.role == "IMAGE":
            self._check_asset(node.image_path)
            classes = [
                _dim("w", node.box.width, self.config, snap=True),
                _dim("h", node.box.height, self.config, snap=True),
            ] + _style_classes(node, self.config, snap=True)
            self.lines.append(
                f'{pad}<img src="{_escape_src(node.image_path)}" alt="{_escape_text(node.name)}" '
                f'class="{" ".join(classes)}">'
            )
            return
        if node.role == "TEXT":
            classes = _text_classes(node, self.config, snap=True)
            attr = f' class="{" ".join(classes)}"' if classes else ""
            self.lines.append(f"{pad}<{tag}{attr}>{_escape_text(node.text.content)}</{tag}>")
            return

        classes: list[str] = []
        if node.children:
            axis, ordered, gap = self.flow_layout(node)
            classes.append("flex")
            classes.append("flex-row" if axis == LAYOUT_ROW else "flex-col")
            if gap > 0:
                classes.append(f"gap-{snap_to_spacing_scale(gap, tol)}")
            classes += _padding_classes(node, self.config)
            if is_root_child and node.box.width >= 0.9 * self.ir.page_size[0]:
                classes.append("w-full")
        else:
            ordered = []
            classes += [
                _dim("w", node.box.width, self.config, snap=True),
                _dim("h", node.box.height, self.config, snap=True),
            ]
        classes += _style_classes(node, self.config, snap=True)
        if node.style.background_image:
            self._check_asset(node.style.background_image)
            classes += ["bg-cover", f"bg-[url('{_escape_src(node.style.background_image)}')]"]

        attr = f' class="{" ".join(classes)}"' if classes else ""
        if not ordered:
            self.lines.append(f"{pad}<{tag}{attr}></{tag}>")
            return
        self.lines.append(f"{pad}<{tag}{attr}>")
        child_ancestors = ancestors + (tag,)
        for child in ordered:
            child_abs = (abs_pos[0] + child.box.x, abs_pos[1] + child.box.y)
            self.emit_flow(child, depth + 1, tag, child_ancestors, child_abs,
                           is_root_child=(node is self.ir.root))
        self.lines.append(f"{pad}</{tag}>")

    def _check_asset(self, path: str | None) -> None:
        if not path:
            raise MissingAsset("<unset>")
        if path not in self.ir.asset_manifest:
            raise MissingAsset(path)
        self.used.add(path)


def generate(ir: UiIr, config: CodegenConfig | None = None) -> GeneratedPage:
    """Render the IR to a complete Tailwind page. Fully deterministic."""
    config = config or CodegenConfig()
    if ir is None or ir.root is None:
        raise EmptyIr("IR has no root node")

    emitter = _Emitter(ir, config)
    root = ir.root

    if config.mode == FAITHFUL_ABSOLUTE:
        body_classes = [
            "relative",
            f"w-[{format_px(root.box.width)}px]",
            f"h-[{format_px(root.box.height)}px]",
        ] + _style_classes(root, config, snap=False)
        for child in root.children:
            emitter.emit_faithful(child, 1, positioned=True)
    else:
        body_classes = []
        if root.children:
            axis, ordered, gap = emitter.flow_layout(root)
            body_classes += ["flex", "flex-row" if axis == LAYOUT_ROW else "flex-col"]
            if gap > 0:
                body_classes.append(f"gap-{snap_to_spacing_scale(gap, config.spacing_snap_tolerance)}")
            body_classes += _padding_classes(root, config)
        else:
            ordered = []
        body_classes += _style_classes(root, config, snap=True)
        for child in (ordered if root.children else []):
            emitter.emit_flow(child, 1, "body", ("body",),
                              (child.box.x, child.box.y), is_root_child=True)

    if root.style.background_image:
        emitter._check_asset(root.style.background_image)
        body_classes.append(f"bg-[url('{_escape_src(root.style.background_image)}')]")

    title = _escape_text(root.name or "Generated Page")
    body_attr = f' class="{" ".join(body_classes)}"' if body_classes else ""
    html = "\n".join([
        "<!DOCTYPE html>",
        '<html lang="en">',
        "<head>",
        '  <meta charset="UTF-8">',
        '  <meta name="viewport" content="width=device-width, initial-scale=1.0">',
        f'  <script src="{TAILWIND_CDN}"></script>',
        f"  <title>{title}</title>",
        "</head>",
        f"<body{body_attr}>",
        *emitter.lines,
        "</body>",
        "</html>",
        "",
    ])
    return GeneratedPage(html=html, asset_refs_used=emitter.used)
