"""Fallback screenshot command for generated pages.

Paints the absolute-geometry HTML subset the faithful generator emits
(boxes, borders, images, icon SVGs, text) onto a PNG, so the render-based
checks run without a browser. Invoke as:

    python3 -m figforge.boxrender <input_url> <width> <height> <output_png>

matching the renderer command-template contract. A real headless browser can
be configured instead; this renderer intentionally ignores flow layout.
"""
from __future__ import annotations

import argparse
import sys
import xml.etree.ElementTree as ET
from pathlib import Path
from urllib.parse import unquote, urlparse

from PIL import Image, ImageDraw, ImageFont

from .htmlmodel import HtmlDocumentModel, HtmlElement, parse_html
from .tailwind import PALETTE

_TEXT_SIZE_PX = {"xs": 12, "sm": 14, "base": 16, "lg": 18, "xl": 20, "2xl": 24,
                 "3xl": 30, "4xl": 36, "5xl": 48, "6xl": 60, "7xl": 72,
                 "8xl": 96, "9xl": 128}


def _px_payload(value: str) -> float | None:
    if value.startswith("[") and value.endswith("px]"):
        try:
            return float(value[1:-3])
        except ValueError:
            return None
    return None


def _class_value(element: HtmlElement, prefix: str) -> str | None:
    for name in element.class_names():
        if name.startswith(prefix):
            return name[len(prefix):]
    return None


def _color_value(value: str) -> tuple[int, int, int, int] | None:
    if value.startswith("[#") and value.endswith("]"):
        payload = value[2:-1]
        if len(payload) == 3:
            payload = "".join(ch * 2 for ch in payload)
        if len(payload) == 6:
            try:
                r, g, b = (int(payload[i:i + 2], 16) for i in (0, 2, 4))
                return (r, g, b, 255)
            except ValueError:
                return None
        return None
    if value in PALETTE:
        return PALETTE[value] + (255,)
    return None


def _hex_to_rgba(value: str) -> tuple[int, int, int, int] | None:
    value = value.lstrip("#")
    if len(value) == 3:
        value = "".join(ch * 2 for ch in value)
    if len(value) != 6:
        return None
    try:
        return tuple(int(value[i:i + 2], 16) for i in (0, 2, 4)) + (255,)
    except ValueError:
        return None


def _opacity(element: HtmlElement) -> float:
    for name in element.class_names():
        if name.startswith("opacity-"):
            value = name[len("opacity-"):]
            if value.startswith("[") and value.endswith("]"):
                try:
                    return float(value[1:-1])
                except ValueError:
                    return 1.0
            try:
                return int(value) / 100.0
            except ValueError:
                return 1.0
    return 1.0


def _geometry(element: HtmlElement) -> tuple[float, float, float, float] | None:
    w = _px_payload(_class_value(element, "w-") or "")
    h = _px_payload(_class_value(element, "h-") or "")
    if w is None or h is None:
        return None
    x = _px_payload(_class_value(element, "left-") or "") or 0.0
    y = _px_payload(_class_value(element, "top-") or "") or 0.0
    return (x, y, w, h)


def _radius(element: HtmlElement, w: float, h: float) -> float:
    if "rounded-full" in element.class_names():
        return min(w, h) / 2
    value = _class_value(element, "rounded-")
    if value:
        return _px_payload(value) or 0.0
    return 0.0


class _Painter:
    def __init__(self, width: int, height: int, scale: float, base_dir: Path):
        self.canvas = Image.new("RGBA", (max(width, 1), max(height, 1)), (255, 255, 255, 255))
        self.scale = scale
        self.base_dir = base_dir

    def _blend(self, layer: Image.Image) -> None:
        self.canvas = Image.alpha_composite(self.canvas, layer)

    def _layer(self) -> tuple[Image.Image, ImageDraw.ImageDraw]:
        layer = Image.new("RGBA", self.canvas.size, (0, 0, 0, 0))
        return layer, ImageDraw.Draw(layer)

    def rect(self, box, color, radius: float, opacity: float) -> None:
        if color is None or opacity <= 0:
            return
        x, y, w, h = (v * self.scale for v in box)
        if w <= 0 or h <= 0:
            return
        r, g, b, a = color
        alpha = int(round(a * opacity))
        layer, draw = self._layer()
        xy = (round(x), round(y), round(x + w), round(y + h))
        if radius > 0:
            draw.rounded_rectangle(xy, radius=radius * self.scale, fill=(r, g, b, alpha))
        else:
            draw.rectangle(xy, fill=(r, g, b, alpha))
        self._blend(layer)

    def outline(self, box, color, width_px: float, radius: float, opacity: float) -> None:
        if color is None or width_px <= 0 or opacity <= 0:
            return
        x, y, w, h = (v * self.scale for v in box)
        r, g, b, a = color
        alpha = int(round(a * opacity))
        layer, draw = self._layer()
        xy = (round(x), round(y), round(x + w), round(y + h))
        stroke = max(1, round(width_px * self.scale))
        if radius > 0:
            draw.rounded_rectangle(xy, radius=radius * self.scale,
                                   outline=(r, g, b, alpha), width=stroke)
        else:
            draw.rectangle(xy, outline=(r, g, b, alpha), width=stroke)
        self._blend(layer)

    def text(self, box, content, size_px, color, align, opacity: float) -> None:
        if not content or opacity <= 0:
            return
        x, y, w, h = (v * self.scale for v in box)
        r, g, b, a = color or (0, 0, 0, 255)
        alpha = int(round(a * opacity))
        try:
            font = ImageFont.load_default(size=max(size_px * self.scale, 1))
        except TypeError:  # older Pillow: fixed-size bitmap font
            font = ImageFont.load_default()
        layer, draw = self._layer()
        text_w = draw.textlength(content, font=font)
        tx = x
        if align == "center":
            tx = x + (w - text_w) / 2
        elif align == "right":
            tx = x + w - text_w
        draw.text((round(tx), round(y)), content, font=font, fill=(r, g, b, alpha))
        self._blend(layer)

    def image(self, box, src: str, radius: float, opacity: float) -> None:
        path = self.base_dir / unquote(src)
        if not path.exists() or opacity <= 0:
            return
        x, y, w, h = (v * self.scale for v in box)
        target = (max(round(w), 1), max(round(h), 1))
        if path.suffix.lower() == ".svg" or path.read_bytes()[:5] in (b"<?xml", b"<svg "):
            sprite = rasterize_svg(path.read_bytes(), target[0], target[1])
        else:
            try:
                with Image.open(path) as img:
                    sprite = img.convert("RGBA").resize(target, Image.BILINEAR)
            except Exception:
                return
        if opacity < 1.0:
            alpha = sprite.getchannel("A").point(lambda v: int(v * opacity))
            sprite.putalpha(alpha)
        layer = Image.new("RGBA", self.canvas.size, (0, 0, 0, 0))
        layer.paste(sprite, (round(x), round(y)), sprite)
        self._blend(layer)


def rasterize_svg(svg_bytes: bytes, width: int, height: int) -> Image.Image:
    """Rasterize the icon-SVG subset (rect / ellipse / line; paths skipped)."""
    out = Image.new("RGBA", (max(width, 1), max(height, 1)), (0, 0, 0, 0))
    draw = ImageDraw.Draw(out)
    try:
        root = ET.fromstring(svg_bytes.decode("utf-8", "replace"))
    except ET.ParseError:
        return out
    view = (root.get("viewBox") or f"0 0 {width} {height}").split()
    try:
        vw, vh = float(view[2]), float(view[3])
    except (IndexError, ValueError):
        vw, vh = float(width), float(height)
    sx = width / vw if vw else 1.0
    sy = height / vh if vh else 1.0

    for element in root.iter():
        tag = element.tag.rsplit("}", 1)[-1]
        fill = _hex_to_rgba(element.get("fill", "")) or (204, 204, 204, 255)
        if tag == "rect":
            x = float(element.get("x", 0)) * sx
            y = float(element.get("y", 0)) * sy
            w = float(element.get("width", 0)) * sx
            h = float(element.get("height", 0)) * sy
            draw.rectangle((round(x), round(y), round(x + w), round(y + h)), fill=fill)
        elif tag == "ellipse":
            cx = float(element.get("cx", 0)) * sx
            cy = float(element.get("cy", 0)) * sy
            rx = float(element.get("rx", 0)) * sx
            ry = float(element.get("ry", 0)) * sy
            xy = (round(cx - rx), round(cy - ry), round(cx + rx), round(cy + ry))
            # drawn with the same primitive the css side uses for rounded-full
            draw.rounded_rectangle(xy, radius=min(rx, ry), fill=fill)
        elif tag == "line":
            stroke = _hex_to_rgba(element.get("stroke", "")) or fill
            x1 = float(element.get("x1", 0)) * sx
            y1 = float(element.get("y1", 0)) * sy
            x2 = float(element.get("x2", 0)) * sx
            y2 = float(element.get("y2", 0)) * sy
            draw.line((round(x1), round(y1), round(x2), round(y2)), fill=stroke, width=max(1, round(sx)))
    return out


def _font_size(element: HtmlElement) -> float:
    for name in element.class_names():
        if name.startswith("text-"):
            value = name[5:]
            px = _px_payload(value)
            if px is not None:
                return px
            if value in _TEXT_SIZE_PX:
                return float(_TEXT_SIZE_PX[value])
    return 16.0


def _text_color(element: HtmlElement):
    for name in element.class_names():
        if name.startswith("text-"):
            color = _color_value(name[5:])
            if color is not None:
                return color
    return (0, 0, 0, 255)


def _text_align(element: HtmlElement) -> str:
    names = element.class_names()
    if "text-center" in names:
        return "center"
    if "text-right" in names:
        return "right"
    return "left"


def _paint_element(painter: _Painter, element: HtmlElement,
                   origin: tuple[float, float], inherited_opacity: float) -> None:
    geometry = _geometry(element)
    opacity = inherited_opacity * _opacity(element)
    if geometry is None:
        for child in element.children:
            _paint_element(painter, child, origin, opacity)
        return
    x, y, w, h = geometry
    box = (origin[0] + x, origin[1] + y, w, h)
    radius = _radius(element, w, h)

    if element.tag == "img":
        painter.image(box, element.attributes.get("src", ""), radius, opacity)
    else:
        bg = _class_value(element, "bg-")
        if bg is not None and not bg.startswith("[url("):
            painter.rect(box, _color_value(bg), radius, opacity)
        border_color = None
        border_width = 0.0
        for name in element.class_names():
            if name == "border":
                border_width = 1.0
            elif name.startswith("border-["):
                border_width = _px_payload(name[7:]) or 0.0
            elif name.startswith("border-") and name[7:] in ("2", "4", "8"):
                border_width = float(name[7:])
            elif name.startswith("border-"):
                border_color = border_color or _color_value(name[7:])
        if border_width and border_color:
            painter.outline(box, border_color, border_width, radius, opacity)
        if element.text:
            painter.text(box, element.text, _font_size(element), _text_color(element),
                         _text_align(element), opacity)

    child_origin = (box[0], box[1])
    for child in element.children:
        _paint_element(painter, child, child_origin, opacity)


def render_document(model: HtmlDocumentModel, out_width: int, out_height: int,
                    base_dir: Path) -> Image.Image:
    body = model.body
    if body is None:
        return Image.new("RGB", (max(out_width, 1), max(out_height, 1)), (255, 255, 255))
    design = _geometry(body)
    if design is not None and design[2] > 0 and design[3] > 0:
        design_w, design_h = design[2], design[3]
    else:
        design_w, design_h = float(out_width), float(out_height)
    scale = min(out_width / design_w, out_height / design_h) if design_w and design_h else 1.0

    painter = _Painter(out_width, out_height, scale, base_dir)
    bg = _class_value(body, "bg-")
    if bg is not None and not bg.startswith("[url("):
        painter.rect((0, 0, design_w, design_h), _color_value(bg), 0.0, _opacity(body))
    for child in body.children:
        _paint_element(painter, child, (0.0, 0.0), _opacity(body))
    return painter.canvas.convert("RGB")


def render_file(html_path: str | Path, out_width: int, out_height: int) -> Image.Image:
    html_path = Path(html_path)
    model = parse_html(html_path.read_text(encoding="utf-8"))
    return render_document(model, out_width, out_height, html_path.parent)


def _path_from_url(url: str) -> Path:
    parsed = urlparse(url)
    if parsed.scheme == "file":
        return Path(unquote(parsed.path))
    return Path(url)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="Render generated pages to PNG")
    parser.add_argument("input_url")
    parser.add_argument("width", type=int)
    parser.add_argument("height", type=int)
    parser.add_argument("output_png")
    args = parser.parse_args(argv)

    image = render_file(_path_from_url(args.input_url), args.width, args.height)
    image.save(args.output_png, format="PNG")
    return 0


if __name__ == "__main__":
    sys.exit(main())
