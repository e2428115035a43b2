"""Shared raw-JSON builders for Figma document fixtures."""
from __future__ import annotations

import itertools

_counter = itertools.count(1)


def node(node_type: str = "RECTANGLE", *, id: str | None = None, box=None, **kw) -> dict:
    """Raw Figma node object. box is (x, y, w, h)."""
    obj: dict = {
        "id": id if id is not None else f"n{next(_counter)}",
        "name": kw.pop("name", node_type.lower()),
        "type": node_type,
    }
    if box is not None:
        x, y, w, h = box
        obj["absoluteBoundingBox"] = {"x": x, "y": y, "width": w, "height": h}
    obj.update(kw)
    return obj


def solid(r: float, g: float, b: float, a: float = 1.0) -> dict:
    return {"type": "SOLID", "color": {"r": r, "g": g, "b": b, "a": a}}


def image_fill(ref: str) -> dict:
    return {"type": "IMAGE", "imageRef": ref}


def frame(*children: dict, box=(0, 0, 800, 600), **kw) -> dict:
    kw.setdefault("name", "frame")
    return node("FRAME", box=box, children=list(children), **kw)


def text(content: str, *, box=(0, 0, 100, 20), size: float = 16.0, weight: int = 400, **kw) -> dict:
    style = {"fontFamily": "Inter", "fontSize": size, "fontWeight": weight}
    style.update(kw.pop("style", {}))
    return node("TEXT", box=box, characters=content, style=style, **kw)


def doc(root: dict, **kw) -> dict:
    out = {"root": root}
    out.update(kw)
    return out
