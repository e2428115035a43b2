"""Seeded synthetic Figma document generator for property tests."""
from __future__ import annotations

import random

from figforge.model import AssetStore

_PNG_RED = bytes.fromhex(
    "89504e470d0a1a0a0000000d49484452000000010000000108020000009077"
    "53de0000000c4944415408d763f8cfc00000030101"
    "0018dd8db00000000049454e44ae426082"
)
_PNG_BLUE = bytes.fromhex(
    "89504e470d0a1a0a0000000d49484452000000010000000108020000009077"
    "53de0000000c4944415408d763f8cf400500030101"
    "00a8a4c55f0000000049454e44ae426082"
)


def _color(rng: random.Random) -> dict:
    return {
        "r": round(rng.random(), 4),
        "g": round(rng.random(), 4),
        "b": round(rng.random(), 4),
        "a": 1.0 if rng.random() < 0.8 else round(rng.uniform(0.1, 0.9), 3),
    }


def _solid(rng: random.Random) -> dict:
    return {"type": "SOLID", "color": _color(rng)}


def random_document(seed: int, with_assets: bool = True) -> tuple[dict, AssetStore]:
    """One synthetic page: returns (raw JSON object, asset store).

    Mixes hidden nodes, empty shapes, occluding overlays, single-child
    wrappers, editor properties, vector icon clusters, image fills, and
    unrounded floats so the refinement passes all have work to do.
    """
    rng = random.Random(seed)
    store = AssetStore()
    counter = [0]

    def nid() -> str:
        counter[0] += 1
        return f"s{seed}n{counter[0]}"

    root_x = rng.choice([0.0, 100.0, 250.5])
    root_y = rng.choice([0.0, 50.0, 120.25])
    width, height = 800.0, 600.0

    def leaf(x: float, y: float, w: float, h: float) -> dict:
        kind = rng.random()
        box = {"x": root_x + x, "y": root_y + y, "width": w, "height": h}
        if kind < 0.15:
            return {
                "id": nid(), "name": f"text-{counter[0]}", "type": "TEXT",
                "absoluteBoundingBox": box,
                "characters": rng.choice(["Buy now", "Welcome back", "Details", "Checkout"]),
                "style": {"fontFamily": "Inter", "fontSize": rng.choice([12.0, 16.0, 24.33333]),
                          "fontWeight": rng.choice([400, 700])},
                "fills": [_solid(rng)],
            }
        if kind < 0.3 and with_assets:
            ref = f"imgref-{seed}-{counter[0]}"
            data = rng.choice([_PNG_RED, _PNG_BLUE])
            store.put(f"raw/{ref}.png", data, "PNG")
            return {
                "id": nid(), "name": rng.choice(["photo", "banner"]), "type": "RECTANGLE",
                "absoluteBoundingBox": box,
                "fills": [{"type": "IMAGE", "imageRef": ref}],
            }
        if kind < 0.4:
            return {  # empty shape: pruned by the empty-shape pass
                "id": nid(), "name": "ghost", "type": "RECTANGLE",
                "absoluteBoundingBox": box, "fills": [], "strokes": [],
            }
        node = {
            "id": nid(), "name": f"box-{counter[0]}", "type": "RECTANGLE",
            "absoluteBoundingBox": box, "fills": [_solid(rng)],
        }
        if rng.random() < 0.3:
            node["cornerRadius"] = rng.uniform(0, 12)
        if rng.random() < 0.3:
            node["locked"] = True
            node["exportSettings"] = [{"format": "PNG"}]
        if rng.random() < 0.15:
            node["visible"] = False
        if rng.random() < 0.1:
            node["opacity"] = 0.0
        return node

    def icon_cluster(x: float, y: float) -> dict:
        parts = []
        for i in range(rng.randint(2, 4)):
            parts.append({
                "id": nid(),
                "name": f"vec-{counter[0]}",
                "type": rng.choice(["VECTOR", "ELLIPSE", "STAR"]),
                "absoluteBoundingBox": {
                    "x": root_x + x + i * 4.0, "y": root_y + y + i * 3.0,
                    "width": 10.0, "height": 10.0,
                },
                "fills": [_solid(rng)],
            })
        return {
            "id": nid(), "name": rng.choice(["icon", "icon merge"]), "type": "GROUP",
            "absoluteBoundingBox": {"x": root_x + x, "y": root_y + y, "width": 24.0, "height": 24.0},
            "children": parts,
        }

    def wrapper(child: dict) -> dict:
        return {
            "id": nid(), "name": "wrapper", "type": rng.choice(["FRAME", "GROUP"]),
            "absoluteBoundingBox": dict(child["absoluteBoundingBox"]),
            "children": [child],
        }

    children = []
    y_cursor = 10.0
    for _ in range(rng.randint(4, 9)):
        x = rng.uniform(0, 600)
        w = rng.uniform(20, 180)
        h = rng.uniform(12, 80)
        pick = rng.random()
        if pick < 0.2:
            child = icon_cluster(x, y_cursor)
        else:
            child = leaf(x, y_cursor, w, h)
        if rng.random() < 0.3:
            child = wrapper(child)
            if rng.random() < 0.5:
                child = wrapper(child)
        children.append(child)
        y_cursor += h + rng.uniform(2, 20)

    if rng.random() < 0.4:
        # opaque overlay occluding an early card
        target = {
            "id": nid(), "name": "buried", "type": "RECTANGLE",
            "absoluteBoundingBox": {"x": root_x + 30, "y": root_y + 30, "width": 40, "height": 40},
            "fills": [{"type": "SOLID", "color": {"r": 0.5, "g": 0.5, "b": 0.5, "a": 1.0}}],
        }
        overlay = {
            "id": nid(), "name": "overlay", "type": "RECTANGLE",
            "absoluteBoundingBox": {"x": root_x, "y": root_y, "width": width, "height": height},
            "fills": [{"type": "SOLID", "color": {"r": 1.0, "g": 1.0, "b": 1.0, "a": 1.0}}],
        }
        children = [target] + children + [overlay]

    root = {
        "id": f"s{seed}root", "name": "page", "type": "FRAME",
        "absoluteBoundingBox": {"x": root_x, "y": root_y, "width": width, "height": height},
        "fills": [{"type": "SOLID", "color": {"r": 0.98, "g": 0.98, "b": 0.97, "a": 1.0}}],
        "children": children,
    }
    return {"root": root}, store
