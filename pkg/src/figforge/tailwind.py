"""Pinned Tailwind vocabulary: spacing scale, color palette, and the utility
grammar used to classify class tokens.

The tables are a frozen, versioned subset of the Tailwind defaults so metric
scores stay reproducible; tokens outside the grammar classify as CUSTOM.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

GRAMMAR_VERSION = "tw3-subset-1"

# name -> rendered px at the default 16px root font size
SPACING_SCALE: dict[str, float] = {
    "0": 0, "px": 1, "0.5": 2, "1": 4, "1.5": 6, "2": 8, "2.5": 10,
    "3": 12, "3.5": 14, "4": 16, "5": 20, "6": 24, "7": 28, "8": 32,
    "9": 36, "10": 40, "11": 44, "12": 48, "14": 56, "16": 64, "20": 80,
    "24": 96, "28": 112, "32": 128, "36": 144, "40": 160, "44": 176,
    "48": 192, "52": 208, "56": 224, "60": 240, "64": 256, "72": 288,
    "80": 320, "96": 384,
}

_HUES: dict[str, dict[int, str]] = {
    "slate": {50: "f8fafc", 100: "f1f5f9", 200: "e2e8f0", 300: "cbd5e1", 400: "94a3b8",
              500: "64748b", 600: "475569", 700: "334155", 800: "1e293b", 900: "0f172a"},
    "gray": {50: "f9fafb", 100: "f3f4f6", 200: "e5e7eb", 300: "d1d5db", 400: "9ca3af",
             500: "6b7280", 600: "4b5563", 700: "374151", 800: "1f2937", 900: "111827"},
    "zinc": {50: "fafafa", 100: "f4f4f5", 200: "e4e4e7", 300: "d4d4d8", 400: "a1a1aa",
             500: "71717a", 600: "52525b", 700: "3f3f46", 800: "27272a", 900: "18181b"},
    "neutral": {50: "fafafa", 100: "f5f5f5", 200: "e5e5e5", 300: "d4d4d4", 400: "a3a3a3",
                500: "737373", 600: "525252", 700: "404040", 800: "262626", 900: "171717"},
    "stone": {50: "fafaf9", 100: "f5f5f4", 200: "e7e5e4", 300: "d6d3d1", 400: "a8a29e",
              500: "78716c", 600: "57534e", 700: "44403c", 800: "292524", 900: "1c1917"},
    "red": {50: "fef2f2", 100: "fee2e2", 200: "fecaca", 300: "fca5a5", 400: "f87171",
            500: "ef4444", 600: "dc2626", 700: "b91c1c", 800: "991b1b", 900: "7f1d1d"},
    "orange": {50: "fff7ed", 100: "ffedd5", 200: "fed7aa", 300: "fdba74", 400: "fb923c",
               500: "f97316", 600: "ea580c", 700: "c2410c", 800: "9a3412", 900: "7c2d12"},
    "amber": {50: "fffbeb", 100: "fef3c7", 200: "fde68a", 300: "fcd34d", 400: "fbbf24",
              500: "f59e0b", 600: "d97706", 700: "b45309", 800: "92400e", 900: "78350f"},
    "yellow": {50: "fefce8", 100: "fef9c3", 200: "fef08a", 300: "fde047", 400: "facc15",
               500: "eab308", 600: "ca8a04", 700: "a16207", 800: "854d0e", 900: "713f12"},
    "lime": {50: "f7fee7", 100: "ecfccb", 200: "d9f99d", 300: "bef264", 400: "a3e635",
             500: "84cc16", 600: "65a30d", 700: "4d7c0f", 800: "3f6212", 900: "365314"},
    "green": {50: "f0fdf4", 100: "dcfce7", 200: "bbf7d0", 300: "86efac", 400: "4ade80",
              500: "22c55e", 600: "16a34a", 700: "15803d", 800: "166534", 900: "14532d"},
    "emerald": {50: "ecfdf5", 100: "d1fae5", 200: "a7f3d0", 300: "6ee7b7", 400: "34d399",
                500: "10b981", 600: "059669", 700: "047857", 800: "065f46", 900: "064e3b"},
    "teal": {50: "f0fdfa", 100: "ccfbf1", 200: "99f6e4", 300: "5eead4", 400: "2dd4bf",
             500: "14b8a6", 600: "0d9488", 700: "0f766e", 800: "115e59", 900: "134e4a"},
    "cyan": {50: "ecfeff", 100: "cffafe", 200: "a5f3fc", 300: "67e8f9", 400: "22d3ee",
             500: "06b6d4", 600: "0891b2", 700: "0e7490", 800: "155e75", 900: "164e63"},
    "sky": {50: "f0f9ff", 100: "e0f2fe", 200: "bae6fd", 300: "7dd3fc", 400: "38bdf8",
            500: "0ea5e9", 600: "0284c7", 700: "0369a1", 800: "075985", 900: "0c4a6e"},
    "blue": {50: "eff6ff", 100: "dbeafe", 200: "bfdbfe", 300: "93c5fd", 400: "60a5fa",
             500: "3b82f6", 600: "2563eb", 700: "1d4ed8", 800: "1e40af", 900: "1e3a8a"},
    "indigo": {50: "eef2ff", 100: "e0e7ff", 200: "c7d2fe", 300: "a5b4fc", 400: "818cf8",
               500: "6366f1", 600: "4f46e5", 700: "4338ca", 800: "3730a3", 900: "312e81"},
    "violet": {50: "f5f3ff", 100: "ede9fe", 200: "ddd6fe", 300: "c4b5fd", 400: "a78bfa",
               500: "8b5cf6", 600: "7c3aed", 700: "6d28d9", 800: "5b21b6", 900: "4c1d95"},
    "purple": {50: "faf5ff", 100: "f3e8ff", 200: "e9d5ff", 300: "d8b4fe", 400: "c084fc",
               500: "a855f7", 600: "9333ea", 700: "7e22ce", 800: "6b21a8", 900: "581c87"},
    "fuchsia": {50: "fdf4ff", 100: "fae8ff", 200: "f5d0fe", 300: "f0abfc", 400: "e879f9",
                500: "d946ef", 600: "c026d3", 700: "a21caf", 800: "86198f", 900: "701a75"},
    "pink": {50: "fdf2f8", 100: "fce7f3", 200: "fbcfe8", 300: "f9a8d4", 400: "f472b6",
             500: "ec4899", 600: "db2777", 700: "be185d", 800: "9d174d", 900: "831843"},
    "rose": {50: "fff1f2", 100: "ffe4e6", 200: "fecdd3", 300: "fda4af", 400: "fb7185",
             500: "f43f5e", 600: "e11d48", 700: "be123c", 800: "9f1239", 900: "881337"},
}

PALETTE: dict[str, tuple[int, int, int]] = {"white": (255, 255, 255), "black": (0, 0, 0)}
for _hue, _shades in _HUES.items():
    for _shade, _hex in _shades.items():
        PALETTE[f"{_hue}-{_shade}"] = tuple(int(_hex[i:i + 2], 16) for i in (0, 2, 4))

COLOR_NAMES = frozenset(PALETTE) | {"transparent", "current", "inherit"}

RESPONSIVE_PREFIXES = ("sm", "md", "lg", "xl", "2xl")
# standard viewport bands for breakpoint coverage: S / M / L / XL
BREAKPOINT_BANDS = {"sm": "S", "md": "M", "lg": "L", "xl": "XL", "2xl": "XL"}
BREAKPOINT_MIN_WIDTHS = {"sm": 640, "md": 768, "lg": 1024, "xl": 1280, "2xl": 1536}

STATE_PREFIXES = frozenset({
    "hover", "focus", "active", "visited", "disabled", "checked", "required",
    "first", "last", "odd", "even", "group-hover", "focus-within",
    "focus-visible", "dark", "motion-safe", "motion-reduce", "placeholder",
    "before", "after", "peer-hover", "peer-focus",
})

# property groups
LAYOUT_SIZE = "LAYOUT_SIZE"
POSITION = "POSITION"
DISPLAY = "DISPLAY"
SPACING = "SPACING"
COLOR = "COLOR"
TYPOGRAPHY = "TYPOGRAPHY"
OTHER = "OTHER"

# token kinds
SCALE_UTILITY = "SCALE_UTILITY"
ARBITRARY_VALUE = "ARBITRARY_VALUE"
VARIANT_PREFIXED = "VARIANT_PREFIXED"
CUSTOM = "CUSTOM"


@dataclass
class ClassToken:
    raw: str
    kind: str
    variant_prefixes: list[str] = field(default_factory=list)
    property_group: str = OTHER
    is_relative: bool | None = None  # None: no dimensional unit
    base: str = ""


_EXACT: dict[str, tuple[str, bool | None]] = {}
for _t in ("flex", "inline-flex", "grid", "inline-grid", "block", "inline-block",
           "inline", "hidden", "table", "table-row", "table-cell", "flow-root", "contents"):
    _EXACT[_t] = (DISPLAY, None)
for _t in ("static", "fixed", "absolute", "relative", "sticky"):
    _EXACT[_t] = (POSITION, None)
for _t in ("container",):
    _EXACT[_t] = (LAYOUT_SIZE, True)
for _t in ("flex-row", "flex-col", "flex-row-reverse", "flex-col-reverse",
           "flex-wrap", "flex-nowrap", "flex-wrap-reverse", "flex-1", "flex-auto",
           "flex-initial", "flex-none", "grow", "grow-0", "shrink", "shrink-0"):
    _EXACT[_t] = (OTHER, None)
for _t in ("items-start", "items-end", "items-center", "items-baseline", "items-stretch",
           "justify-start", "justify-end", "justify-center", "justify-between",
           "justify-around", "justify-evenly", "content-start", "content-end",
           "content-center", "content-between", "self-start", "self-end", "self-center",
           "self-stretch", "self-auto", "place-items-center", "place-content-center"):
    _EXACT[_t] = (OTHER, None)
for _t in ("text-left", "text-center", "text-right", "text-justify",
           "italic", "not-italic", "underline", "line-through", "no-underline",
           "uppercase", "lowercase", "capitalize", "normal-case", "truncate",
           "antialiased", "font-sans", "font-serif", "font-mono"):
    _EXACT[_t] = (TYPOGRAPHY, None)
for _t in ("font-thin", "font-extralight", "font-light", "font-normal", "font-medium",
           "font-semibold", "font-bold", "font-extrabold", "font-black"):
    _EXACT[_t] = (TYPOGRAPHY, None)
for _t in ("rounded", "rounded-none", "rounded-sm", "rounded-md", "rounded-lg",
           "rounded-xl", "rounded-2xl", "rounded-3xl", "rounded-full",
           "shadow", "shadow-sm", "shadow-md", "shadow-lg", "shadow-xl",
           "shadow-2xl", "shadow-inner", "shadow-none", "border", "border-0",
           "border-2", "border-4", "border-8", "border-solid", "border-dashed",
           "border-dotted", "border-none", "overflow-hidden", "overflow-auto",
           "overflow-scroll", "overflow-visible", "overflow-x-auto", "overflow-y-auto",
           "overflow-x-hidden", "overflow-y-hidden", "object-cover", "object-contain",
           "object-fill", "object-none", "object-scale-down", "select-none",
           "cursor-pointer", "transition", "sr-only", "isolate", "bg-cover",
           "bg-contain", "bg-center", "bg-no-repeat", "bg-repeat", "bg-gradient-to-r",
           "bg-gradient-to-l", "bg-gradient-to-t", "bg-gradient-to-b", "list-none",
           "list-disc", "list-decimal", "aspect-square", "aspect-video", "aspect-auto"):
    _EXACT[_t] = (OTHER, None)

_TEXT_SIZES = frozenset({"xs", "sm", "base", "lg", "xl", "2xl", "3xl", "4xl",
                         "5xl", "6xl", "7xl", "8xl", "9xl"})
_MAX_W_NAMES = frozenset({"none", "xs", "sm", "md", "lg", "xl", "2xl", "3xl", "4xl",
                          "5xl", "6xl", "7xl", "full", "min", "max", "fit", "prose",
                          "screen-sm", "screen-md", "screen-lg", "screen-xl", "screen-2xl"})
_LEADING_NAMES = frozenset({"none", "tight", "snug", "normal", "relaxed", "loose"})
_TRACKING_NAMES = frozenset({"tighter", "tight", "normal", "wide", "wider", "widest"})

_FRACTION_RE = re.compile(r"^\d+/\d+$")
_INT_RE = re.compile(r"^\d+$")

_SIZE_PREFIXES = ("min-w-", "min-h-", "max-w-", "max-h-", "w-", "h-", "size-")
_SPACING_PREFIXES = ("px-", "py-", "pt-", "pr-", "pb-", "pl-", "p-",
                     "mx-", "my-", "mt-", "mr-", "mb-", "ml-", "m-",
                     "gap-x-", "gap-y-", "gap-", "space-x-", "space-y-")
_INSET_PREFIXES = ("inset-x-", "inset-y-", "inset-", "top-", "right-", "bottom-", "left-")


def _spacing_value(value: str) -> tuple[bool, bool | None]:
    """(matches grammar, is_relative) for a spacing-scale position."""
    if value == "0":
        return True, None  # zero carries no unit
    if value in SPACING_SCALE:
        return True, (False if value == "px" else True)  # scale compiles to rem
    if value == "auto":
        return True, None
    if _FRACTION_RE.match(value) or value in ("full", "screen", "min", "max", "fit"):
        return True, True
    return False, None


def _classify_base(base: str) -> tuple[bool, str, bool | None]:
    """(in grammar, property group, is_relative) for a variant-free token."""
    if base in _EXACT:
        group, rel = _EXACT[base]
        return True, group, rel

    negative = base.startswith("-")
    body = base[1:] if negative else base

    for prefix in _SIZE_PREFIXES:
        if body.startswith(prefix):
            value = body[len(prefix):]
            ok, rel = _spacing_value(value)
            if not ok and prefix in ("max-w-", "min-w-") and value in _MAX_W_NAMES:
                ok, rel = True, True
            return (ok, LAYOUT_SIZE, rel) if ok else (False, LAYOUT_SIZE, None)
    for prefix in _SPACING_PREFIXES:
        if body.startswith(prefix):
            ok, rel = _spacing_value(body[len(prefix):])
            return (ok, SPACING, rel) if ok else (False, SPACING, None)
    for prefix in _INSET_PREFIXES:
        if body.startswith(prefix):
            ok, rel = _spacing_value(body[len(prefix):])
            return (ok, POSITION, rel) if ok else (False, POSITION, None)

    if body.startswith("z-"):
        value = body[2:]
        return (_INT_RE.match(value) is not None or value == "auto", POSITION, None)
    if body.startswith("order-"):
        return (_INT_RE.match(body[6:]) is not None or body[6:] in ("first", "last", "none"), OTHER, None)
    if body.startswith("grid-cols-") or body.startswith("grid-rows-"):
        # templates expand to fr tracks
        return (_INT_RE.match(body.rsplit("-", 1)[1]) is not None or body.endswith("none"), LAYOUT_SIZE, True)
    if body.startswith("col-span-") or body.startswith("row-span-"):
        tail = body.rsplit("-", 1)[1]
        return (_INT_RE.match(tail) is not None or tail == "full", OTHER, None)

    if body.startswith("text-"):
        value = body[5:]
        if value in _TEXT_SIZES:
            return True, TYPOGRAPHY, True  # named sizes compile to rem
        if value in COLOR_NAMES:
            return True, COLOR, None
        return False, TYPOGRAPHY, None
    if body.startswith("leading-"):
        value = body[8:]
        if value in SPACING_SCALE and value != "px":
            return True, TYPOGRAPHY, True
        return (value in _LEADING_NAMES, TYPOGRAPHY, None)
    if body.startswith("tracking-"):
        return (body[9:] in _TRACKING_NAMES, TYPOGRAPHY, True)

    if body.startswith("bg-"):
        value = body[3:]
        if value in COLOR_NAMES:
            return True, COLOR, None
        return False, COLOR, None
    if body.startswith("border-") or body.startswith("divide-") or body.startswith("ring-"):
        value = body.split("-", 1)[1]
        if value in COLOR_NAMES:
            return True, COLOR, None
        return False, OTHER, None
    if body.startswith("fill-") or body.startswith("stroke-"):
        value = body.split("-", 1)[1]
        return (value in COLOR_NAMES, COLOR, None)

    if body.startswith("rounded-"):
        # directional radii like rounded-t-lg
        parts = body.split("-")
        return (parts[-1] in ("none", "sm", "md", "lg", "xl", "2xl", "3xl", "full"), OTHER, None)
    if body.startswith("opacity-"):
        return (_INT_RE.match(body[8:]) is not None, OTHER, None)
    if body.startswith("duration-") or body.startswith("delay-"):
        return (_INT_RE.match(body.rsplit("-", 1)[1]) is not None, OTHER, None)

    return False, OTHER, None


_ARBITRARY_RE = re.compile(r"^(?P<head>-?[a-z][a-z0-9-]*)-\[(?P<payload>[^\]]*)\]$")

_REL_UNIT_RE = re.compile(r"(?:\d|\b)(%|em|rem|vw|vh|vmin|vmax|fr)\b|%$")
_ABS_UNIT_RE = re.compile(r"\d(px|pt|pc|cm|mm|in)\b")

_ARBITRARY_GROUPS = {
    "w": LAYOUT_SIZE, "h": LAYOUT_SIZE, "min-w": LAYOUT_SIZE, "min-h": LAYOUT_SIZE,
    "max-w": LAYOUT_SIZE, "max-h": LAYOUT_SIZE, "size": LAYOUT_SIZE, "aspect": LAYOUT_SIZE,
    "grid-cols": LAYOUT_SIZE, "grid-rows": LAYOUT_SIZE,
    "p": SPACING, "px": SPACING, "py": SPACING, "pt": SPACING, "pr": SPACING,
    "pb": SPACING, "pl": SPACING, "m": SPACING, "mx": SPACING, "my": SPACING,
    "mt": SPACING, "mr": SPACING, "mb": SPACING, "ml": SPACING,
    "gap": SPACING, "gap-x": SPACING, "gap-y": SPACING, "space-x": SPACING, "space-y": SPACING,
    "top": POSITION, "right": POSITION, "bottom": POSITION, "left": POSITION,
    "inset": POSITION, "inset-x": POSITION, "inset-y": POSITION, "z": POSITION,
    "text": TYPOGRAPHY, "leading": TYPOGRAPHY, "tracking": TYPOGRAPHY, "font": TYPOGRAPHY,
    "bg": COLOR, "border": OTHER, "rounded": OTHER, "shadow": OTHER, "opacity": OTHER,
}


def _payload_unit(payload: str) -> bool | None:
    if _REL_UNIT_RE.search(payload):
        return True
    if _ABS_UNIT_RE.search(payload):
        return False
    return None


def _split_variants(raw: str) -> tuple[list[str], str]:
    variants: list[str] = []
    rest = raw
    depth = 0
    start = 0
    i = 0
    while i < len(rest):
        ch = rest[i]
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth = max(0, depth - 1)
        elif ch == ":" and depth == 0:
            variants.append(rest[start:i])
            start = i + 1
        i += 1
    return variants, rest[start:]


def classify_token(raw: str) -> ClassToken:
    """Total classification: every nonempty token maps to exactly one kind."""
    raw = raw.strip()
    variants, base = _split_variants(raw)

    match = _ARBITRARY_RE.match(base)
    if match or ("[" in base and base.endswith("]")):
        head = match.group("head").lstrip("-") if match else base.split("[", 1)[0].rstrip("-").lstrip("-")
        payload = match.group("payload") if match else base.split("[", 1)[1].rstrip("]")
        group = _ARBITRARY_GROUPS.get(head, OTHER)
        if head == "text" and payload.startswith("#"):
            group = COLOR
        elif head == "text":
            group = TYPOGRAPHY
        if head == "bg" and not payload.startswith(("#", "rgb", "hsl")):
            group = OTHER  # url payloads and friends
        return ClassToken(raw=raw, kind=ARBITRARY_VALUE, variant_prefixes=variants,
                          property_group=group, is_relative=_payload_unit(payload), base=base)

    ok, group, rel = _classify_base(base)
    if ok:
        return ClassToken(raw=raw, kind=SCALE_UTILITY, variant_prefixes=variants,
                          property_group=group, is_relative=rel, base=base)
    if variants:
        return ClassToken(raw=raw, kind=VARIANT_PREFIXED, variant_prefixes=variants,
                          property_group=group, is_relative=None, base=base)
    return ClassToken(raw=raw, kind=CUSTOM, variant_prefixes=[], property_group=OTHER,
                      is_relative=None, base=base)


# ---------------------------------------------------------------------------
# snapping helpers for the generator

def format_px(value: float) -> str:
    if float(value) == int(value):
        return str(int(value))
    return f"{value:g}"


def snap_to_spacing_scale(px: float, tolerance: float) -> str:
    """Scale-name suffix when a default spacing step lands within tolerance,
    else the arbitrary-value token "[<px>px]"."""
    if px < 0:
        raise ValueError("px must be >= 0")
    best_name = None
    best_diff = None
    for name, scale_px in SPACING_SCALE.items():
        diff = abs(scale_px - px)
        if diff <= tolerance and (best_diff is None or diff < best_diff
                                  or (diff == best_diff and scale_px < SPACING_SCALE[best_name])):
            best_name, best_diff = name, diff
    if best_name is not None:
        return best_name
    return f"[{format_px(px)}px]"


def snap_color(rgb: tuple[int, int, int], max_distance: float) -> str:
    """Palette-name suffix when a pinned color is close enough in RGB space,
    else the arbitrary hex token "[#rrggbb]"."""
    best_name = None
    best_dist = None
    for name, candidate in PALETTE.items():
        dist = sum((a - b) ** 2 for a, b in zip(rgb, candidate)) ** 0.5
        if dist <= max_distance and (best_dist is None or dist < best_dist):
            best_name, best_dist = name, dist
    if best_name is not None:
        return best_name
    return "[#{:02x}{:02x}{:02x}]".format(*rgb)
