"""figforge: Figma metadata refinement, HTML/Tailwind generation, and UI code metrics."""

__version__ = "0.1.0"

from .model import FigmaDocument, FigmaNode, Paint, Rect, RGBA, parse_document, serialize_document, walk

__all__ = [
    "FigmaDocument",
    "FigmaNode",
    "Paint",
    "Rect",
    "RGBA",
    "parse_document",
    "serialize_document",
    "walk",
    "__version__",
]
