"""Lenient HTML parsing into an element tree for static analysis."""
from __future__ import annotations

from dataclasses import dataclass, field
from html.parser import HTMLParser
from typing import Iterator

from .errors import UnparsableDocument
from .tailwind import ClassToken, classify_token

VOID_ELEMENTS = frozenset({
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
})


@dataclass
class HtmlElement:
    tag: str
    classes: list[ClassToken] = field(default_factory=list)
    inline_style: list[tuple[str, str]] | None = None
    attributes: dict[str, str] = field(default_factory=dict)
    children: list["HtmlElement"] = field(default_factory=list)
    text: str = ""  # direct text content (child text nodes joined)
    source_span: tuple[int, int] = (0, 0)

    def iter(self) -> Iterator["HtmlElement"]:
        yield self
        for child in self.children:
            yield from child.iter()

    def class_names(self) -> list[str]:
        return [token.raw for token in self.classes]


@dataclass
class HtmlDocumentModel:
    roots: list[HtmlElement]
    style_texts: list[str] = field(default_factory=list)

    def iter(self) -> Iterator[HtmlElement]:
        for root in self.roots:
            yield from root.iter()

    def find_first(self, tag: str) -> HtmlElement | None:
        for element in self.iter():
            if element.tag == tag:
                return element
        return None

    @property
    def body(self) -> HtmlElement | None:
        return self.find_first("body")


def parse_declarations(style_value: str) -> list[tuple[str, str]]:
    declarations = []
    for chunk in style_value.split(";"):
        if ":" not in chunk:
            continue
        prop, value = chunk.split(":", 1)
        prop, value = prop.strip().lower(), value.strip()
        if prop and value:
            declarations.append((prop, value))
    return declarations


class _TreeBuilder(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.roots: list[HtmlElement] = []
        self.stack: list[HtmlElement] = []
        self.style_texts: list[str] = []
        self._in_style = False

    def _attach(self, element: HtmlElement) -> None:
        if self.stack:
            self.stack[-1].children.append(element)
        else:
            self.roots.append(element)

    def _make(self, tag: str, attrs) -> HtmlElement:
        attributes = {name.lower(): (value if value is not None else "") for name, value in attrs}
        classes = [classify_token(t) for t in attributes.get("class", "").split() if t]
        style_value = attributes.get("style", "")
        return HtmlElement(
            tag=tag.lower(),
            classes=classes,
            inline_style=parse_declarations(style_value) if style_value.strip() else None,
            attributes=attributes,
            source_span=self.getpos(),
        )

    def handle_starttag(self, tag, attrs):
        element = self._make(tag, attrs)
        self._attach(element)
        if tag.lower() == "style":
            self._in_style = True
        if tag.lower() not in VOID_ELEMENTS:
            self.stack.append(element)

    def handle_startendtag(self, tag, attrs):
        self._attach(self._make(tag, attrs))

    def handle_endtag(self, tag):
        tag = tag.lower()
        if tag == "style":
            self._in_style = False
        if tag in VOID_ELEMENTS:
            return
        for i in range(len(self.stack) - 1, -1, -1):
            if self.stack[i].tag == tag:
                del self.stack[i:]
                return
        # stray close tag: ignore (browser-style recovery)

    def handle_data(self, data):
        if self._in_style:
            self.style_texts.append(data)
            return
        if self.stack and data.strip():
            element = self.stack[-1]
            element.text = (element.text + " " + data.strip()).strip() if element.text else data.strip()


def parse_html(html: str) -> HtmlDocumentModel:
    """Build the element tree used by the metric suite and the renderer.

    Parsing is browser-lenient; an input with no element tags at all is
    rejected as UnparsableDocument.
    """
    if not isinstance(html, str) or not html.strip():
        raise UnparsableDocument("empty input")
    builder = _TreeBuilder()
    try:
        builder.feed(html)
        builder.close()
    except Exception as exc:  # html.parser rarely throws, but stay total
        raise UnparsableDocument(str(exc)) from None
    if not builder.roots:
        raise UnparsableDocument("no element tags found")
    return HtmlDocumentModel(roots=builder.roots, style_texts=builder.style_texts)


def is_complete_page(model: HtmlDocumentModel) -> bool:
    """Single html root wrapping exactly one head and one body."""
    html_roots = [e for e in model.roots if e.tag == "html"]
    if len(html_roots) != 1:
        return False
    heads = [c for c in html_roots[0].children if c.tag == "head"]
    bodies = [c for c in html_roots[0].children if c.tag == "body"]
    return len(heads) == 1 and len(bodies) == 1
