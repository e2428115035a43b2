"""Exception types shared across the toolkit."""
from __future__ import annotations


class FigforgeError(Exception):
    """Base class for all toolkit errors."""


class MalformedJson(FigforgeError):
    """Input is not syntactically valid JSON."""


class SchemaViolation(FigforgeError):
    """A document, critique, or config value breaks a structural invariant.

    Carries a dotted path into the offending document when available.
    """

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{message} (at {path})" if path else message)


class GeometryMissing(FigforgeError):
    """A visible node lacks the bounding box required by a geometric pass."""


class MissingAsset(FigforgeError):
    """An image reference has no backing bytes in the asset store."""

    def __init__(self, image_ref: str):
        self.image_ref = image_ref
        super().__init__(f"no asset bytes for reference {image_ref!r}")


class DuplicateId(FigforgeError):
    """Node ids in a tree are not unique."""


class DimensionMismatch(FigforgeError):
    """Embedding vectors do not share a common dimension."""


class EmptyPopulation(FigforgeError):
    """No eligible samples to draw from."""


class UnresolvedReference(FigforgeError):
    """An inlined component or style key is missing from the document."""

    def __init__(self, key: str):
        self.key = key
        super().__init__(f"unresolved component/style reference {key!r}")


class EmptyIr(FigforgeError):
    """The intermediate representation has no root node."""


class UnparsableDocument(FigforgeError):
    """The input string does not parse as an HTML document."""


class EmptyImage(FigforgeError):
    """An image buffer has zero pixels."""


class RendererUnavailable(FigforgeError):
    """The configured screenshot command is missing or failed to run."""


class RenderTimeout(FigforgeError):
    """The screenshot command exceeded its time budget."""

    def __init__(self, seconds: float):
        self.seconds = seconds
        super().__init__(f"render timed out after {seconds:.1f}s")


class DecodeFailure(FigforgeError):
    """The screenshot command produced no decodable PNG."""


class SidecarUnavailable(FigforgeError):
    """The embedding sidecar process could not be reached."""


class ProtocolError(FigforgeError):
    """The embedding sidecar answered outside its wire contract."""


class ModelUnavailable(FigforgeError):
    """The chat-model endpoint could not be reached."""


class InvalidModelOutput(FigforgeError):
    """The refiner produced unusable output even after a retry.

    The partial run trace is attached for inspection.
    """

    def __init__(self, message: str, trace=None):
        self.trace = trace
        super().__init__(message)
