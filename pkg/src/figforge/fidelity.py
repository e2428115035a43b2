"""Pixel-level fidelity (MAE), external screenshot orchestration, and the
embedding-similarity bridge (VES).

MAE is computed in RGB with alpha composited onto white; renders happen in
one external process per call with an explicit timeout. VES is optional and
needs a running embedding sidecar.
"""
from __future__ import annotations

import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import (
    DecodeFailure,
    EmptyImage,
    RendererUnavailable,
    RenderTimeout,
)
from .sidecar import SidecarClient

DEFAULT_RENDERER = "python3 -m figforge.boxrender {input_url} {width} {height} {output_png}"
RENDER_SCALE = 2  # screenshots are taken at 2x the design's top-level size

# Pixel error and perceptual judgment can diverge: large uniform background
# shifts inflate MAE on visually faithful pages, while content misplaced over
# a matching background can hide from it. Carried on every FidelityRecord.
MAE_CAVEAT = (
    "pixel MAE tracks global color distribution; it can disagree with "
    "perceived similarity when backgrounds dominate or content shifts locally"
)


@dataclass
class ImageBuffer:
    """Row-major RGB bytes, one byte per channel sample."""

    width: int
    height: int
    data: bytes
    channels: int = 3

    def __post_init__(self):
        if self.channels != 3:
            raise ValueError("ImageBuffer is RGB-only")
        if len(self.data) != self.width * self.height * 3:
            raise ValueError("data length does not match width*height*3")

    @classmethod
    def from_pil(cls, image: Image.Image) -> "ImageBuffer":
        if image.mode in ("RGBA", "LA", "P"):
            background = Image.new("RGBA", image.size, (255, 255, 255, 255))
            image = Image.alpha_composite(background, image.convert("RGBA"))
        rgb = image.convert("RGB")
        return cls(width=rgb.width, height=rgb.height, data=rgb.tobytes())

    @classmethod
    def load(cls, path: str | Path) -> "ImageBuffer":
        with Image.open(path) as image:
            image.load()
            return cls.from_pil(image)

    def to_pil(self) -> Image.Image:
        return Image.frombytes("RGB", (self.width, self.height), self.data)

    def to_array(self) -> np.ndarray:
        return np.frombuffer(self.data, dtype=np.uint8).reshape(self.height, self.width, 3)


@dataclass
class FidelityRecord:
    mae: float
    ves: float | None = None
    render_viewport: tuple[int, int] = (0, 0)
    caveat: str = MAE_CAVEAT


def mae(a: ImageBuffer, b: ImageBuffer) -> float:
    """Normalized mean absolute error over all channel samples, in [0, 1].

    When dimensions differ, b is bilinearly resized to a's dimensions.
    """
    if a.width * a.height == 0 or b.width * b.height == 0:
        raise EmptyImage("cannot compare zero-pixel images")
    if (b.width, b.height) != (a.width, a.height):
        b = ImageBuffer.from_pil(b.to_pil().resize((a.width, a.height), Image.BILINEAR))
    xs = a.to_array().astype(np.float64)
    ys = b.to_array().astype(np.float64)
    return float(np.abs(xs - ys).mean() / 255.0)


def render_page(
    html_path: str | Path,
    viewport: tuple[int, int],
    renderer: str = DEFAULT_RENDERER,
    timeout: float = 60.0,
    scale: int = RENDER_SCALE,
) -> ImageBuffer:
    """Screenshot a page via the configured external command.

    viewport is the design's top-level frame size; the command receives it
    multiplied by the screenshot scale (2x by default). The command template
    must contain {input_url} {width} {height} {output_png}.
    """
    html_path = Path(html_path)
    width, height = int(viewport[0]) * scale, int(viewport[1]) * scale
    with tempfile.TemporaryDirectory(prefix="figforge-render-") as tmp:
        output_png = Path(tmp) / "shot.png"
        substitutions = {
            "input_url": html_path.resolve().as_uri() if html_path.exists() else str(html_path),
            "width": str(width),
            "height": str(height),
            "output_png": str(output_png),
        }
        command = [token.format(**substitutions) for token in shlex.split(renderer)]
        try:
            proc = subprocess.run(
                command, capture_output=True, timeout=timeout, check=False
            )
        except FileNotFoundError as exc:
            raise RendererUnavailable(f"renderer command not found: {exc}") from None
        except subprocess.TimeoutExpired:
            raise RenderTimeout(timeout) from None
        if proc.returncode != 0:
            stderr = proc.stderr.decode("utf-8", "replace")[-2000:]
            raise RendererUnavailable(f"renderer exited {proc.returncode}: {stderr}")
        if not output_png.exists():
            raise DecodeFailure("renderer produced no output file")
        try:
            return ImageBuffer.load(output_png)
        except Exception as exc:
            raise DecodeFailure(f"could not decode screenshot: {exc}") from None


def ves(a_path: str | Path, b_path: str | Path, sidecar: SidecarClient) -> float:
    """Cosine similarity of the two images' sidecar embeddings.

    Vectors arrive unit-normalized, so the dot product is the cosine.
    """
    vectors = sidecar.embed([str(a_path), str(b_path)])
    a, b = (np.asarray(v, dtype=np.float64) for v in vectors)
    return float(a @ b)
