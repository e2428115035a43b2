"""Client for the embedding sidecar: newline-delimited JSON over the
sidecar's standard streams.

Request:  {"paths": ["a.png", "b.png"]}
Response: {"vectors": [[...], [...]], "dim": n}   (vectors unit-norm)
Errors:   {"error": "message"} per request, loop keeps running.
"""
from __future__ import annotations

import json
import shlex
import subprocess

from .errors import ProtocolError, SidecarUnavailable


class SidecarClient:
    """Spawns the sidecar command once and pipelines requests over stdio."""

    def __init__(self, command: str | list[str]):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self._proc: subprocess.Popen | None = None

    def _ensure_started(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            try:
                self._proc = subprocess.Popen(
                    self.command,
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    stderr=subprocess.DEVNULL,
                    text=True,
                    bufsize=1,
                )
            except (FileNotFoundError, OSError) as exc:
                raise SidecarUnavailable(f"cannot start sidecar: {exc}") from None
        return self._proc

    def embed(self, paths: list[str]) -> list[list[float]]:
        proc = self._ensure_started()
        request = json.dumps({"paths": list(paths)})
        try:
            proc.stdin.write(request + "\n")
            proc.stdin.flush()
            line = proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise SidecarUnavailable(f"sidecar pipe broke: {exc}") from None
        if not line:
            raise SidecarUnavailable("sidecar closed its output stream")
        try:
            response = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"sidecar sent invalid JSON: {exc}") from None
        if not isinstance(response, dict):
            raise ProtocolError("sidecar response is not an object")
        if "error" in response:
            raise ProtocolError(f"sidecar error: {response['error']}")
        vectors = response.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(paths):
            raise ProtocolError("sidecar returned a mismatched vector count")
        dim = response.get("dim")
        for vector in vectors:
            if not isinstance(vector, list) or (dim is not None and len(vector) != dim):
                raise ProtocolError("sidecar vector does not match the declared dim")
        return vectors

    def close(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            try:
                self._proc.stdin.close()
                self._proc.wait(timeout=5)
            except Exception:
                self._proc.kill()
        self._proc = None

    def __enter__(self) -> "SidecarClient":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()
