"""Minimal PNG writer: 8-bit RGBA, linear colors encoded to sRGB."""

from __future__ import annotations

import struct
import zlib
from pathlib import Path


class IoError(Exception):
    """Output file could not be written."""


def _chunk(kind: bytes, payload: bytes) -> bytes:
    crc = zlib.crc32(kind)
    crc = zlib.crc32(payload, crc)
    return struct.pack(">I", len(payload)) + kind + payload + struct.pack(">I", crc)


def png_bytes(rgba8) -> bytes:
    """Encode an (H, W, 4) uint8 array as a PNG byte string, rows top-down."""
    import numpy as np

    rgba8 = np.ascontiguousarray(rgba8, dtype=np.uint8)
    if rgba8.ndim != 3 or rgba8.shape[2] != 4:
        raise ValueError(f"expected (H, W, 4) array, got shape {rgba8.shape}")
    height, width = rgba8.shape[:2]
    # filter byte 0 before every scanline
    raw = np.zeros((height, width * 4 + 1), dtype=np.uint8)
    raw[:, 1:] = rgba8.reshape(height, width * 4)
    header = struct.pack(">2I5B", width, height, 8, 6, 0, 0, 0)
    return b"".join([
        b"\x89PNG\r\n\x1a\n",
        _chunk(b"IHDR", header),
        _chunk(b"IDAT", zlib.compress(raw.tobytes(), 6)),
        _chunk(b"IEND", b""),
    ])


def encode_png(fb, path) -> Path:
    """Encode a Framebuffer (linear color) to an sRGB RGBA PNG file."""
    data = png_bytes(fb.to_rgba8())
    path = Path(path)
    try:
        path.write_bytes(data)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    return path
