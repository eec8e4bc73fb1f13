"""GIF89a animation encoder: median-cut global palette + LZW.

Replaces the external ImageMagick step: all frames share one palette built
by median cut over the union of frame pixels, every frame carries the same
delay, and a NETSCAPE2.0 extension loops the animation.  Bit layout notes
live in docs/gif.md.
"""

from __future__ import annotations

import struct

import numpy as np

MAX_PALETTE = 256

# 4x4 Bayer matrix for the optional ordered-dither mode
_BAYER4 = np.array([
    [0, 8, 2, 10],
    [12, 4, 14, 6],
    [3, 11, 1, 9],
    [15, 7, 13, 5],
], dtype=np.float64)


class GifError(Exception):
    """Invalid encoder input."""


def median_cut_palette(pixels: np.ndarray, max_colors: int = MAX_PALETTE) -> np.ndarray:
    """Reduce (N, 3) uint8 pixels to <= max_colors palette rows.

    Boxes split along their widest channel at the pixel-count median;
    ties and orderings are fully deterministic.
    """
    pixels = np.ascontiguousarray(pixels, dtype=np.uint8).reshape(-1, 3)
    if len(pixels) == 0:
        raise GifError("cannot build a palette from zero pixels")
    packed = (
        pixels[:, 0].astype(np.uint32) << 16
        | pixels[:, 1].astype(np.uint32) << 8
        | pixels[:, 2].astype(np.uint32)
    )
    unique, counts = np.unique(packed, return_counts=True)
    colors = np.stack([unique >> 16 & 0xFF, unique >> 8 & 0xFF, unique & 0xFF],
                      axis=1).astype(np.int64)

    boxes = [(colors, counts)]
    while len(boxes) < max_colors:
        widest = -1
        pick = -1
        for i, (cols, _) in enumerate(boxes):
            if len(cols) < 2:
                continue
            span = int((cols.max(axis=0) - cols.min(axis=0)).max())
            if span > widest:
                widest, pick = span, i
        if pick < 0:
            break
        cols, cnts = boxes.pop(pick)
        axis = int(np.argmax(cols.max(axis=0) - cols.min(axis=0)))
        order = np.lexsort((unique_key(cols), cols[:, axis]))
        cols, cnts = cols[order], cnts[order]
        half = np.searchsorted(np.cumsum(cnts), cnts.sum() / 2.0, side="right")
        half = min(max(half, 1), len(cols) - 1)
        boxes.append((cols[:half], cnts[:half]))
        boxes.append((cols[half:], cnts[half:]))

    palette = np.array([
        np.round((cols * cnts[:, None]).sum(axis=0) / cnts.sum())
        for cols, cnts in boxes
    ], dtype=np.uint8)
    return palette


def unique_key(cols: np.ndarray) -> np.ndarray:
    return cols[:, 0] << 16 | cols[:, 1] << 8 | cols[:, 2]


def map_to_palette(frame: np.ndarray, palette: np.ndarray) -> np.ndarray:
    """Nearest-palette-index image for an (H, W, 3) uint8 frame."""
    h, w = frame.shape[:2]
    flat = frame.reshape(-1, 3).astype(np.int64)
    packed = flat[:, 0] << 16 | flat[:, 1] << 8 | flat[:, 2]
    unique, inverse = np.unique(packed, return_inverse=True)
    ucolors = np.stack([unique >> 16 & 0xFF, unique >> 8 & 0xFF, unique & 0xFF],
                       axis=1).astype(np.float64)
    pal = palette.astype(np.float64)
    # |u-p|^2 = |u|^2 - 2 u.p + |p|^2; the u^2 term is constant per row
    d2 = -2.0 * (ucolors @ pal.T) + (pal * pal).sum(axis=1)[None, :]
    nearest = np.argmin(d2, axis=1)
    return nearest[inverse].reshape(h, w).astype(np.uint8)


def _dither(frame: np.ndarray, amplitude: float = 12.0) -> np.ndarray:
    h, w = frame.shape[:2]
    tile = np.tile(_BAYER4, (h // 4 + 1, w // 4 + 1))[:h, :w]
    offset = (tile / 16.0 - 0.5) * amplitude
    return np.clip(frame.astype(np.float64) + offset[..., None], 0, 255).astype(
        np.uint8
    )


class _BitWriter:
    """LSB-first bit packer (GIF code stream order)."""

    def __init__(self):
        self._acc = 0
        self._nbits = 0
        self._out = bytearray()

    def write(self, value: int, nbits: int) -> None:
        self._acc |= value << self._nbits
        self._nbits += nbits
        while self._nbits >= 8:
            self._out.append(self._acc & 0xFF)
            self._acc >>= 8
            self._nbits -= 8

    def finish(self) -> bytes:
        if self._nbits:
            self._out.append(self._acc & 0xFF)
            self._acc, self._nbits = 0, 0
        return bytes(self._out)


def lzw_encode(indices: bytes, min_code_size: int) -> bytes:
    """GIF-variant LZW with variable code width and dictionary reset.

    The dictionary keys are (prefix code << 8 | next byte); single-byte
    strings map to their own code implicitly.
    """
    clear = 1 << min_code_size
    eoi = clear + 1
    bits = _BitWriter()

    table: dict[int, int] = {}
    next_code = eoi + 1
    code_size = min_code_size + 1
    bits.write(clear, code_size)
    prefix = -1
    for byte in indices:
        if prefix < 0:
            prefix = byte
            continue
        key = (prefix << 8) | byte
        code = table.get(key)
        if code is not None:
            prefix = code
            continue
        bits.write(prefix, code_size)
        table[key] = next_code
        next_code += 1
        if next_code == (1 << code_size) + 1 and code_size < 12:
            code_size += 1
        if next_code > 4095:
            bits.write(clear, code_size)
            table = {}
            next_code = eoi + 1
            code_size = min_code_size + 1
        prefix = byte
    if prefix >= 0:
        bits.write(prefix, code_size)
    bits.write(eoi, code_size)
    return bits.finish()


def _subblocks(data: bytes) -> bytes:
    out = bytearray()
    for i in range(0, len(data), 255):
        chunk = data[i:i + 255]
        out.append(len(chunk))
        out += chunk
    out.append(0)
    return bytes(out)


def encode_gif(
    frames,
    delay_cs: int = 50,
    loop: int = 0,
    dither: bool = False,
    max_colors: int = MAX_PALETTE,
) -> bytes:
    """Encode (H, W, 3) uint8 frames as an animated GIF89a byte string.

    All frames share a global median-cut palette; loop=0 means forever.
    """
    if not frames:
        raise GifError("need at least one frame")
    frames = [np.ascontiguousarray(f, dtype=np.uint8) for f in frames]
    height, width = frames[0].shape[:2]
    for f in frames:
        if f.shape != (height, width, 3):
            raise GifError("all frames must share one (H, W, 3) shape")
    if not 0 <= delay_cs <= 0xFFFF:
        raise GifError(f"delay {delay_cs} outside uint16 range")

    if dither:
        frames = [_dither(f) for f in frames]
    palette = median_cut_palette(np.concatenate([f.reshape(-1, 3) for f in frames]),
                                 max_colors)
    index_frames = [map_to_palette(f, palette) for f in frames]

    depth = max(int(np.ceil(np.log2(max(len(palette), 2)))), 1)
    padded = np.zeros((1 << depth, 3), dtype=np.uint8)
    padded[: len(palette)] = palette
    min_code_size = max(depth, 2)

    out = bytearray(b"GIF89a")
    out += struct.pack("<HHBBB", width, height, 0xF0 | (depth - 1), 0, 0)
    out += padded.tobytes()
    # NETSCAPE2.0 looping extension
    out += b"\x21\xff\x0bNETSCAPE2.0\x03\x01" + struct.pack("<H", loop) + b"\x00"
    for idx in index_frames:
        out += b"\x21\xf9\x04\x04" + struct.pack("<H", delay_cs) + b"\x00\x00"
        out += b"\x2c" + struct.pack("<HHHHB", 0, 0, width, height, 0)
        out.append(min_code_size)
        out += _subblocks(lzw_encode(idx.tobytes(), min_code_size))
    out += b"\x3b"
    return bytes(out)
