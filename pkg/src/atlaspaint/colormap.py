"""Anchor-color gradients and sRGB <-> linear conversions.

Biomarker values in [0, K] interpolate between K+1 anchor colors.  Anchors
arrive as sRGB hex text (#RRGGBB) and are stored, blended and rendered in
linear RGB; only image encoding converts back to sRGB.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

# default palette: light-grey baseline, then yellow -> orange -> red (K = 3)
DEFAULT_ANCHORS = ("#CCCCCC", "#FFF500", "#FF7800", "#FF0000")

_HEX_RE = re.compile(r"#[0-9a-fA-F]{6}$")


class BadColor(Exception):
    """Text is not a #RRGGBB color."""


class OutOfRange(Exception):
    """Value outside the gradient's [0, K] domain."""


def srgb_to_linear(c):
    """sRGB -> linear transfer function, elementwise on values in [0, 1]."""
    c = np.asarray(c, dtype=np.float64)
    out = np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)
    return float(out) if out.ndim == 0 else out


def linear_to_srgb(c):
    """Linear -> sRGB transfer function; input clamped to [0, 1]."""
    c = np.clip(np.asarray(c, dtype=np.float64), 0.0, 1.0)
    out = np.where(c <= 0.0031308, c * 12.92, 1.055 * c ** (1.0 / 2.4) - 0.055)
    return float(out) if out.ndim == 0 else out


def linear_to_srgb8(c) -> np.ndarray:
    """Linear RGB -> 8-bit sRGB bytes."""
    return np.round(linear_to_srgb(c) * 255.0).astype(np.uint8)


def parse_hex_color(text: str) -> tuple[float, float, float]:
    """Decode #RRGGBB (sRGB) into a linear-RGB triple."""
    if not isinstance(text, str) or not _HEX_RE.match(text):
        raise BadColor(f"expected #RRGGBB, got {text!r}")
    srgb = [int(text[i:i + 2], 16) / 255.0 for i in (1, 3, 5)]
    r, g, b = (srgb_to_linear(v) for v in srgb)
    return (r, g, b)


@dataclass
class ColorGradient:
    """Ordered list of K+1 anchor colors in linear RGB, K >= 1."""

    anchors: np.ndarray

    def __post_init__(self):
        self.anchors = np.asarray(self.anchors, dtype=np.float64).reshape(-1, 3)
        if len(self.anchors) < 2:
            raise BadColor("gradient needs at least 2 anchor colors")
        if self.anchors.min() < 0.0 or self.anchors.max() > 1.0:
            raise BadColor("anchor channels must lie in [0, 1]")

    @classmethod
    def from_hex(cls, colors) -> "ColorGradient":
        return cls(np.array([parse_hex_color(c) for c in colors]))

    @classmethod
    def default(cls) -> "ColorGradient":
        return cls.from_hex(DEFAULT_ANCHORS)

    @property
    def k(self) -> int:
        return len(self.anchors) - 1


def value_to_color(v: float, gradient: ColorGradient) -> np.ndarray:
    """Map v in [0, K] to a linear-RGB triple by piecewise-linear blending."""
    k = gradient.k
    if v < 0.0 or v > k:
        raise OutOfRange(f"value {v} outside [0, {k}]")
    i = min(int(math.floor(v)), k - 1)
    f = v - i
    return (1.0 - f) * gradient.anchors[i] + f * gradient.anchors[i + 1]
