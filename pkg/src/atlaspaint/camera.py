"""Orthographic cameras for the named anatomical views.

Atlas frame conventions: +z up, +y anterior, midline plane at x = 0.
Lateral views sit on the x axis, top/bottom on the z axis with anterior up.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

VIEWS = (
    "cortical-outer-left",
    "cortical-outer-right",
    "cortical-inner-left",
    "cortical-inner-right",
    "subcortical",
    "top",
    "bottom",
)

VIEW_ALIASES = {
    "outer-left": "cortical-outer-left",
    "outer-right": "cortical-outer-right",
    "inner-left": "cortical-inner-left",
    "inner-right": "cortical-inner-right",
}

INNER_VIEWS = ("cortical-inner-left", "cortical-inner-right")

FRAME_MARGIN = 0.05

# view -> (forward, up); right-hand basis completed by right = forward x up
_VIEW_AXES = {
    "cortical-outer-right": ((-1.0, 0.0, 0.0), (0.0, 0.0, 1.0)),
    "cortical-outer-left": ((1.0, 0.0, 0.0), (0.0, 0.0, 1.0)),
    # inner views look at a hemisphere from the medial (cut) side
    "cortical-inner-right": ((1.0, 0.0, 0.0), (0.0, 0.0, 1.0)),
    "cortical-inner-left": ((-1.0, 0.0, 0.0), (0.0, 0.0, 1.0)),
    "subcortical": ((-1.0, 0.0, 0.0), (0.0, 0.0, 1.0)),
    "top": ((0.0, 0.0, -1.0), (0.0, 1.0, 0.0)),
    "bottom": ((0.0, 0.0, 1.0), (0.0, 1.0, 0.0)),
}


class UnknownView(Exception):
    """View name outside the supported set."""


class EmptyScene(Exception):
    """Auto-framing requested for an empty scene."""


def canonical_view(name: str) -> str:
    resolved = VIEW_ALIASES.get(name, name)
    if resolved not in VIEWS:
        raise UnknownView(
            f"unknown view {name!r}; expected one of {', '.join(VIEWS)}"
        )
    return resolved


@dataclass
class Camera:
    eye: np.ndarray
    forward: np.ndarray
    up: np.ndarray
    right: np.ndarray
    half_extents: tuple[float, float]
    near: float
    far: float


def named_view_camera(view: str, scene_bounds) -> Camera:
    """Orthographic camera fitting scene_bounds with a 5% margin per side."""
    view = canonical_view(view)
    if scene_bounds is None:
        raise EmptyScene(f"cannot frame view {view!r}: scene has no geometry")
    lo = np.asarray(scene_bounds[0], dtype=np.float64)
    hi = np.asarray(scene_bounds[1], dtype=np.float64)
    if lo.shape != (3,) or hi.shape != (3,) or (hi < lo).any():
        raise EmptyScene(f"cannot frame view {view!r}: invalid bounds")

    forward = np.array(_VIEW_AXES[view][0])
    up = np.array(_VIEW_AXES[view][1])
    right = np.cross(forward, up)
    up = np.cross(right, forward)

    center = 0.5 * (lo + hi)
    corners = np.array([
        [x, y, z]
        for x in (lo[0], hi[0])
        for y in (lo[1], hi[1])
        for z in (lo[2], hi[2])
    ]) - center
    half_w = float(np.abs(corners @ right).max()) * (1.0 + FRAME_MARGIN)
    half_h = float(np.abs(corners @ up).max()) * (1.0 + FRAME_MARGIN)
    half_d = float(np.abs(corners @ forward).max()) * (1.0 + FRAME_MARGIN)
    # degenerate (flat) scenes still need a usable frustum
    fallback = max(half_w, half_h, half_d, 1e-6)
    half_w = half_w or fallback
    half_h = half_h or fallback

    eye = center - forward * half_d
    return Camera(
        eye=eye,
        forward=forward,
        up=up,
        right=right,
        half_extents=(half_w, half_h),
        near=0.0,
        far=2.0 * max(half_d, fallback),
    )


def project_vertices(points: np.ndarray, cam: Camera,
                     width: int, height: int) -> np.ndarray:
    """Orthographic projection to (screen x, screen y, depth) rows; y runs down."""
    rel = np.atleast_2d(points) - cam.eye
    cx = rel @ cam.right
    cy = rel @ cam.up
    cz = rel @ cam.forward
    sx = (cx / cam.half_extents[0] * 0.5 + 0.5) * width
    sy = (0.5 - cy / cam.half_extents[1] * 0.5) * height
    return np.stack([sx, sy, cz], axis=1)


def project_vertex(point, cam: Camera, width: int, height: int):
    sx, sy, depth = project_vertices(np.asarray(point, dtype=np.float64),
                                     cam, width, height)[0]
    return float(sx), float(sy), float(depth)
