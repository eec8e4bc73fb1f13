"""Software rasterizer: z-buffered triangle fill with top-left edge rule,
two-sided Lambertian headlight shading and a back-to-front translucent pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .camera import Camera, project_vertices
from .colormap import linear_to_srgb8
from .mesh import Mesh

AMBIENT = 0.35
DIFFUSE = 0.65


@dataclass
class Material:
    base_color: tuple[float, float, float]
    alpha: float = 1.0

    def __post_init__(self):
        self.base_color = tuple(float(c) for c in self.base_color)
        if min(self.base_color) < 0.0 or max(self.base_color) > 1.0:
            raise ValueError(f"base_color outside [0,1]: {self.base_color}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha outside [0,1]: {self.alpha}")


@dataclass
class Framebuffer:
    width: int
    height: int
    background: tuple[float, float, float] = (1.0, 1.0, 1.0)
    color: np.ndarray = field(init=False)
    alpha: np.ndarray = field(init=False)
    depth: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("framebuffer dimensions must be >= 1")
        self.color = np.empty((self.height, self.width, 3), dtype=np.float64)
        self.color[:] = self.background
        self.alpha = np.ones((self.height, self.width), dtype=np.float64)
        self.depth = np.full((self.height, self.width), np.inf, dtype=np.float64)

    def to_rgba8(self) -> np.ndarray:
        out = np.empty((self.height, self.width, 4), dtype=np.uint8)
        out[..., :3] = linear_to_srgb8(self.color)
        out[..., 3] = np.round(np.clip(self.alpha, 0.0, 1.0) * 255.0).astype(np.uint8)
        return out


def shade(base, normal, cam: Camera):
    """Two-sided headlight: ambient + diffuse * |dot(normal, -forward)|."""
    lam = abs(float(np.dot(normal, -cam.forward)))
    intensity = AMBIENT + DIFFUSE * lam
    return np.clip(np.asarray(base, dtype=np.float64) * intensity, 0.0, 1.0)


def _is_top_left(ex: float, ey: float) -> bool:
    # for interior-positive edge functions: top = horizontal heading +x,
    # left = heading up the screen (y decreasing)
    return ey < 0.0 or (ey == 0.0 and ex > 0.0)


def rasterize_triangle(
    fb: Framebuffer,
    pts: np.ndarray,
    color,
    alpha: float = 1.0,
    write_depth: bool = True,
) -> None:
    """Fill one screen-space triangle.

    pts: (3, 3) rows of (screen x, screen y, depth).  Pixel centers sit at
    (x + 0.5, y + 0.5); ties on shared edges follow the top-left rule so
    adjacent triangles paint every pixel exactly once.  Opaque fragments
    (write_depth=True) depth-test strictly-less and write depth; translucent
    fragments test against the existing depth and blend over the color.
    """
    (x0, y0, z0), (x1, y1, z1), (x2, y2, z2) = pts
    if not np.isfinite(pts).all():
        return
    area = (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0)
    if area == 0.0:
        return
    flip = -1.0 if area < 0.0 else 1.0
    area *= flip

    lox = max(0, int(np.ceil(min(x0, x1, x2) - 0.5)))
    hix = min(fb.width - 1, int(np.floor(max(x0, x1, x2) - 0.5)))
    loy = max(0, int(np.ceil(min(y0, y1, y2) - 0.5)))
    hiy = min(fb.height - 1, int(np.floor(max(y0, y1, y2) - 0.5)))
    if lox > hix or loy > hiy:
        return

    cx = np.arange(lox, hix + 1, dtype=np.float64) + 0.5
    cy = (np.arange(loy, hiy + 1, dtype=np.float64) + 0.5)[:, None]

    # edge functions, positive inside after orientation flip
    w0 = flip * ((x2 - x1) * (cy - y1) - (y2 - y1) * (cx - x1))
    w1 = flip * ((x0 - x2) * (cy - y2) - (y0 - y2) * (cx - x2))
    w2 = flip * ((x1 - x0) * (cy - y0) - (y1 - y0) * (cx - x0))

    t0 = _is_top_left(flip * (x2 - x1), flip * (y2 - y1))
    t1 = _is_top_left(flip * (x0 - x2), flip * (y0 - y2))
    t2 = _is_top_left(flip * (x1 - x0), flip * (y1 - y0))
    mask = (
        ((w0 > 0.0) | ((w0 == 0.0) & t0))
        & ((w1 > 0.0) | ((w1 == 0.0) & t1))
        & ((w2 > 0.0) | ((w2 == 0.0) & t2))
    )
    if not mask.any():
        return

    depth = (w0 * z0 + w1 * z1 + w2 * z2) / area
    zbuf = fb.depth[loy:hiy + 1, lox:hix + 1]
    mask &= depth < zbuf

    cbuf = fb.color[loy:hiy + 1, lox:hix + 1]
    abuf = fb.alpha[loy:hiy + 1, lox:hix + 1]
    color = np.asarray(color, dtype=np.float64)
    if write_depth:
        zbuf[mask] = depth[mask]
        cbuf[mask] = color
        abuf[mask] = alpha
    else:
        cbuf[mask] = alpha * color + (1.0 - alpha) * cbuf[mask]
        abuf[mask] = alpha + (1.0 - alpha) * abuf[mask]


def _face_shading(mesh: Mesh, base, cam: Camera) -> np.ndarray:
    """Flat-shaded color per triangle from face normals."""
    cross = mesh.face_cross_products()
    lengths = np.linalg.norm(cross, axis=1)
    safe = np.where(lengths > 1e-20, lengths, 1.0)
    normals = cross / safe[:, None]
    lam = np.abs(normals @ (-cam.forward))
    intensity = AMBIENT + DIFFUSE * lam
    return np.clip(np.asarray(base)[None, :] * intensity[:, None], 0.0, 1.0)


def render_scene(
    items,
    cam: Camera,
    width: int,
    height: int,
    background=(1.0, 1.0, 1.0),
) -> Framebuffer:
    """Rasterize (Mesh, Material) items into a fresh framebuffer.

    Opaque items draw with the z-buffer.  Translucent items (alpha < 1)
    follow in a second pass, back-to-front by triangle centroid depth,
    blended over without writing depth.
    """
    fb = Framebuffer(width, height, tuple(background))
    translucent: list[tuple[np.ndarray, np.ndarray, float]] = []

    for mesh, material in items:
        if mesh.is_empty():
            continue
        screen = project_vertices(mesh.vertices, cam, width, height)
        colors = _face_shading(mesh, material.base_color, cam)
        tri_screen = screen[mesh.triangles]  # (M, 3, 3)
        if material.alpha >= 1.0:
            for t in range(mesh.num_triangles):
                rasterize_triangle(fb, tri_screen[t], colors[t])
        else:
            centroids = tri_screen[:, :, 2].mean(axis=1)
            translucent.append((tri_screen, colors, material.alpha, centroids))

    if translucent:
        all_tris = np.concatenate([t[0] for t in translucent])
        all_colors = np.concatenate([t[1] for t in translucent])
        all_alpha = np.concatenate([
            np.full(len(t[0]), t[2]) for t in translucent
        ])
        all_centroids = np.concatenate([t[3] for t in translucent])
        order = np.argsort(-all_centroids, kind="stable")
        for t in order:
            rasterize_triangle(
                fb, all_tris[t], all_colors[t], float(all_alpha[t]),
                write_depth=False,
            )
    return fb
