"""Indexed triangle meshes and vertex-normal computation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FALLBACK_NORMAL = (0.0, 0.0, 1.0)


class MeshError(Exception):
    """Invalid mesh topology or geometry."""


@dataclass
class Mesh:
    """Triangle mesh in atlas space (millimeters).

    vertices: (N, 3) float64 positions
    triangles: (M, 3) int32 indices into vertices
    normals: optional (N, 3) float64 unit vectors, one per vertex
    """

    vertices: np.ndarray
    triangles: np.ndarray
    normals: np.ndarray | None = None

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.triangles = np.asarray(self.triangles, dtype=np.int32).reshape(-1, 3)
        if self.normals is not None:
            self.normals = np.asarray(self.normals, dtype=np.float64).reshape(-1, 3)
        if self.triangles.size and self.triangles.max() >= len(self.vertices):
            raise MeshError(
                f"triangle index {int(self.triangles.max())} out of range "
                f"for {len(self.vertices)} vertices"
            )
        if self.triangles.size and self.triangles.min() < 0:
            raise MeshError("negative triangle index")
        if self.normals is not None and len(self.normals) != len(self.vertices):
            raise MeshError("normal count does not match vertex count")

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_triangles(self) -> int:
        return len(self.triangles)

    def is_empty(self) -> bool:
        return self.num_triangles == 0

    def bounds(self) -> tuple[np.ndarray, np.ndarray] | None:
        """Axis-aligned bounding box of referenced vertices, or None if empty."""
        if self.num_vertices == 0:
            return None
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def face_cross_products(self) -> np.ndarray:
        """(M, 3) cross products per triangle; |c| = 2 * area, direction = face normal."""
        a = self.vertices[self.triangles[:, 0]]
        b = self.vertices[self.triangles[:, 1]]
        c = self.vertices[self.triangles[:, 2]]
        return np.cross(b - a, c - a)

    def surface_area(self) -> float:
        if self.is_empty():
            return 0.0
        return float(0.5 * np.linalg.norm(self.face_cross_products(), axis=1).sum())


def compute_vertex_normals(mesh: Mesh) -> Mesh:
    """Return a copy of `mesh` with area-weighted vertex normals.

    Each vertex normal is the normalized sum of incident face cross products
    (the cross product magnitude already carries the area weight).  Vertices
    with no incident area get the fallback normal (0, 0, 1).
    """
    acc = np.zeros((mesh.num_vertices, 3), dtype=np.float64)
    if not mesh.is_empty():
        cross = mesh.face_cross_products()
        for k in range(3):
            np.add.at(acc, mesh.triangles[:, k], cross)
    lengths = np.linalg.norm(acc, axis=1)
    ok = lengths > 1e-20
    normals = np.tile(np.asarray(FALLBACK_NORMAL), (mesh.num_vertices, 1))
    normals[ok] = acc[ok] / lengths[ok, None]
    return Mesh(mesh.vertices.copy(), mesh.triangles.copy(), normals)
