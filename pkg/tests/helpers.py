"""Shared generators and independent oracles for the test suite."""

from __future__ import annotations

import numpy as np

from atlaspaint.mesh import Mesh


def random_mesh(rng: np.random.Generator, n_tris: int, scale: float = 50.0,
                with_normals: bool = False) -> Mesh:
    """Random triangle soup; vertices may be shared or unreferenced."""
    n_verts = max(3, int(n_tris * 1.5))
    verts = rng.normal(scale=scale, size=(n_verts, 3))
    tris = rng.integers(0, n_verts, size=(n_tris, 3))
    normals = None
    if with_normals:
        normals = rng.normal(size=(n_verts, 3))
        normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    return Mesh(verts, tris, normals)


def mesh_area(mesh: Mesh) -> float:
    """Independent area accumulation (plain loop, no Mesh helpers)."""
    total = 0.0
    for i0, i1, i2 in mesh.triangles:
        a = mesh.vertices[i0]
        b = mesh.vertices[i1]
        c = mesh.vertices[i2]
        total += 0.5 * np.linalg.norm(np.cross(b - a, c - a))
    return total


def tetra_cube() -> Mesh:
    """Unit cube triangulated so each corner sees equal face weights.

    Face diagonals all pass through the tetrad {(0,0,0), (1,1,0), (1,0,1),
    (0,1,1)}, so area-weighted vertex normals come out as normalize(+-1,+-1,+-1)
    at every corner.  Winding is outward.
    """
    verts = np.array([
        [0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0],
        [0, 0, 1], [1, 0, 1], [0, 1, 1], [1, 1, 1],
    ], dtype=np.float64)
    tris = np.array([
        [0, 2, 3], [0, 3, 1],  # z = 0
        [5, 7, 6], [5, 6, 4],  # z = 1
        [0, 4, 6], [0, 6, 2],  # x = 0
        [3, 7, 5], [3, 5, 1],  # x = 1
        [0, 1, 5], [0, 5, 4],  # y = 0
        [3, 6, 7], [3, 2, 6],  # y = 1
    ], dtype=np.int32)
    return Mesh(verts, tris)
