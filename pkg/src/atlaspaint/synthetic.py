"""Synthetic desk-scale test atlas: mirrored ellipsoid "regions".

Real atlas meshes (Allen, FreeSurfer) are not redistributable, so the test
suite, the demo CLI flow and the service examples run on this generated
stand-in: ~12 regions built from spheres/ellipsoids, exactly symmetric
about the midline plane x = 0 (the left mesh of each pair is the bitwise
x-mirror of the right one).
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import numpy as np

from .atlas import (
    IDENTITY_3X4,
    AtlasManifest,
    RegionEntry,
    apply_transform,
    save_manifest,
)
from .mesh import Mesh, compute_vertex_normals
from .ply import write_ply

# region name -> (center of the right-side ellipsoid, radii, structure class)
REGION_SPECS = {
    "cortex": ((3.2, 0.0, 1.0), (3.0, 5.5, 3.4), "cortical"),
    "cerebellum": ((1.6, -5.2, 1.2), (1.4, 2.0, 1.2), "cortical"),
    "hippocampus": ((2.0, -1.5, 0.8), (1.1, 1.8, 0.9), "subcortical"),
    "olfactory": ((1.1, 4.8, 0.2), (0.8, 1.4, 0.8), "subcortical"),
    "thalamus": ((1.0, 0.5, 0.3), (0.9, 1.3, 0.8), "subcortical"),
    "striatum": ((2.2, 2.0, 0.2), (1.0, 1.6, 1.0), "subcortical"),
}

DEMO_CSV = """\
Image-name-unique,hippocampus-rh,hippocampus-lh,olfactory-rh,olfactory-lh,thalamus,striatum-rh,striatum-lh,cortex-rh,cortex-lh,cerebellum
t0,0.2,0.1,0.1,0.1,0.1,0.0,0.0,0.1,0.1,0.0
t1,1.2,0.4,0.9,0.3,0.5,0.4,0.2,0.6,0.3,0.2
t2,2.3,0.8,1.9,0.6,1.0,1.1,0.5,1.4,0.7,0.5
t3,3.0,1.2,2.8,0.9,1.6,1.9,0.8,2.2,1.1,0.9
"""


def uv_sphere(
    center=(0.0, 0.0, 0.0),
    radii=(1.0, 1.0, 1.0),
    n_lat: int = 12,
    n_lon: int = 16,
) -> Mesh:
    """Ellipsoid as a UV sphere with outward-wound triangles."""
    cx, cy, cz = center
    rx, ry, rz = radii
    verts = [(cx, cy, cz + rz)]
    for i in range(1, n_lat):
        theta = math.pi * i / n_lat
        st, ct = math.sin(theta), math.cos(theta)
        for j in range(n_lon):
            phi = 2.0 * math.pi * j / n_lon
            verts.append((
                cx + rx * st * math.cos(phi),
                cy + ry * st * math.sin(phi),
                cz + rz * ct,
            ))
    verts.append((cx, cy, cz - rz))
    bottom = len(verts) - 1

    def ring(i: int, j: int) -> int:
        return 1 + (i - 1) * n_lon + (j % n_lon)

    tris = []
    for j in range(n_lon):
        tris.append((0, ring(1, j), ring(1, j + 1)))
    for i in range(1, n_lat - 1):
        for j in range(n_lon):
            a, b = ring(i, j), ring(i, j + 1)
            c, d = ring(i + 1, j), ring(i + 1, j + 1)
            tris.append((a, c, d))
            tris.append((a, d, b))
    for j in range(n_lon):
        tris.append((bottom, ring(n_lat - 1, j + 1), ring(n_lat - 1, j)))
    return Mesh(np.array(verts), np.array(tris, dtype=np.int32))


def mirror_x(mesh: Mesh) -> Mesh:
    """Exact mirror about x = 0; winding flipped to stay outward."""
    verts = mesh.vertices.copy()
    verts[:, 0] = -verts[:, 0]
    tris = mesh.triangles[:, ::-1].copy()
    normals = None
    if mesh.normals is not None:
        normals = mesh.normals.copy()
        normals[:, 0] = -normals[:, 0]
    return Mesh(verts, tris, normals)


def merge(a: Mesh, b: Mesh) -> Mesh:
    verts = np.vstack([a.vertices, b.vertices])
    tris = np.vstack([a.triangles, b.triangles + a.num_vertices])
    return Mesh(verts, tris)


def build_region_meshes(detail: int = 1) -> dict[str, tuple[Mesh, Mesh, str]]:
    """name -> (left mesh, right mesh, structure_class)."""
    out = {}
    for name, (center, radii, cls) in REGION_SPECS.items():
        n_lat, n_lon = (16, 24) if name == "cortex" else (12, 16)
        right = uv_sphere(center, radii, n_lat * detail, n_lon * detail)
        out[name] = (mirror_x(right), right, cls)
    return out


def write_demo_atlas(out_dir, detail: int = 1) -> dict[str, Path]:
    """Generate the synthetic atlas tree; returns the key paths.

    <out_dir>/atlas/            prepared per-hemisphere meshes + manifest.json
    <out_dir>/atlas/manifest_hollow.json   same meshes flagged hollow
    <out_dir>/raw/              hemisphere=both source meshes + manifest.json
    <out_dir>/biomarkers.csv    4-stage demo pathology table
    <out_dir>/config.json       render config wired to the above
    """
    out_dir = Path(out_dir)
    atlas_dir = out_dir / "atlas"
    raw_dir = out_dir / "raw"
    atlas_dir.mkdir(parents=True, exist_ok=True)
    raw_dir.mkdir(parents=True, exist_ok=True)

    regions = build_region_meshes(detail)
    prepared_entries = []
    raw_entries = []

    # raw meshes live in a shrunk, z-shifted frame to exercise prep's affine
    raw_global = np.array([
        [2.0, 0.0, 0.0, 0.0],
        [0.0, 2.0, 0.0, 0.0],
        [0.0, 0.0, 2.0, 2.0],
    ])
    to_raw = np.array([
        [0.5, 0.0, 0.0, 0.0],
        [0.0, 0.5, 0.0, 0.0],
        [0.0, 0.0, 0.5, -1.0],
    ])

    for name, (left, right, cls) in regions.items():
        for mesh, suffix, hemi in ((left, "-lh", "left"), (right, "-rh", "right")):
            mesh = compute_vertex_normals(mesh)
            fname = f"{name}{suffix}.ply"
            (atlas_dir / fname).write_bytes(write_ply(mesh, "binary_little_endian"))
            prepared_entries.append(RegionEntry(name, fname, hemi, cls))
        whole = apply_transform(merge(left, right), to_raw)
        rname = f"{name}.ply"
        (raw_dir / rname).write_bytes(write_ply(whole, "binary_little_endian"))
        raw_entries.append(RegionEntry(name, rname, "both", cls))

    manifest = AtlasManifest("synthetic-v1", prepared_entries,
                             IDENTITY_3X4.copy(), False, atlas_dir)
    save_manifest(manifest, atlas_dir / "manifest.json")
    hollow = AtlasManifest("synthetic-hollow-v1", prepared_entries,
                           IDENTITY_3X4.copy(), True, atlas_dir)
    save_manifest(hollow, atlas_dir / "manifest_hollow.json")
    raw_manifest = AtlasManifest("synthetic-raw-v1", raw_entries,
                                 raw_global, False, raw_dir)
    save_manifest(raw_manifest, raw_dir / "manifest.json")

    (out_dir / "biomarkers.csv").write_text(DEMO_CSV, encoding="utf-8")
    config = {
        "atlas": "atlas/manifest.json",
        "input_csv": "biomarkers.csv",
        "views": ["cortical-outer-right", "subcortical", "top"],
        "resolution": [640, 480],
        "shell_alpha": 0.35,
        "out_dir": "out",
    }
    (out_dir / "config.json").write_text(
        json.dumps(config, indent=2) + "\n", encoding="utf-8"
    )
    return {
        "manifest": atlas_dir / "manifest.json",
        "hollow_manifest": atlas_dir / "manifest_hollow.json",
        "raw_manifest": raw_dir / "manifest.json",
        "csv": out_dir / "biomarkers.csv",
        "config": out_dir / "config.json",
    }


def main(argv=None) -> int:
    args = sys.argv[1:] if argv is None else argv
    if len(args) != 1:
        print("usage: python -m atlaspaint.synthetic OUT_DIR", file=sys.stderr)
        return 64
    paths = write_demo_atlas(args[0])
    for key, p in paths.items():
        print(f"{key}: {p}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
