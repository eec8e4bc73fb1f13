"""Atlas manifests, affine normalization, hemisphere splitting and prep.

A manifest (docs/manifest.md) registers region meshes with hemisphere and
structure-class tags plus a global 3x4 affine that moves raw meshes into
the atlas frame: +z up, midline plane at x = 0.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .mesh import Mesh, compute_vertex_normals
from .ply import parse_ply, write_ply

logger = logging.getLogger(__name__)

HEMISPHERE_TAGS = ("left", "right", "both")
STRUCTURE_CLASSES = ("cortical", "subcortical")

IDENTITY_3X4 = np.hstack([np.eye(3), np.zeros((3, 1))])


class AtlasError(Exception):
    """Manifest or atlas-prep failure."""


class ParseError(AtlasError):
    """Manifest file does not match the documented schema."""


class DuplicateRegion(AtlasError):
    """Two entries claim the same region and hemisphere."""


class MissingMesh(AtlasError):
    """A manifest mesh_path does not resolve to a file."""


class SingularTransform(AtlasError):
    """Affine with a non-invertible linear part."""


@dataclass
class RegionEntry:
    region_id: str
    mesh_path: str
    hemisphere: str
    structure_class: str
    local_transform: np.ndarray | None = None


@dataclass
class AtlasManifest:
    atlas_id: str
    regions: list[RegionEntry]
    global_transform: np.ndarray = field(default_factory=lambda: IDENTITY_3X4.copy())
    hollow: bool = False
    base_dir: Path = field(default_factory=Path)

    def resolve_mesh_path(self, entry: RegionEntry) -> Path:
        return (self.base_dir / entry.mesh_path).resolve()

    def entry_transform(self, entry: RegionEntry) -> np.ndarray:
        """Combined affine: global first, then the entry's local transform."""
        if entry.local_transform is None:
            return self.global_transform
        return compose_affine(entry.local_transform, self.global_transform)


def _parse_affine(obj, key: str) -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=np.float64)
    except (TypeError, ValueError):
        raise ParseError(f"{key}: expected 12 numbers") from None
    if arr.shape == (12,):
        arr = arr.reshape(3, 4)
    if arr.shape != (3, 4):
        raise ParseError(f"{key}: expected 12 numbers (row-major 3x4)")
    if abs(np.linalg.det(arr[:, :3])) <= 1e-9:
        raise ParseError(f"{key}: linear part is singular")
    return arr


def compose_affine(second: np.ndarray, first: np.ndarray) -> np.ndarray:
    """Affine equal to applying `first`, then `second`."""
    a = second[:, :3] @ first[:, :3]
    b = second[:, :3] @ first[:, 3] + second[:, 3]
    return np.hstack([a, b[:, None]])


def load_manifest(path, base_dir=None) -> AtlasManifest:
    """Load and validate a JSON atlas manifest.

    Mesh paths resolve relative to the manifest file unless base_dir is given.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise MissingMesh(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from None

    if not isinstance(doc, dict):
        raise ParseError(f"{path}: manifest must be a JSON object")
    atlas_id = doc.get("atlas_id")
    if not isinstance(atlas_id, str) or not atlas_id:
        raise ParseError("atlas_id: required non-empty string")
    hollow = doc.get("hollow", False)
    if not isinstance(hollow, bool):
        raise ParseError("hollow: expected true/false")
    if "global_transform" in doc:
        transform = _parse_affine(doc["global_transform"], "global_transform")
    else:
        transform = IDENTITY_3X4.copy()

    raw_regions = doc.get("regions")
    if not isinstance(raw_regions, list):
        raise ParseError("regions: required array")
    regions: list[RegionEntry] = []
    claimed: dict[str, set[str]] = {}
    for i, obj in enumerate(raw_regions):
        where = f"regions[{i}]"
        if not isinstance(obj, dict):
            raise ParseError(f"{where}: expected object")
        rid = obj.get("region_id")
        if not isinstance(rid, str) or not rid:
            raise ParseError(f"{where}.region_id: required non-empty string")
        mesh_path = obj.get("mesh_path")
        if not isinstance(mesh_path, str) or not mesh_path:
            raise ParseError(f"{where}.mesh_path: required non-empty string")
        hemi = obj.get("hemisphere")
        if hemi not in HEMISPHERE_TAGS:
            raise ParseError(f"{where}.hemisphere: expected one of {HEMISPHERE_TAGS}")
        cls = obj.get("structure_class")
        if cls not in STRUCTURE_CLASSES:
            raise ParseError(
                f"{where}.structure_class: expected one of {STRUCTURE_CLASSES}"
            )
        local = None
        if "local_transform" in obj:
            local = _parse_affine(obj["local_transform"], f"{where}.local_transform")
        hemis = set(HEMISPHERE_TAGS[:2]) if hemi == "both" else {hemi}
        if claimed.get(rid, set()) & hemis:
            raise DuplicateRegion(f"duplicate region {rid!r} ({hemi})")
        claimed.setdefault(rid, set()).update(hemis)
        regions.append(RegionEntry(rid, mesh_path, hemi, cls, local))

    manifest = AtlasManifest(
        atlas_id=atlas_id,
        regions=regions,
        global_transform=transform,
        hollow=hollow,
        base_dir=Path(base_dir) if base_dir is not None else path.parent,
    )
    for entry in manifest.regions:
        target = manifest.resolve_mesh_path(entry)
        if not target.is_file():
            raise MissingMesh(f"region {entry.region_id!r}: no mesh at {target}")
    return manifest


def save_manifest(manifest: AtlasManifest, path) -> None:
    doc = {
        "atlas_id": manifest.atlas_id,
        "hollow": manifest.hollow,
        "global_transform": [float(v) for v in manifest.global_transform.ravel()],
        "regions": [],
    }
    for entry in manifest.regions:
        obj = {
            "region_id": entry.region_id,
            "mesh_path": entry.mesh_path,
            "hemisphere": entry.hemisphere,
            "structure_class": entry.structure_class,
        }
        if entry.local_transform is not None:
            obj["local_transform"] = [float(v) for v in entry.local_transform.ravel()]
        doc["regions"].append(obj)
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def apply_transform(mesh: Mesh, transform: np.ndarray) -> Mesh:
    """Map every vertex v -> A v + b; normals go through inv(A)^T, renormalized."""
    t = np.asarray(transform, dtype=np.float64)
    if t.shape != (3, 4):
        raise ValueError(f"expected 3x4 affine, got shape {t.shape}")
    a, b = t[:, :3], t[:, 3]
    if abs(np.linalg.det(a)) <= 1e-9:
        raise SingularTransform("affine linear part is singular")
    vertices = mesh.vertices @ a.T + b
    normals = None
    if mesh.normals is not None:
        normals = mesh.normals @ np.linalg.inv(a)  # n' = inv(A)^T n, rows here
        lengths = np.linalg.norm(normals, axis=1)
        ok = lengths > 1e-20
        normals[ok] /= lengths[ok, None]
        normals[~ok] = (0.0, 0.0, 1.0)
    return Mesh(vertices, mesh.triangles.copy(), normals)


def split_hemispheres(
    mesh: Mesh, midline_x: float = 0.0
) -> tuple[Mesh, Mesh]:
    """Split a mesh at the plane x = midline_x into (left, right).

    Triangles wholly on one side keep their geometry; straddling triangles
    are clipped against the plane and re-triangulated.  Cut points land
    exactly on the plane.  Left satisfies x <= midline_x, right x >= midline_x.
    """
    d = mesh.vertices[:, 0] - midline_x
    if mesh.is_empty():
        empty = Mesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int32),
                     np.zeros((0, 3)) if mesh.normals is not None else None)
        return empty, Mesh(empty.vertices.copy(), empty.triangles.copy(),
                           None if mesh.normals is None else empty.normals.copy())

    tri_d = d[mesh.triangles]
    left_whole = tri_d.max(axis=1) <= 0.0
    right_whole = ~left_whole & (tri_d.min(axis=1) >= 0.0)
    straddling = mesh.triangles[~left_whole & ~right_whole]

    def clip_side(keep_nonpositive: bool, whole: np.ndarray) -> Mesh:
        n_orig = mesh.num_vertices
        extra_verts: list[np.ndarray] = []
        extra_norms: list[np.ndarray] = []
        edge_cache: dict[tuple[int, int], int] = {}

        def edge_point(i: int, j: int) -> int:
            a, b = (i, j) if i < j else (j, i)
            idx = edge_cache.get((a, b))
            if idx is not None:
                return idx
            t = d[a] / (d[a] - d[b])
            p = mesh.vertices[a] + t * (mesh.vertices[b] - mesh.vertices[a])
            p = p.copy()
            p[0] = midline_x  # pin the cut exactly onto the plane
            idx = n_orig + len(extra_verts)
            extra_verts.append(p)
            if mesh.normals is not None:
                n = mesh.normals[a] + t * (mesh.normals[b] - mesh.normals[a])
                length = np.linalg.norm(n)
                extra_norms.append(n / length if length > 1e-20 else
                                   np.array([0.0, 0.0, 1.0]))
            edge_cache[(a, b)] = idx
            return idx

        tri_rows: list[tuple[int, int, int]] = []
        for i0, i1, i2 in straddling:
            poly: list[int] = []
            ids = (int(i0), int(i1), int(i2))
            for k in range(3):
                prev, cur = ids[k - 1], ids[k]
                prev_in = d[prev] <= 0.0 if keep_nonpositive else d[prev] >= 0.0
                cur_in = d[cur] <= 0.0 if keep_nonpositive else d[cur] >= 0.0
                if cur_in:
                    if not prev_in:
                        poly.append(edge_point(prev, cur))
                    poly.append(cur)
                elif prev_in:
                    poly.append(edge_point(prev, cur))
            # drop consecutive duplicates from on-plane vertices
            dedup = [v for k, v in enumerate(poly) if v != poly[k - 1]]
            for k in range(1, len(dedup) - 1):
                tri_rows.append((dedup[0], dedup[k], dedup[k + 1]))

        parts = [whole.reshape(-1, 3).astype(np.int64)]
        if tri_rows:
            parts.append(np.asarray(tri_rows, dtype=np.int64))
        all_tris = np.vstack(parts)
        if len(all_tris) == 0:
            return Mesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int32),
                        np.zeros((0, 3)) if mesh.normals is not None else None)

        combined_v = mesh.vertices
        combined_n = mesh.normals
        if extra_verts:
            combined_v = np.vstack([mesh.vertices, np.asarray(extra_verts)])
            if mesh.normals is not None:
                combined_n = np.vstack([mesh.normals, np.asarray(extra_norms)])
        used, inverse = np.unique(all_tris, return_inverse=True)
        return Mesh(
            combined_v[used],
            inverse.reshape(-1, 3).astype(np.int32),
            combined_n[used] if combined_n is not None else None,
        )

    left = clip_side(True, mesh.triangles[left_whole])
    right = clip_side(False, mesh.triangles[right_whole])
    return left, right


def prep_atlas(raw_dir, manifest_in, out_dir) -> AtlasManifest:
    """Normalize, split and export every region of a raw atlas.

    Each region mesh is parsed, moved through global then local transforms,
    given vertex normals, split at the midline (x = 0) and written as
    `<region_id>-lh.ply` / `<region_id>-rh.ply` (binary).  Empty sides are
    written but omitted from the prepared manifest, which carries identity
    transforms and hemisphere-specific entries only.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = load_manifest(manifest_in, base_dir=raw_dir)

    prepared: list[RegionEntry] = []
    for entry in manifest.regions:
        try:
            data = manifest.resolve_mesh_path(entry).read_bytes()
            moved = apply_transform(parse_ply(data), manifest.entry_transform(entry))
            moved = compute_vertex_normals(moved)
            left, right = split_hemispheres(moved, midline_x=0.0)
        except Exception as exc:
            raise type(exc)(f"region {entry.region_id!r}: {exc}") from exc
        for mesh, hemi, suffix in ((left, "left", "-lh"), (right, "right", "-rh")):
            name = f"{entry.region_id}{suffix}.ply"
            (out_dir / name).write_bytes(write_ply(mesh, "binary_little_endian"))
            if mesh.is_empty():
                logger.warning(
                    "region %r: %s hemisphere is empty, omitting manifest entry",
                    entry.region_id, hemi,
                )
                continue
            prepared.append(
                RegionEntry(entry.region_id, name, hemi, entry.structure_class)
            )

    result = AtlasManifest(
        atlas_id=manifest.atlas_id,
        regions=prepared,
        global_transform=IDENTITY_3X4.copy(),
        hollow=manifest.hollow,
        base_dir=out_dir,
    )
    save_manifest(result, out_dir / "manifest.json")
    return result
