"""PLY 1.0 reader and writer (ASCII and binary little-endian).

Covers the subset the atlas pipeline needs: float32 vertex positions
(plus optional nx/ny/nz normals), triangle/polygon faces declared as
`property list uchar int vertex_indices`.  Unknown vertex properties and
unknown elements are skipped.  Header grammar notes live in docs/ply.md.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .mesh import Mesh


class PlyError(Exception):
    """Malformed or unsupported PLY input."""


class MissingMagic(PlyError):
    """Input does not start with the 'ply' magic line."""


class UnsupportedFormat(PlyError):
    """Format or property layout outside the supported subset."""


class CountMismatch(PlyError):
    """Body ends before the declared element counts are satisfied."""


class IndexOutOfRange(PlyError):
    """Face references a vertex that does not exist."""


# type name -> (size in bytes, struct char, numpy little-endian format)
_TYPES = {
    "char": (1, "b", "<i1"), "int8": (1, "b", "<i1"),
    "uchar": (1, "B", "<u1"), "uint8": (1, "B", "<u1"),
    "short": (2, "h", "<i2"), "int16": (2, "h", "<i2"),
    "ushort": (2, "H", "<u2"), "uint16": (2, "H", "<u2"),
    "int": (4, "i", "<i4"), "int32": (4, "i", "<i4"),
    "uint": (4, "I", "<u4"), "uint32": (4, "I", "<u4"),
    "float": (4, "f", "<f4"), "float32": (4, "f", "<f4"),
    "double": (8, "d", "<f8"), "float64": (8, "d", "<f8"),
}

_FACE_LIST_NAMES = ("vertex_indices", "vertex_index")
_INDEX_TYPES = ("int", "int32", "uint", "uint32")


@dataclass
class _Prop:
    name: str
    dtype: str
    count_dtype: str | None = None  # set for list properties

    @property
    def is_list(self) -> bool:
        return self.count_dtype is not None


@dataclass
class _Element:
    name: str
    count: int
    props: list[_Prop] = field(default_factory=list)


def _parse_header(data: bytes) -> tuple[str, list[_Element], int]:
    """Return (format, elements, offset of first body byte)."""
    if not data.startswith(b"ply"):
        raise MissingMagic("not a PLY file (missing 'ply' magic)")
    end = data.find(b"end_header")
    if end < 0:
        raise PlyError("header has no end_header line")
    body_start = data.find(b"\n", end)
    if body_start < 0:
        raise PlyError("end_header line is not terminated")
    body_start += 1

    header = data[:end].decode("ascii", errors="replace")
    fmt = None
    elements: list[_Element] = []
    for raw in header.splitlines()[1:]:
        line = raw.strip()
        if not line or line.startswith("comment") or line.startswith("obj_info"):
            continue
        parts = line.split()
        if parts[0] == "format":
            if len(parts) < 3:
                raise PlyError(f"bad format line: {line!r}")
            if parts[1] not in ("ascii", "binary_little_endian"):
                raise UnsupportedFormat(f"unsupported PLY format {parts[1]!r}")
            fmt = parts[1]
        elif parts[0] == "element":
            if len(parts) != 3:
                raise PlyError(f"bad element line: {line!r}")
            try:
                count = int(parts[2])
            except ValueError:
                raise PlyError(f"bad element count in {line!r}") from None
            if count < 0:
                raise PlyError(f"negative element count in {line!r}")
            elements.append(_Element(parts[1], count))
        elif parts[0] == "property":
            if not elements:
                raise PlyError("property declared before any element")
            if parts[1] == "list":
                if len(parts) != 5:
                    raise PlyError(f"bad list property line: {line!r}")
                _require_type(parts[2], line)
                _require_type(parts[3], line)
                elements[-1].props.append(_Prop(parts[4], parts[3], count_dtype=parts[2]))
            else:
                if len(parts) != 3:
                    raise PlyError(f"bad property line: {line!r}")
                _require_type(parts[1], line)
                elements[-1].props.append(_Prop(parts[2], parts[1]))
        else:
            # vendors add extension keywords; skip anything unrecognized
            continue
    if fmt is None:
        raise PlyError("header has no format line")
    return fmt, elements, body_start


def _require_type(name: str, line: str) -> None:
    if name not in _TYPES:
        raise UnsupportedFormat(f"unknown property type {name!r} in {line!r}")


def _vertex_columns(el: _Element) -> tuple[list[str], bool]:
    """Check x/y/z are float32 scalars; report whether nx/ny/nz are present."""
    scalars = {p.name: p.dtype for p in el.props if not p.is_list}
    for axis in ("x", "y", "z"):
        if axis not in scalars:
            raise UnsupportedFormat(f"vertex element lacks property {axis!r}")
        if _TYPES[scalars[axis]][2] != "<f4":
            raise UnsupportedFormat(f"vertex property {axis!r} must be float32")
    has_normals = all(
        n in scalars and _TYPES[scalars[n]][2] == "<f4" for n in ("nx", "ny", "nz")
    )
    return ["x", "y", "z"], has_normals


def _face_list_prop(el: _Element) -> _Prop:
    for p in el.props:
        if p.is_list and p.name in _FACE_LIST_NAMES:
            if p.count_dtype not in ("uchar", "uint8"):
                raise UnsupportedFormat(
                    f"face list count type must be uchar, got {p.count_dtype!r}"
                )
            if p.dtype not in _INDEX_TYPES:
                raise UnsupportedFormat(
                    f"face index type must be int, got {p.dtype!r}"
                )
            return p
    raise UnsupportedFormat("face element has no vertex_indices list property")


def _triangulate(polys: list[list[int]], n_vertices: int) -> np.ndarray:
    tris: list[tuple[int, int, int]] = []
    for poly in polys:
        for idx in poly:
            if idx < 0 or idx >= n_vertices:
                raise IndexOutOfRange(
                    f"face index {idx} out of range for {n_vertices} vertices"
                )
        # fan triangulation from vertex 0; faces with <3 vertices are ignored
        for k in range(1, len(poly) - 1):
            tris.append((poly[0], poly[k], poly[k + 1]))
    return np.asarray(tris, dtype=np.int32).reshape(-1, 3)


def parse_ply(data: bytes) -> Mesh:
    """Parse PLY bytes into a Mesh.

    Raises MissingMagic, UnsupportedFormat, CountMismatch or IndexOutOfRange.
    Trailing bytes after the declared elements are ignored.
    """
    fmt, elements, offset = _parse_header(data)
    vertices = np.zeros((0, 3), dtype=np.float64)
    normals: np.ndarray | None = None
    polys: list[list[int]] = []
    seen_vertex = False

    if fmt == "ascii":
        tokens = data[offset:].split()
        pos = 0

        def take(n: int) -> list[bytes]:
            nonlocal pos
            if pos + n > len(tokens):
                raise CountMismatch("ASCII body ends before declared counts")
            out = tokens[pos:pos + n]
            pos += n
            return out

        for el in elements:
            if el.name == "vertex" and not seen_vertex:
                seen_vertex = True
                _, has_normals = _vertex_columns(el)
                rows = np.empty((el.count, len(el.props)), dtype=np.float64)
                if any(p.is_list for p in el.props):
                    raise UnsupportedFormat("list property on vertex element")
                for i in range(el.count):
                    try:
                        rows[i] = [float(t) for t in take(len(el.props))]
                    except ValueError as exc:
                        raise PlyError(f"bad vertex value: {exc}") from None
                names = [p.name for p in el.props]
                cols = [names.index(a) for a in ("x", "y", "z")]
                vertices = rows[:, cols].astype(np.float32).astype(np.float64)
                if has_normals:
                    ncols = [names.index(a) for a in ("nx", "ny", "nz")]
                    normals = rows[:, ncols].astype(np.float32).astype(np.float64)
            elif el.name == "face":
                face_prop = _face_list_prop(el)
                for _ in range(el.count):
                    for p in el.props:
                        if p.is_list:
                            try:
                                n = int(take(1)[0])
                                items = [int(t) for t in take(n)]
                            except ValueError as exc:
                                raise PlyError(f"bad face value: {exc}") from None
                            if p is face_prop:
                                polys.append(items)
                        else:
                            take(1)
            else:
                for _ in range(el.count):
                    for p in el.props:
                        if p.is_list:
                            try:
                                n = int(take(1)[0])
                            except ValueError as exc:
                                raise PlyError(f"bad list count: {exc}") from None
                            take(n)
                        else:
                            take(1)
    else:
        body = data
        pos = offset

        def need(nbytes: int) -> int:
            nonlocal pos
            if pos + nbytes > len(body):
                raise CountMismatch("binary body ends before declared counts")
            start = pos
            pos += nbytes
            return start

        for el in elements:
            all_scalar = not any(p.is_list for p in el.props)
            if el.name == "vertex" and not seen_vertex and all_scalar:
                seen_vertex = True
                _, has_normals = _vertex_columns(el)
                dt = np.dtype([(p.name, _TYPES[p.dtype][2]) for p in el.props])
                start = need(dt.itemsize * el.count)
                rec = np.frombuffer(body, dtype=dt, count=el.count, offset=start)
                vertices = (
                    np.stack([rec["x"], rec["y"], rec["z"]], axis=1).astype(np.float64)
                )
                if has_normals:
                    normals = (
                        np.stack([rec["nx"], rec["ny"], rec["nz"]], axis=1)
                        .astype(np.float64)
                    )
            elif el.name == "face":
                face_prop = _face_list_prop(el)
                for _ in range(el.count):
                    for p in el.props:
                        if p.is_list:
                            csize, cchar, _ = _TYPES[p.count_dtype]
                            isize, ichar, _ = _TYPES[p.dtype]
                            (n,) = struct.unpack_from(
                                "<" + cchar, body, need(csize)
                            )
                            items = struct.unpack_from(
                                f"<{n}{ichar}", body, need(isize * n)
                            )
                            if p is face_prop:
                                polys.append(list(items))
                        else:
                            need(_TYPES[p.dtype][0])
            else:
                if all_scalar:
                    stride = sum(_TYPES[p.dtype][0] for p in el.props)
                    need(stride * el.count)
                else:
                    for _ in range(el.count):
                        for p in el.props:
                            if p.is_list:
                                csize, cchar, _ = _TYPES[p.count_dtype]
                                (n,) = struct.unpack_from(
                                    "<" + cchar, body, need(csize)
                                )
                                need(_TYPES[p.dtype][0] * n)
                            else:
                                need(_TYPES[p.dtype][0])

    triangles = _triangulate(polys, len(vertices))
    return Mesh(vertices, triangles, normals)


def _fmt_f32(x: float) -> str:
    # shortest decimal that reparses to the same float32
    return np.format_float_positional(np.float32(x), unique=True, trim="-")


def write_ply(mesh: Mesh, fmt: str = "binary_little_endian") -> bytes:
    """Serialize a Mesh to PLY bytes; fmt is 'ascii' or 'binary_little_endian'.

    Positions (and normals, when present) are written as float32.
    """
    if fmt not in ("ascii", "binary_little_endian"):
        raise ValueError(f"unknown PLY format {fmt!r}")
    with_normals = mesh.normals is not None
    header = ["ply", f"format {fmt} 1.0"]
    header.append(f"element vertex {mesh.num_vertices}")
    header += ["property float x", "property float y", "property float z"]
    if with_normals:
        header += ["property float nx", "property float ny", "property float nz"]
    header.append(f"element face {mesh.num_triangles}")
    header.append("property list uchar int vertex_indices")
    header.append("end_header")
    out = bytearray(("\n".join(header) + "\n").encode("ascii"))

    vdata = mesh.vertices.astype(np.float32)
    ndata = mesh.normals.astype(np.float32) if with_normals else None
    if fmt == "ascii":
        for i in range(mesh.num_vertices):
            row = [_fmt_f32(v) for v in vdata[i]]
            if ndata is not None:
                row += [_fmt_f32(v) for v in ndata[i]]
            out += (" ".join(row) + "\n").encode("ascii")
        for tri in mesh.triangles:
            out += f"3 {tri[0]} {tri[1]} {tri[2]}\n".encode("ascii")
    else:
        if with_normals:
            inter = np.hstack([vdata, ndata]).astype("<f4")
        else:
            inter = vdata.astype("<f4")
        out += inter.tobytes()
        if mesh.num_triangles:
            face = np.zeros(
                mesh.num_triangles,
                dtype=np.dtype([("n", "<u1"), ("idx", "<i4", (3,))]),
            )
            face["n"] = 3
            face["idx"] = mesh.triangles
            out += face.tobytes()
    return bytes(out)
