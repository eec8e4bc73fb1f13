"""Scene assembly per named view, render jobs, montages and animations.

View selection rules: lateral outer/inner views show one hemisphere's
meshes; top/bottom/subcortical show both.  The subcortical view draws
subcortical structures opaque and wraps them in the cortical shell at
shell_alpha (hidden at 0).  Montages lay views as rows and stages as
columns; animations interpolate biomarker values linearly between stages.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .atlas import IDENTITY_3X4, AtlasManifest, apply_transform
from .biomarker import BiomarkerTable, interpolate_stages
from .camera import INNER_VIEWS, canonical_view, named_view_camera
from .colormap import ColorGradient, value_to_color
from .gifenc import encode_gif
from .mesh import Mesh, compute_vertex_normals
from .png import encode_png
from .ply import parse_ply
from .raster import Framebuffer, Material, render_scene

_LATERAL_HEMI = {
    "cortical-outer-left": "left",
    "cortical-inner-left": "left",
    "cortical-outer-right": "right",
    "cortical-inner-right": "right",
}

_SAFE_NAME = re.compile(r"[^A-Za-z0-9._-]+")


class ComposeError(Exception):
    """Scene assembly or job failure."""


class UnknownStage(ComposeError):
    """Stage label not present in the biomarker table."""


class UnsupportedView(ComposeError):
    """View not renderable for this atlas (inner views of hollow atlases)."""


class TooFewStages(ComposeError):
    """Animation needs at least two stages."""


class JobError(ComposeError):
    """One or more (stage, view) renders failed; successful outputs remain."""

    def __init__(self, failures: list[tuple[str, str, str]]):
        self.failures = failures
        lines = ", ".join(f"{stage}/{view}: {msg}" for stage, view, msg in failures)
        super().__init__(f"render failures: {lines}")


def safe_name(label: str) -> str:
    """Stage/view labels become filename chunks; neutralize separators."""
    return _SAFE_NAME.sub("-", label) or "_"


@dataclass
class RenderJob:
    """Everything one render run needs; the unit of work for CLI and service."""

    manifest: AtlasManifest
    table: BiomarkerTable
    gradient: ColorGradient
    views: list[str]
    resolution: tuple[int, int]
    shell_alpha: float = 0.0
    output_prefix: str | Path = "render"
    background: tuple[float, float, float] = (1.0, 1.0, 1.0)
    _meshes: dict[int, Mesh] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.views:
            raise ComposeError("job needs at least one view")
        self.views = [canonical_view(v) for v in self.views]
        w, h = self.resolution
        if w < 16 or h < 16:
            raise ComposeError(f"resolution {w}x{h} below the 16x16 minimum")
        self.resolution = (int(w), int(h))
        known = {e.region_id for e in self.manifest.regions}
        for stage in self.table.stages:
            for region, _ in self.table.per_stage[stage]:
                if region not in known:
                    raise ComposeError(
                        f"table region {region!r} not present in atlas "
                        f"{self.manifest.atlas_id!r}"
                    )

    def region_mesh(self, index: int) -> Mesh:
        """Load (and cache) a region mesh, transformed with normals ready."""
        mesh = self._meshes.get(index)
        if mesh is None:
            entry = self.manifest.regions[index]
            mesh = parse_ply(self.manifest.resolve_mesh_path(entry).read_bytes())
            transform = self.manifest.entry_transform(entry)
            if not np.array_equal(transform, IDENTITY_3X4):
                mesh = apply_transform(mesh, transform)
            if mesh.normals is None:
                mesh = compute_vertex_normals(mesh)
            self._meshes[index] = mesh
        return mesh


def _scene_items(job: RenderJob, values: dict, view: str):
    view = canonical_view(view)
    if view in INNER_VIEWS and job.manifest.hollow:
        raise UnsupportedView(
            f"view {view!r} is unsupported for hollow atlas "
            f"{job.manifest.atlas_id!r} (unclosed hemisphere meshes)"
        )
    lateral = _LATERAL_HEMI.get(view)
    items = []
    for index, entry in enumerate(job.manifest.regions):
        if lateral is not None and entry.hemisphere != lateral:
            continue
        alpha = 1.0
        if view == "subcortical" and entry.structure_class == "cortical":
            if job.shell_alpha <= 0.0:
                continue
            alpha = float(job.shell_alpha)
        hemi = entry.hemisphere if entry.hemisphere != "both" else "left"
        value = values.get((entry.region_id, hemi), 0.0)
        color = tuple(value_to_color(value, job.gradient))
        items.append((job.region_mesh(index), Material(color, alpha)))
    return items


def build_scene(job: RenderJob, stage: str, view: str):
    """(Mesh, Material) list for one stage and view, in manifest order."""
    if stage not in job.table.per_stage:
        raise UnknownStage(f"stage {stage!r} not in table "
                           f"(stages: {', '.join(job.table.stages)})")
    return _scene_items(job, job.table.per_stage[stage], view)


def _scene_bounds(items):
    boxes = [m.bounds() for m, _ in items if m.bounds() is not None]
    if not boxes:
        return None
    lo = np.min([b[0] for b in boxes], axis=0)
    hi = np.max([b[1] for b in boxes], axis=0)
    return lo, hi


def _render_values(job: RenderJob, values: dict, view: str) -> Framebuffer:
    items = _scene_items(job, values, view)
    cam = named_view_camera(view, _scene_bounds(items))
    width, height = job.resolution
    return render_scene(items, cam, width, height, job.background)


def render_stage_view(job: RenderJob, stage: str, view: str) -> Framebuffer:
    if stage not in job.table.per_stage:
        raise UnknownStage(f"stage {stage!r} not in table")
    return _render_values(job, job.table.per_stage[stage], view)


def output_name(prefix: str, stage: str, view: str) -> str:
    return f"{prefix}_{safe_name(stage)}_{safe_name(view)}.png"


def render_job(job: RenderJob) -> list[Path]:
    """One PNG per (stage, view), stages-major; failed views are skipped
    and reported together at the end via JobError."""
    prefix = Path(job.output_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    failures: list[tuple[str, str, str]] = []
    for stage in job.table.stages:
        for view in job.views:
            try:
                fb = render_stage_view(job, stage, view)
            except ComposeError as exc:
                failures.append((stage, view, str(exc)))
                continue
            path = prefix.parent / output_name(prefix.name, stage, view)
            encode_png(fb, path)
            written.append(path)
    if failures:
        raise JobError(failures)
    return written


def montage_shape(job: RenderJob, pad: int) -> tuple[int, int]:
    cols = len(job.table.stages)
    rows = len(job.views)
    w, h = job.resolution
    return cols * w + (cols + 1) * pad, rows * h + (rows + 1) * pad


def render_montage(job: RenderJob, pad: int = 8, background=None) -> Path:
    """Stage-column x view-row grid (time runs left to right)."""
    if not job.table.stages:
        raise UnknownStage("montage needs at least one stage")
    if pad < 0:
        raise ComposeError("pad must be nonnegative")
    background = job.background if background is None else tuple(background)
    for view in job.views:
        if view in INNER_VIEWS and job.manifest.hollow:
            raise UnsupportedView(f"view {view!r} unsupported for hollow atlas")

    width, height = montage_shape(job, pad)
    w, h = job.resolution
    color = np.empty((height, width, 3), dtype=np.float64)
    color[:] = background
    alpha = np.ones((height, width), dtype=np.float64)
    for r, view in enumerate(job.views):
        for c, stage in enumerate(job.table.stages):
            fb = render_stage_view(job, stage, view)
            y = pad + r * (h + pad)
            x = pad + c * (w + pad)
            color[y:y + h, x:x + w] = fb.color
            alpha[y:y + h, x:x + w] = fb.alpha

    out = Framebuffer(width, height, background)
    out.color = color
    out.alpha = alpha
    prefix = Path(job.output_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    path = prefix.parent / f"{prefix.name}_montage.png"
    encode_png(out, path)
    return path


def animation_frames(job: RenderJob, view: str, frames_per_transition: int):
    """Yield per-frame framebuffers; frame k of (S-1)*fpt + 1 interpolates
    between the enclosing stages at uniform t.  Boundary frames equal the
    static stage renders exactly."""
    stages = job.table.stages
    if len(stages) < 2:
        raise TooFewStages("animation needs at least two stages")
    if frames_per_transition < 1:
        raise ComposeError("frames_per_transition must be >= 1")
    total = (len(stages) - 1) * frames_per_transition + 1
    for k in range(total):
        seg = min(k // frames_per_transition, len(stages) - 2)
        t = (k - seg * frames_per_transition) / frames_per_transition
        values = interpolate_stages(job.table, seg, seg + 1, t)
        yield _render_values(job, values, view)


def render_animation(
    job: RenderJob,
    view: str,
    frames_per_transition: int = 4,
    delay_cs: int = 50,
    dither: bool = False,
) -> Path:
    """Encode the stage-interpolation sequence as a looping GIF."""
    view = canonical_view(view)
    frames = [
        fb.to_rgba8()[..., :3]
        for fb in animation_frames(job, view, frames_per_transition)
    ]
    data = encode_gif(frames, delay_cs=delay_cs, loop=0, dither=dither)
    prefix = Path(job.output_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    path = prefix.parent / f"{prefix.name}_{safe_name(view)}.gif"
    path.write_bytes(data)
    return path
