import hashlib
import io

import numpy as np
import pytest
from PIL import Image

from atlaspaint.biomarker import parse_biomarker_csv
from atlaspaint.colormap import ColorGradient
from atlaspaint.compose import (
    JobError,
    RenderJob,
    TooFewStages,
    UnknownStage,
    UnsupportedView,
    animation_frames,
    build_scene,
    montage_shape,
    output_name,
    render_job,
    render_montage,
    render_stage_view,
)

TWO_STAGE_CSV = (
    "Image-name-unique,hippocampus-rh,hippocampus-lh,thalamus\n"
    "t0,3,0,1\n"
    "t1,1,2,0.5\n"
)

ASYMMETRIC_CSV = (
    "Image-name-unique,"
    "cortex-rh,cerebellum-rh,hippocampus-rh,olfactory-rh,thalamus-rh,striatum-rh\n"
    "t0,3,3,3,3,3,3\n"
)

SWAPPED_CSV = ASYMMETRIC_CSV.replace("-rh", "-lh")


def make_job(manifest, csv_text, out_prefix, views, resolution=(64, 48),
             shell_alpha=0.0):
    gradient = ColorGradient.default()
    table = parse_biomarker_csv(csv_text, manifest, gradient.k)
    return RenderJob(
        manifest=manifest,
        table=table,
        gradient=gradient,
        views=list(views),
        resolution=resolution,
        shell_alpha=shell_alpha,
        output_prefix=out_prefix,
    )


def decode(path) -> np.ndarray:
    return np.asarray(Image.open(io.BytesIO(path.read_bytes())).convert("RGBA"))


def test_outer_right_selects_right_hemisphere_only(demo_manifest, tmp_path):
    job = make_job(demo_manifest, TWO_STAGE_CSV, tmp_path / "r", ["outer-right"])
    items = build_scene(job, "t0", "cortical-outer-right")
    right_entries = [e for e in demo_manifest.regions if e.hemisphere == "right"]
    assert len(items) == len(right_entries)
    # every selected mesh sits at x >= 0 in this atlas
    for mesh, _ in items:
        assert mesh.vertices[:, 0].min() >= -1e-9


def test_subcortical_with_hidden_shell(demo_manifest, tmp_path):
    job = make_job(demo_manifest, TWO_STAGE_CSV, tmp_path / "r", ["subcortical"],
                   shell_alpha=0.0)
    items = build_scene(job, "t0", "subcortical")
    subcortical = [e for e in demo_manifest.regions
                   if e.structure_class == "subcortical"]
    assert len(items) == len(subcortical)
    assert all(mat.alpha == 1.0 for _, mat in items)


def test_subcortical_with_translucent_shell(demo_manifest, tmp_path):
    job = make_job(demo_manifest, TWO_STAGE_CSV, tmp_path / "r", ["subcortical"],
                   shell_alpha=0.4)
    items = build_scene(job, "t0", "subcortical")
    assert len(items) == len(demo_manifest.regions)
    alphas = {round(mat.alpha, 3) for _, mat in items}
    assert alphas == {1.0, 0.4}


def test_materials_hit_gradient_endpoints(demo_manifest, tmp_path):
    job = make_job(demo_manifest, TWO_STAGE_CSV, tmp_path / "r", ["top"])
    items = build_scene(job, "t0", "top")
    by_key = {}
    for (mesh, mat), entry in zip(
        items, demo_manifest.regions
    ):
        by_key[(entry.region_id, entry.hemisphere)] = mat
    g = job.gradient
    np.testing.assert_allclose(
        by_key[("hippocampus", "right")].base_color, g.anchors[3]
    )
    np.testing.assert_allclose(
        by_key[("hippocampus", "left")].base_color, g.anchors[0]
    )


def test_unknown_stage(demo_manifest, tmp_path):
    job = make_job(demo_manifest, TWO_STAGE_CSV, tmp_path / "r", ["top"])
    with pytest.raises(UnknownStage):
        build_scene(job, "t9", "top")


def test_inner_view_unsupported_for_hollow_atlas(hollow_manifest, tmp_path):
    job = make_job(hollow_manifest, TWO_STAGE_CSV, tmp_path / "r",
                   ["top", "inner-left"])
    with pytest.raises(UnsupportedView):
        build_scene(job, "t0", "cortical-inner-left")
    # non-inner views still fine
    assert build_scene(job, "t0", "top")


def test_render_job_naming_and_count(demo_manifest, tmp_path):
    job = make_job(demo_manifest, TWO_STAGE_CSV, tmp_path / "out" / "brain",
                   ["outer-right", "subcortical", "top"], resolution=(32, 24))
    files = render_job(job)
    assert len(files) == 6  # 2 stages x 3 views
    expected = {
        output_name("brain", s, v)
        for s in ("t0", "t1")
        for v in ("cortical-outer-right", "subcortical", "top")
    }
    assert {f.name for f in files} == expected
    # stages-major ordering
    assert [f.name for f in files[:3]] == [
        "brain_t0_cortical-outer-right.png",
        "brain_t0_subcortical.png",
        "brain_t0_top.png",
    ]


def test_render_job_deterministic(demo_manifest, tmp_path):
    hashes = []
    for run in ("a", "b"):
        job = make_job(demo_manifest, TWO_STAGE_CSV, tmp_path / run / "r",
                       ["top"], resolution=(48, 32))
        files = render_job(job)
        hashes.append([hashlib.sha256(f.read_bytes()).hexdigest() for f in files])
    assert hashes[0] == hashes[1]


def test_render_job_isolates_unsupported_views(hollow_manifest, tmp_path):
    job = make_job(hollow_manifest, TWO_STAGE_CSV, tmp_path / "r",
                   ["top", "inner-right"], resolution=(32, 24))
    with pytest.raises(JobError) as err:
        render_job(job)
    assert "cortical-inner-right" in str(err.value)
    # the supported view still rendered for both stages
    written = sorted(p.name for p in (tmp_path).glob("r_*_top.png"))
    assert written == ["r_t0_top.png", "r_t1_top.png"]
    assert not list(tmp_path.glob("*inner*"))


def test_montage_dimensions_formula(demo_manifest, tmp_path):
    job = make_job(demo_manifest, TWO_STAGE_CSV, tmp_path / "m",
                   ["top", "subcortical"], resolution=(100, 80))
    assert montage_shape(job, 8) == (2 * 100 + 3 * 8, 2 * 80 + 3 * 8)
    path = render_montage(job, pad=8)
    img = decode(path)
    assert img.shape == (184, 224, 4)


def test_montage_single_cell_pad_zero_equals_single_render(demo_manifest, tmp_path):
    csv_one = "Image-name-unique,thalamus\nt0,2\n"
    job = make_job(demo_manifest, csv_one, tmp_path / "m", ["top"],
                   resolution=(40, 30))
    montage = decode(render_montage(job, pad=0))
    single = render_stage_view(job, "t0", "top").to_rgba8()
    np.testing.assert_array_equal(montage, single)


def test_montage_cell_placement_oracle(demo_manifest, tmp_path):
    job = make_job(demo_manifest, TWO_STAGE_CSV, tmp_path / "m",
                   ["top", "outer-right"], resolution=(40, 30))
    pad = 5
    montage = decode(render_montage(job, pad=pad))
    for r, view in enumerate(job.views):
        for c, stage in enumerate(("t0", "t1")):
            cell = render_stage_view(job, stage, view).to_rgba8()
            y, x = pad + r * (30 + pad), pad + c * (40 + pad)
            np.testing.assert_array_equal(
                montage[y:y + 30, x:x + 40], cell,
                err_msg=f"cell {stage}/{view}",
            )


def test_animation_frame_count_and_boundaries(demo_manifest, tmp_path):
    csv3 = (
        "Image-name-unique,hippocampus-rh\n"
        "t0,0\n"
        "t1,1.5\n"
        "t2,3\n"
    )
    job = make_job(demo_manifest, csv3, tmp_path / "a", ["top"],
                   resolution=(32, 24))
    frames = list(animation_frames(job, "top", 4))
    assert len(frames) == 9
    for k, stage in ((0, "t0"), (4, "t1"), (8, "t2")):
        static = render_stage_view(job, stage, "top")
        assert frames[k].color.tobytes() == static.color.tobytes(), f"frame {k}"


def test_animation_two_stage_fpt1(demo_manifest, tmp_path):
    job = make_job(demo_manifest, TWO_STAGE_CSV, tmp_path / "a", ["top"],
                   resolution=(32, 24))
    assert len(list(animation_frames(job, "top", 1))) == 2


def test_animation_needs_two_stages(demo_manifest, tmp_path):
    csv_one = "Image-name-unique,thalamus\nt0,2\n"
    job = make_job(demo_manifest, csv_one, tmp_path / "a", ["top"],
                   resolution=(32, 24))
    with pytest.raises(TooFewStages):
        list(animation_frames(job, "top", 4))


def test_top_view_halves_take_endpoint_colors(demo_manifest, tmp_path):
    job = make_job(demo_manifest, ASYMMETRIC_CSV, tmp_path / "s", ["top"],
                   resolution=(200, 150))
    fb = render_stage_view(job, "t0", "top")
    img = fb.to_rgba8()
    left, right = img[:, :100, :3], img[:, 100:, :3]
    bg = np.array([255, 255, 255], dtype=np.uint8)
    left_fg = left[(left != bg).any(axis=2)]
    right_fg = right[(right != bg).any(axis=2)]
    assert len(left_fg) > 500 and len(right_fg) > 500
    # anchor 0 is grey: channels equal; anchor K is pure red: green/blue zero
    assert (left_fg[:, 0] == left_fg[:, 1]).all()
    assert (left_fg[:, 1] == left_fg[:, 2]).all()
    assert (right_fg[:, 1] == 0).all()
    assert (right_fg[:, 2] == 0).all()


def test_swapping_hemisphere_values_mirrors_top_view(demo_manifest, tmp_path):
    job_a = make_job(demo_manifest, ASYMMETRIC_CSV, tmp_path / "a", ["top"],
                     resolution=(200, 150))
    job_b = make_job(demo_manifest, SWAPPED_CSV, tmp_path / "b", ["top"],
                     resolution=(200, 150))
    img_a = render_stage_view(job_a, "t0", "top").to_rgba8()
    img_b = render_stage_view(job_b, "t0", "top").to_rgba8()
    np.testing.assert_array_equal(img_b, img_a[:, ::-1])


def test_job_validation(demo_manifest):
    gradient = ColorGradient.default()
    table = parse_biomarker_csv(TWO_STAGE_CSV, demo_manifest, gradient.k)
    from atlaspaint.compose import ComposeError

    with pytest.raises(ComposeError):
        RenderJob(demo_manifest, table, gradient, [], (64, 48))
    with pytest.raises(ComposeError):
        RenderJob(demo_manifest, table, gradient, ["top"], (8, 8))
