import math

import pytest

from atlaspaint.atlas import AtlasManifest, RegionEntry
from atlaspaint.biomarker import (
    BadHeader,
    BiomarkerError,
    NegativeValue,
    NonNumericValue,
    UnknownRegion,
    interpolate_stages,
    log_normalize,
    parse_biomarker_csv,
)
from atlaspaint.colormap import OutOfRange


def manifest_with(*entries):
    return AtlasManifest("test", [RegionEntry(*e) for e in entries])


@pytest.fixture
def manifest():
    return manifest_with(
        ("CA1", "ca1-lh.ply", "left", "subcortical"),
        ("CA1", "ca1-rh.ply", "right", "subcortical"),
        ("CTX", "ctx-lh.ply", "left", "cortical"),
        ("CTX", "ctx-rh.ply", "right", "cortical"),
    )


def test_unsuffixed_column_fans_out(manifest):
    table = parse_biomarker_csv("Image-name-unique,CA1\nt0,2.0\n", manifest, 3)
    assert table.value("t0", "CA1", "left") == 2.0
    assert table.value("t0", "CA1", "right") == 2.0


def test_suffixed_columns_bind_one_hemisphere(manifest):
    text = "Image-name-unique,CA1-lh,CA1-rh\nt0,1,3\n"
    table = parse_biomarker_csv(text, manifest, 3)
    assert table.value("t0", "CA1", "left") == 1.0
    assert table.value("t0", "CA1", "right") == 3.0


def test_missing_region_defaults_to_zero(manifest):
    table = parse_biomarker_csv("Image-name-unique,CA1\nt0,2.0\n", manifest, 3)
    assert table.value("t0", "CTX", "left") == 0.0
    assert table.value("t0", "CTX", "right") == 0.0


def test_clamp_policy(manifest):
    text = "Image-name-unique,CA1\nt0,-0.5\n"
    table = parse_biomarker_csv(text, manifest, 3, strict=False)
    assert table.value("t0", "CA1", "left") == 0.0
    assert any("clamped" in w for w in table.warnings)
    with pytest.raises(OutOfRange):
        parse_biomarker_csv(text, manifest, 3, strict=True)
    high = "Image-name-unique,CA1\nt0,3.5\n"
    table = parse_biomarker_csv(high, manifest, 3, strict=False)
    assert table.value("t0", "CA1", "left") == 3.0


def test_bad_header(manifest):
    with pytest.raises(BadHeader):
        parse_biomarker_csv("Name,CA1\nt0,1\n", manifest, 3)
    with pytest.raises(BadHeader):
        parse_biomarker_csv("", manifest, 3)


def test_unknown_region_strict_vs_lenient(manifest):
    text = "Image-name-unique,NOPE\nt0,1\n"
    with pytest.raises(UnknownRegion):
        parse_biomarker_csv(text, manifest, 3)
    table = parse_biomarker_csv(text, manifest, 3, strict=False)
    assert table.stages == ["t0"]
    assert any("NOPE" in w for w in table.warnings)


def test_unknown_hemisphere_strict():
    manifest = manifest_with(("CA1", "ca1-rh.ply", "right", "subcortical"))
    with pytest.raises(UnknownRegion):
        parse_biomarker_csv("Image-name-unique,CA1-lh\nt0,1\n", manifest, 3)


def test_non_numeric_value_names_cell(manifest):
    with pytest.raises(NonNumericValue) as err:
        parse_biomarker_csv("Image-name-unique,CA1\nt0,abc\n", manifest, 3)
    assert "t0" in str(err.value) and "CA1" in str(err.value)


def test_duplicate_stage_rejected(manifest):
    text = "Image-name-unique,CA1\nt0,1\nt0,2\n"
    with pytest.raises(BiomarkerError):
        parse_biomarker_csv(text, manifest, 3)


def test_raw_mode_skips_range_check(manifest):
    table = parse_biomarker_csv(
        "Image-name-unique,CA1\nt0,250.0\n", manifest, 3, raw=True
    )
    assert table.value("t0", "CA1", "left") == 250.0


def test_to_csv_roundtrip_preserves_stages(manifest):
    text = "Image-name-unique,CA1-lh,CA1-rh\nbaseline,1,3\nweek4,2,0.5\n"
    table = parse_biomarker_csv(text, manifest, 3)
    again = parse_biomarker_csv(table.to_csv(), manifest, 3)
    assert again.stages == ["baseline", "week4"]
    assert again.per_stage == table.per_stage


# log normalization


def test_log_anchors():
    raw = {"a": 1.0, "b": 1000.0, "c": 5.0}
    out = log_normalize(raw, fold_range=1000.0, k=3)
    assert out["a"] == 0.0
    assert out["b"] == 3.0


def test_log_saturates_beyond_fold_range():
    out = log_normalize({"a": 1.0, "b": 5e6}, fold_range=1000.0, k=3)
    assert out["b"] == 3.0


def test_log_half_scale():
    out = log_normalize({"a": 1.0, "b": math.sqrt(1000.0)}, fold_range=1000.0, k=3)
    assert abs(out["b"] - 1.5) < 1e-12


def test_log_zero_maps_to_zero():
    out = log_normalize({"a": 0.0, "b": 2.0}, fold_range=1000.0, k=3)
    assert out["a"] == 0.0


def test_log_negative_rejected():
    with pytest.raises(NegativeValue):
        log_normalize({"a": -1.0}, k=3)


def test_log_monotone_and_in_range():
    import numpy as np

    rng = np.random.default_rng(5)
    xs = np.sort(rng.uniform(1e-4, 1e5, size=1000))
    out = log_normalize({i: float(x) for i, x in enumerate(xs)}, k=3)
    values = [out[i] for i in range(len(xs))]
    assert all(b >= a - 1e-15 for a, b in zip(values, values[1:]))
    assert min(values) == 0.0 and max(values) <= 3.0


def test_log_ref_override():
    out = log_normalize({"a": 10.0, "b": 100.0}, fold_range=1000.0, k=3, ref=1.0)
    assert abs(out["a"] - 1.0) < 1e-12
    assert abs(out["b"] - 2.0) < 1e-12


def test_table_log_normalized(manifest):
    table = parse_biomarker_csv(
        "Image-name-unique,CA1-lh,CA1-rh\nt0,1,10\nt1,100,1000\n",
        manifest, 3, raw=True,
    )
    normed = table.log_normalized(fold_range=1000.0)
    assert normed.value("t0", "CA1", "left") == 0.0
    assert abs(normed.value("t0", "CA1", "right") - 1.0) < 1e-12
    assert normed.value("t1", "CA1", "right") == 3.0


# stage interpolation


def test_interpolation_endpoints(manifest):
    text = "Image-name-unique,CA1-lh,CA1-rh\nt0,1,3\nt1,2,0\n"
    table = parse_biomarker_csv(text, manifest, 3)
    assert interpolate_stages(table, 0, 1, 0.0) == table.stage_values("t0")
    assert interpolate_stages(table, 0, 1, 1.0) == table.stage_values("t1")


def test_interpolation_quarter(manifest):
    text = "Image-name-unique,CA1\nt0,1\nt1,3\n"
    table = parse_biomarker_csv(text, manifest, 3)
    mid = interpolate_stages(table, 0, 1, 0.25)
    assert mid[("CA1", "left")] == 1.5


def test_interpolation_stays_in_bounds(manifest):
    import numpy as np

    text = "Image-name-unique,CA1-lh,CA1-rh\nt0,0.25,2.75\nt1,3,0.5\n"
    table = parse_biomarker_csv(text, manifest, 3)
    v0, v1 = table.stage_values("t0"), table.stage_values("t1")
    for t in np.linspace(0, 1, 37):
        out = interpolate_stages(table, 0, 1, float(t))
        for key, v in out.items():
            lo = min(v0[key], v1[key])
            hi = max(v0[key], v1[key])
            assert lo - 1e-12 <= v <= hi + 1e-12


def test_interpolation_bad_index(manifest):
    table = parse_biomarker_csv("Image-name-unique,CA1\nt0,1\n", manifest, 3)
    with pytest.raises(BiomarkerError):
        interpolate_stages(table, 0, 5, 0.5)
