import numpy as np
import pytest

from atlaspaint.colormap import (
    BadColor,
    ColorGradient,
    OutOfRange,
    linear_to_srgb,
    linear_to_srgb8,
    parse_hex_color,
    srgb_to_linear,
    value_to_color,
)


def test_hex_black_white():
    assert parse_hex_color("#000000") == (0.0, 0.0, 0.0)
    assert parse_hex_color("#FFFFFF") == (1.0, 1.0, 1.0)


def test_hex_mid_grey_transfer():
    # sRGB transfer function evaluated at 128/255
    for c in parse_hex_color("#808080"):
        assert abs(c - 0.21586) < 1e-5


def test_bad_colors():
    for text in ("#GGGGGG", "808080", "#12345", "#1234567", "red", 42):
        with pytest.raises(BadColor):
            parse_hex_color(text)


def test_endpoints_exact():
    g = ColorGradient.default()
    np.testing.assert_array_equal(value_to_color(0.0, g), g.anchors[0])
    np.testing.assert_array_equal(value_to_color(float(g.k), g), g.anchors[g.k])
    for v in range(g.k + 1):
        np.testing.assert_array_equal(value_to_color(float(v), g), g.anchors[v])


def test_midpoint_between_black_and_white():
    g = ColorGradient([[1, 0, 0], [0, 0, 0], [1, 1, 1], [0, 1, 0]])
    np.testing.assert_allclose(value_to_color(1.5, g), [0.5, 0.5, 0.5], atol=1e-12)


def test_out_of_range():
    g = ColorGradient.default()
    with pytest.raises(OutOfRange):
        value_to_color(-0.01, g)
    with pytest.raises(OutOfRange):
        value_to_color(g.k + 0.01, g)


def test_continuity():
    g = ColorGradient.default()
    vs = np.linspace(0, g.k, 997)
    for v in vs[:-1]:
        a = value_to_color(float(v), g)
        b = value_to_color(float(v) + 1e-6, g)
        assert np.abs(a - b).max() < 1e-5


def test_monotone_gradient_gives_monotone_output():
    g = ColorGradient([[0, 0, 0], [0.2, 0.3, 0.1], [0.5, 0.6, 0.4], [1, 1, 1]])
    prev = value_to_color(0.0, g)
    for v in np.linspace(0, 3, 301)[1:]:
        cur = value_to_color(float(v), g)
        assert (cur >= prev - 1e-12).all()
        prev = cur


def test_gradient_validation():
    with pytest.raises(BadColor):
        ColorGradient([[0, 0, 0]])
    with pytest.raises(BadColor):
        ColorGradient([[0, 0, 0], [1.5, 0, 0]])


def test_srgb_linear_inverse():
    xs = np.linspace(0, 1, 513)
    np.testing.assert_allclose(srgb_to_linear(linear_to_srgb(xs)), xs, atol=1e-12)


def test_linear_half_encodes_to_188():
    assert linear_to_srgb8(np.array([0.5]))[0] == 188
