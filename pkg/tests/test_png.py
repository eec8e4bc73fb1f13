import io

import numpy as np
import pytest
from PIL import Image

from atlaspaint.png import encode_png, png_bytes
from atlaspaint.raster import Framebuffer


def decode(data: bytes) -> np.ndarray:
    return np.asarray(Image.open(io.BytesIO(data)).convert("RGBA"))


def test_single_white_pixel(tmp_path):
    fb = Framebuffer(1, 1, background=(1, 1, 1))
    path = encode_png(fb, tmp_path / "white.png")
    pixels = decode(path.read_bytes())
    np.testing.assert_array_equal(pixels, [[[255, 255, 255, 255]]])


def test_roundtrip_exact():
    rng = np.random.default_rng(12)
    rgba = rng.integers(0, 256, size=(33, 17, 4), dtype=np.uint8)
    np.testing.assert_array_equal(decode(png_bytes(rgba)), rgba)


def test_linear_half_encodes_to_188(tmp_path):
    fb = Framebuffer(2, 2, background=(0.5, 0.5, 0.5))
    path = encode_png(fb, tmp_path / "grey.png")
    pixels = decode(path.read_bytes())
    assert (pixels[..., :3] == 188).all()


def test_row_order_top_down():
    rgba = np.zeros((2, 1, 4), dtype=np.uint8)
    rgba[0] = (255, 0, 0, 255)
    rgba[1] = (0, 255, 0, 255)
    pixels = decode(png_bytes(rgba))
    np.testing.assert_array_equal(pixels[0, 0], [255, 0, 0, 255])
    np.testing.assert_array_equal(pixels[1, 0], [0, 255, 0, 255])


def test_deterministic_bytes():
    rng = np.random.default_rng(3)
    rgba = rng.integers(0, 256, size=(20, 20, 4), dtype=np.uint8)
    assert png_bytes(rgba) == png_bytes(rgba.copy())


def test_bad_shape_rejected():
    with pytest.raises(ValueError):
        png_bytes(np.zeros((4, 4, 3), dtype=np.uint8))


def test_io_error(tmp_path):
    from atlaspaint.png import IoError

    fb = Framebuffer(1, 1)
    with pytest.raises(IoError):
        encode_png(fb, tmp_path / "missing-dir" / "x.png")
