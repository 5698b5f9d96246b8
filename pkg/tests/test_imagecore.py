import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from skimage import color

from monocolor.imagecore import (
    LabImage,
    PairGeometry,
    gray_of_color,
    intensity_match,
    lab_to_rgb,
    read_image,
    rgb_to_lab,
    upsample_bicubic,
    write_image,
)


def px(*rgb):
    return np.array(rgb, dtype=float).reshape(1, 1, 3)


def test_black_and_white_on_neutral_axis():
    black = rgb_to_lab(px(0, 0, 0))
    white = rgb_to_lab(px(1, 1, 1))
    assert black.l[0, 0] == pytest.approx(0, abs=1e-12)
    assert white.l[0, 0] == pytest.approx(1, abs=1e-9)
    for lab in (black, white):
        assert lab.a[0, 0] == pytest.approx(128 / 255, abs=1e-6)
        assert lab.b[0, 0] == pytest.approx(128 / 255, abs=1e-6)


def test_lab_matches_reference_conversion():
    rng = np.random.default_rng(3)
    cols = np.vstack([[0.5, 0.5, 0.5], rng.random((9, 3))]).reshape(1, 10, 3)
    ref = color.rgb2lab(cols, illuminant="D65")
    ours = rgb_to_lab(cols)
    # skimage uses a rounded D65 white; the gap stays below 0.01 CIELAB units
    assert np.allclose(ours.l * 100, ref[..., 0], atol=1e-2)
    assert np.allclose(ours.a * 255 - 128, ref[..., 1], atol=1e-2)
    assert np.allclose(ours.b * 255 - 128, ref[..., 2], atol=1e-2)


def test_lab_to_rgb_neutral_extremes():
    neutral = np.full((1, 1), 128 / 255)
    assert np.allclose(lab_to_rgb(LabImage(np.zeros((1, 1)), neutral, neutral)), 0, atol=1e-12)
    assert np.allclose(lab_to_rgb(LabImage(np.ones((1, 1)), neutral, neutral)), 1, atol=1e-6)
    # mid-code 0.5 is half a CIELAB unit off neutral, still black to within 2/255
    half = np.full((1, 1), 0.5)
    assert lab_to_rgb(LabImage(np.zeros((1, 1)), half, half)).max() <= 2 / 255


def test_round_trip_thousand_colours():
    rgb = np.random.default_rng(0).random((1, 1000, 3))
    back = lab_to_rgb(rgb_to_lab(rgb))
    assert np.abs(back - rgb).max() <= 1 / 255


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (4, 4, 3), elements=st.floats(0, 1)))
def test_round_trip_property(rgb):
    assert np.abs(lab_to_rgb(rgb_to_lab(rgb)) - rgb).max() <= 1 / 255


def test_only_d65_supported():
    with pytest.raises(ValueError):
        rgb_to_lab(px(0.2, 0.2, 0.2), white_point="D50")


def test_lab_planes_must_agree():
    with pytest.raises(ValueError):
        LabImage(np.zeros((2, 2)), np.zeros((2, 3)), np.zeros((2, 2)))


def test_gray_of_color():
    assert gray_of_color(px(0.3, 0.6, 0.9))[0, 0] == pytest.approx(0.6)
    assert not gray_of_color(np.zeros((3, 3, 3))).any()
    img = np.random.default_rng(1).random((5, 6, 3))
    loop = np.array([[sum(img[i, j]) / 3 for j in range(6)] for i in range(5)])
    assert np.array_equal(gray_of_color(img), loop)


def test_global_intensity_ratio():
    gray = np.random.default_rng(0).uniform(0.1, 0.4, (20, 20))
    assert intensity_match(2 * gray, gray).ratio == pytest.approx(2.0)
    same = intensity_match(gray, gray)
    assert same.ratio == pytest.approx(1.0)
    assert np.allclose(same.scaled, gray)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.2, 2.0))
def test_intensity_ratio_scale_equivariant(k):
    rng = np.random.default_rng(5)
    mono, gray = rng.uniform(0.1, 0.4, (2, 16, 16))
    base = intensity_match(mono, gray).ratio
    assert intensity_match(k * mono, gray).ratio == pytest.approx(k * base, rel=1e-12)


def test_local_intensity_ratio_per_window():
    gray = np.full((40, 120), 0.3)
    mono = gray.copy()
    mono[:, 60:] *= 2  # right half brightened
    m = intensity_match(mono, gray, "local", window=11)
    assert np.allclose(m.ratio[:, :50], 1.0)
    assert np.allclose(m.ratio[:, 70:], 2.0)
    i, j = 20, 62  # window straddles the step: ratio of box means
    win = np.s_[i - 5:i + 6, j - 5:j + 6]
    assert m.ratio[i, j] == pytest.approx(mono[win].mean() / gray[win].mean())


def test_black_guide_is_degenerate():
    with pytest.warns(RuntimeWarning):
        m = intensity_match(np.full((4, 4), 0.5), np.zeros((4, 4)))
    assert m.degenerate


def test_upsample_constant_and_identity():
    c = np.full((10, 12), 0.5)
    assert np.allclose(upsample_bicubic(c, 2), 0.5)
    img = np.random.default_rng(0).random((7, 9))
    assert np.array_equal(upsample_bicubic(img, 1), img)


def test_upsample_ramp_round_trip():
    y, x = np.mgrid[0:32, 0:40]
    ramp = 0.2 + 0.6 * (x + y) / (31 + 39)
    up = upsample_bicubic(ramp, 2)
    down = up.reshape(32, 2, 40, 2).mean(axis=(1, 3))
    assert np.abs(down - ramp).max() <= 2 / 255


def test_upsample_to_shape_colour():
    img = np.random.default_rng(0).random((6, 8, 3))
    assert upsample_bicubic(img, shape=(48, 64)).shape == (48, 64, 3)
    with pytest.raises(ValueError):
        upsample_bicubic(img)


@pytest.mark.parametrize("bits", [8, 16])
def test_png_round_trip(tmp_path, bits):
    img = np.random.default_rng(0).random((5, 7, 3))
    write_image(tmp_path / "x.png", img, bits=bits)
    back = read_image(tmp_path / "x.png")
    assert back.shape == img.shape
    assert np.abs(back - img).max() <= 0.5 / (2**bits - 1) + 1e-12


def test_grey_png_is_plane(tmp_path):
    write_image(tmp_path / "g.pgm", np.full((3, 4), 0.5))
    assert read_image(tmp_path / "g.pgm").shape == (3, 4)


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        read_image("/nonexistent/file.png")


def test_geometry_validation():
    with pytest.raises(ValueError):
        PairGeometry(max_disparity=-1)
    with pytest.raises(ValueError):
        PairGeometry(direction=2)
