import time

import numpy as np
import pytest
from scipy import fft

from monocolor.denoise import DenoiseParams, blind_noise_variance, estimate_noise_variance, rrdct_denoise
from monocolor.evalkit import NoiseParams, add_mixed_noise

from synthetic import texture


def test_known_variance_map():
    flat = np.full((32, 32), 0.5)
    v = estimate_noise_variance(flat, NoiseParams(0.0, 0.03**2))
    assert v.shape == (4, 4) and np.allclose(v, 0.0009)
    v = estimate_noise_variance(flat, NoiseParams(0.03**2, 0.03**2))
    assert np.allclose(v, 0.00135)


def test_blind_variance_of_clean_image():
    assert blind_noise_variance(np.full((64, 64), 0.3)) <= 1e-6
    noisy = add_mixed_noise(np.full((256, 256), 0.5), NoiseParams(0, 0.03**2, seed=1))
    assert blind_noise_variance(noisy) == pytest.approx(0.0009, rel=0.1)


def test_zero_noise_keeps_image():
    img = texture((48, 64), 0)
    out = rrdct_denoise(img, noise=NoiseParams()).image
    assert np.abs(out - img).max() <= 1 / 255


@pytest.mark.parametrize("noise", [None, NoiseParams(0, 0.03**2)])
def test_flat_noise_reduced_fivefold(noise):
    clean = np.full((256, 256), 0.5)
    noisy = add_mixed_noise(clean, NoiseParams(0, 0.03**2, seed=3))
    out = rrdct_denoise(noisy, noise=noise).image
    assert (noisy - clean).std() / (out - clean).std() >= 5


def test_fixed_seed_reproducible():
    img = add_mixed_noise(texture((40, 40), 1), NoiseParams(0.001, 0.001, seed=2))
    a = rrdct_denoise(img, rng_seed=7).image
    b = rrdct_denoise(img, rng_seed=7).image
    assert np.array_equal(a, b)
    assert rrdct_denoise(img, rng_seed=7).seed == 7


def test_colour_image_and_shape():
    img = np.random.default_rng(0).random((30, 41, 3))
    out = rrdct_denoise(img, noise=NoiseParams(0, 0.001)).image
    assert out.shape == img.shape


def test_small_image_passes_through():
    img = np.random.default_rng(0).random((5, 5))
    with pytest.warns(RuntimeWarning):
        res = rrdct_denoise(img)
    assert res.passthrough and np.array_equal(res.image, img)


def test_hard_threshold_never_adds_energy():
    rng = np.random.default_rng(4)
    block = rng.random((8, 8))
    coef = fft.dctn(block, norm="ortho")
    kept = np.where(np.abs(coef) > 0.3, coef, 0.0)
    kept[0, 0] = coef[0, 0]
    assert np.linalg.norm(kept) <= np.linalg.norm(coef)


def test_runtime_single_plane_set():
    img = np.random.default_rng(0).random((555, 660, 3))
    rrdct_denoise(img[:64, :64])
    t = time.perf_counter()
    rrdct_denoise(img, noise=NoiseParams(0.03**2, 0.03**2))
    assert time.perf_counter() - t <= 1.0


def test_params_validation():
    with pytest.raises(ValueError):
        DenoiseParams(patch_size=2)
    with pytest.raises(ValueError):
        DenoiseParams(patches_per_pixel=0)
