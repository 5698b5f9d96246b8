"""Randomized redundant DCT denoising.

Several copies of the image are tiled into ``patch_size`` blocks, each copy
with its own random grid offset.  Every block is hard-thresholded in the 2-D
DCT domain at ``threshold_multiplier`` times its noise standard deviation and
transformed back; the copies are then averaged, so each pixel is the uniform
mean of exactly ``patches_per_pixel`` block estimates.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import fft

from .evalkit import NoiseParams


@dataclass(frozen=True)
class DenoiseParams:
    patch_size: int = 8
    threshold_multiplier: float = 2.7
    patches_per_pixel: int = 4

    def __post_init__(self):
        if self.patch_size < 4:
            raise ValueError("patch_size must be >= 4")
        if self.threshold_multiplier <= 0:
            raise ValueError("threshold_multiplier must be positive")
        if self.patches_per_pixel < 1:
            raise ValueError("patches_per_pixel must be >= 1")


@dataclass
class DenoiseResult:
    image: np.ndarray
    seed: int
    passthrough: bool = False


def _blocks(img: np.ndarray, size: int) -> np.ndarray:
    h, w = img.shape
    return img.reshape(h // size, size, w // size, size).swapaxes(1, 2)


def _unblocks(blocks: np.ndarray) -> np.ndarray:
    nh, nw, s, _ = blocks.shape
    return blocks.swapaxes(1, 2).reshape(nh * s, nw * s)


def blind_noise_variance(img: np.ndarray) -> float:
    """Noise variance from the median absolute finest-scale diagonal detail."""
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape
    x = img[: h - h % 2, : w - w % 2]
    hh = (x[0::2, 0::2] - x[0::2, 1::2] - x[1::2, 0::2] + x[1::2, 1::2]) / 2.0
    sigma = np.median(np.abs(hh)) / 0.6745
    return float(sigma**2)


def estimate_noise_variance(img: np.ndarray, noise: NoiseParams | None = None,
                            patch_size: int = 8) -> np.ndarray:
    """Per-patch noise variance on the non-overlapping ``patch_size`` grid.

    With known parameters each patch gets the mean of ``alpha * v + sigma2``
    over its pixels; otherwise a single blind estimate fills the map.
    """
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape
    nh, nw = -(-h // patch_size), -(-w // patch_size)
    if noise is None:
        return np.full((nh, nw), blind_noise_variance(img))
    padded = np.pad(img, ((0, nh * patch_size - h), (0, nw * patch_size - w)), mode="reflect")
    return noise.alpha * _blocks(padded, patch_size).mean(axis=(2, 3)) + noise.sigma2


def _denoise_plane(img, params: DenoiseParams, noise, rng) -> np.ndarray:
    s = params.patch_size
    h, w = img.shape
    nh, nw = -(-h // s) + 1, -(-w // s) + 1
    blind = None if noise is not None else blind_noise_variance(img)
    acc = np.zeros_like(img)
    for _ in range(params.patches_per_pixel):
        oy, ox = rng.integers(0, s, size=2)
        padded = np.pad(img, ((oy, nh * s - h - oy), (ox, nw * s - w - ox)), mode="reflect")
        blk = _blocks(padded, s)
        if noise is None:
            var = np.full(blk.shape[:2], blind)
        else:
            var = noise.alpha * blk.mean(axis=(2, 3)) + noise.sigma2
        coef = fft.dctn(blk, axes=(2, 3), norm="ortho")
        thr = params.threshold_multiplier * np.sqrt(var)[:, :, None, None]
        dc = coef[:, :, 0, 0].copy()
        coef = np.where(np.abs(coef) > thr, coef, 0.0)
        coef[:, :, 0, 0] = dc
        est = _unblocks(fft.idctn(coef, axes=(2, 3), norm="ortho"))
        acc += est[oy:oy + h, ox:ox + w]
    return acc / params.patches_per_pixel


def rrdct_denoise(img: np.ndarray, params: DenoiseParams = DenoiseParams(),
                  noise: NoiseParams | None = None, rng_seed: int = 0) -> DenoiseResult:
    """Denoise a plane or a multi-channel image channel by channel.

    ``noise`` gives the variance law of the input; without it the variance
    is estimated blindly per channel.
    """
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape[:2]
    if h < params.patch_size or w < params.patch_size:
        warnings.warn("image smaller than a denoising patch; returned unchanged", RuntimeWarning)
        return DenoiseResult(img.copy(), rng_seed, passthrough=True)
    rng = np.random.default_rng(rng_seed)
    if img.ndim == 2:
        out = _denoise_plane(img, params, noise, rng)
    else:
        out = np.stack([_denoise_plane(img[..., k], params, noise, rng)
                        for k in range(img.shape[-1])], axis=-1)
    return DenoiseResult(np.clip(out, 0.0, 1.0), rng_seed)
