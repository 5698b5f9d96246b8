"""Just-noticeable-difference thresholds on the monochrome target.

The threshold combines a luminance-adaptation term and a texture-masking
term with the usual nonlinear additivity rule::

    J = J_L + J_T - 0.3 * min(J_L, J_T)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

OVERLAP = 0.3


@dataclass(frozen=True)
class JndParams:
    """Constants of the luminance-adaptation and texture-masking curves (0-255 scale)."""

    background_window: int = 5
    dark_gain: float = 17.0
    bright_slope: float = 3.0 / 128.0
    floor: float = 3.0
    texture_gain: float = 0.25
    texture_cap: float = 30.0


def combine(j_l, j_t, overlap: float = OVERLAP):
    """Nonlinear additivity of the two masking terms."""
    return j_l + j_t - overlap * np.minimum(j_l, j_t)


def luminance_threshold(background, params: JndParams = JndParams()):
    """Luminance-adaptation threshold as a function of background in [0, 1].

    Highest in the dark, lowest (``floor``) at mid-grey, rising linearly
    towards white.
    """
    bg = np.asarray(background, dtype=np.float64) * 255.0
    dark = params.dark_gain * (1.0 - np.sqrt(np.clip(bg, 0, 127) / 127.0)) + params.floor
    bright = params.bright_slope * (bg - 127.0) + params.floor
    return np.where(bg <= 127.0, dark, bright) / 255.0


# Directional high-pass operators: maximal weighted luminance change around
# a pixel in four directions (horizontal, two diagonals, vertical).
_DIRECTIONAL = np.array(
    [
        [[0, 0, 0, 0, 0], [1, 3, 8, 3, 1], [0, 0, 0, 0, 0], [-1, -3, -8, -3, -1], [0, 0, 0, 0, 0]],
        [[0, 0, 1, 0, 0], [0, 8, 3, 0, 0], [1, 3, 0, -3, -1], [0, 0, -3, -8, 0], [0, 0, -1, 0, 0]],
        [[0, 0, 1, 0, 0], [0, 0, 3, 8, 0], [-1, -3, 0, 3, 1], [0, -8, -3, 0, 0], [0, 0, -1, 0, 0]],
        [[0, 1, 0, -1, 0], [0, 3, 0, -3, 0], [0, 8, 0, -8, 0], [0, 3, 0, -3, 0], [0, 1, 0, -1, 0]],
    ],
    dtype=np.float64,
) / 16.0


def max_gradient(mono: np.ndarray) -> np.ndarray:
    """Largest absolute response of the four directional operators."""
    mono = np.asarray(mono, dtype=np.float64)
    resp = [np.abs(ndimage.correlate(mono, k, mode="reflect")) for k in _DIRECTIONAL]
    return np.max(resp, axis=0)


def texture_threshold(mono: np.ndarray, params: JndParams = JndParams()) -> np.ndarray:
    return np.minimum(params.texture_gain * max_gradient(mono), params.texture_cap / 255.0)


def compute_jnd(mono: np.ndarray, params: JndParams = JndParams()) -> np.ndarray:
    """Per-pixel JND map of ``mono`` in [0, 1] luminance units."""
    mono = np.asarray(mono, dtype=np.float64)
    background = ndimage.uniform_filter(mono, size=params.background_window, mode="reflect")
    return combine(luminance_threshold(background, params), texture_threshold(mono, params))


def is_similar(a, b, jnd_at_a):
    return np.abs(np.asarray(a) - np.asarray(b)) < jnd_at_a
