"""Synthetic images and pairs with known answers, shared by the tests."""

import numpy as np
from scipy import ndimage

from monocolor.imagecore import LabImage, lab_to_rgb, rgb_to_lab
from monocolor.scribbler import patch_grid


def texture(shape, seed=0, blur=1.5, lo=0.25, hi=0.75):
    """Smooth random texture stretched to [lo, hi]."""
    rng = np.random.default_rng(seed)
    t = ndimage.gaussian_filter(rng.random(shape), blur)
    t = (t - t.min()) / (t.max() - t.min())
    return lo + (hi - lo) * t


def lab_rgb(l, a_units, b_units):
    """RGB image from lightness in [0, 1] and a*/b* in CIELAB units."""
    l = np.asarray(l, float)
    a = np.broadcast_to((np.asarray(a_units, float) + 128) / 255, l.shape)
    b = np.broadcast_to((np.asarray(b_units, float) + 128) / 255, l.shape)
    return lab_to_rgb(LabImage(l, np.array(a), np.array(b)))


def shifted_pair(height, width, d, seed=0, step=False):
    """Pure translation: the guide (right view) shows target column x at x - d.

    With ``step`` the scene is split at mid-width into a dark red half and a
    bright blue half, both textured in lightness.
    Returns ``(mono, guide_rgb, truth_lab)``.
    """
    big_w = width + d
    l = texture((height, big_w), seed, lo=0.3, hi=0.7)
    a = np.full(l.shape, 25.0)
    b = np.full(l.shape, 10.0)
    if step:
        right = np.arange(big_w)[None, :] >= big_w // 2
        l = np.where(right, 0.55 + 0.3 * (l - 0.3), 0.2 + 0.3 * (l - 0.3))
        a = np.where(right, -15.0, 30.0) * np.ones_like(l)
        b = np.where(right, -30.0, 15.0) * np.ones_like(l)
    else:
        # slowly varying chroma so a wrong match shows up as a colour error
        a = a + 20 * texture(l.shape, seed + 1, blur=12, lo=-1, hi=1)
        b = b + 20 * texture(l.shape, seed + 2, blur=12, lo=-1, hi=1)
    scene = lab_rgb(l, a, b)
    left = scene[:, :width]
    guide = scene[:, d:d + width]
    truth = rgb_to_lab(left)
    return truth.l, guide, truth


def fully_matchable(shape, d, patch_size=16, stride=8):
    """Pixels all of whose covering grid patches have their true match inside the guide."""
    h, w = shape
    cols = patch_grid(w, patch_size, stride)
    ok_patch = cols >= d
    x = np.arange(w)
    good = np.array([ok_patch[(cols <= j) & (cols > j - patch_size)].all() for j in x])
    return np.broadcast_to(good[None, :], shape).copy()


def occluded_pair(height=160, width=660, d=12, band=48, seed=0):
    """Shifted pair with a band of unrelated content pasted into the guide.

    Returns ``(mono, guide_rgb, truth_lab, mask)``; ``mask`` marks target
    pixels whose correspondence is missing (off the guide or inside the band).
    """
    mono, guide, truth = shifted_pair(height, width, d, seed)
    g0 = width // 2
    guide = guide.copy()
    guide[:, g0:g0 + band] = lab_rgb(texture((height, band), seed + 99, lo=0.3, hi=0.7), -20, 40)
    src = np.arange(width) - d
    cols = (src < 0) | ((src >= g0) & (src < g0 + band))
    mask = np.broadcast_to(cols[None, :], mono.shape).copy()
    return mono, guide, truth, mask


def bimodal_candidates(size=48, tau=5 / 255, patch_size=16, stride=8):
    """Candidate set whose patches alternately point at two chroma modes ``3 tau`` apart.

    Lightness is flat everywhere so every candidate is JND-similar.  Returns
    ``(mono, candidate_set, expected)`` where ``expected`` marks pixels covered
    by patches of both modes.
    """
    from monocolor.scribbler import CandidateSet

    half = size // 2
    mono = np.full((size, size), 0.5)
    a = np.where(np.arange(size)[None, :] < half, 0.5, 0.5 + 3 * tau) * np.ones((size, 1))
    guide = LabImage(mono.copy(), a, np.full((size, size), 0.5))
    rows = patch_grid(size, patch_size, stride)
    cols = patch_grid(size, patch_size, stride)
    offsets = np.zeros((rows.size, cols.size, 2), np.int32)
    parity = (np.arange(rows.size)[:, None] + np.arange(cols.size)[None, :]) % 2
    for i in range(rows.size):
        for j in range(cols.size):
            # mode A lives in columns [0, half), mode B in [half, size)
            target = 0 if parity[i, j] == 0 else size - patch_size
            offsets[i, j] = (0, target - cols[j])
    cands = CandidateSet(rows, cols, offsets, np.zeros(offsets.shape[:2]), patch_size, guide)
    expected = np.zeros((size, size), bool)
    for y in range(size):
        for x in range(size):
            ri, ci = cands.covering(y, x)
            modes = {parity[r, c] for r in ri for c in ci}
            expected[y, x] = len(modes) == 2
    return mono, cands, expected
