"""
Where do the hints come from?
=============================

Each target patch is matched against a sparse set of guide patches.  A pixel
gets a colour hint only when enough of the patches covering it found a
counterpart whose lightness is within the just-noticeable difference, and
when those counterparts agree on the colour.  Everything else is marked as
occluded or ambiguous and left for propagation.

This demo builds a toy pair with a known shift and a strip of the guide
replaced by unrelated texture, then looks at the status map.
"""

import numpy as np
from scipy import ndimage

from monocolor.imagecore import PairGeometry, lab_to_rgb, LabImage, rgb_to_lab
from monocolor.perception import compute_jnd
from monocolor.scribbler import MatchConfig, Status, dense_scribble

rng = np.random.default_rng(0)
h, w, shift = 120, 480, 10

# A smooth random lightness field with gently varying colour.
scene_l = ndimage.gaussian_filter(rng.random((h, w + shift)), 1.5)
scene_l = 0.2 + 0.6 * (scene_l - scene_l.min()) / np.ptp(scene_l)
yy, xx = np.mgrid[0:h, 0:w + shift]
scene = LabImage(scene_l, 0.5 + 0.1 * np.sin(xx / 60), 0.5 + 0.1 * np.cos(yy / 40))
rgb = lab_to_rgb(scene)

mono = scene_l[:, :w]
guide = rgb[:, shift:shift + w].copy()

# %%
# Replace a vertical band of the guide with something the target never saw.
band = slice(w // 2, w // 2 + 40)
guide[:, band] = rng.random((h, 40, 1)) * 0.8 + 0.1

jnd = compute_jnd(mono)
print(f"JND ranges from {jnd.min() * 255:.1f} to {jnd.max() * 255:.1f} grey levels")

geom = PairGeometry(max_disparity=32)
_, scribbles = dense_scribble(mono, rgb_to_lab(guide), jnd, MatchConfig(), geom)

for name, frac in scribbles.fractions().items():
    print(f"{name:<11s} {frac:6.1%}")

# %%
# The left border (no counterpart in the guide) and the replaced band both
# show up as runs of mostly-occluded columns.  The band lands at its guide
# position plus the disparity, widened a little by patches straddling it.
mostly = (scribbles.status == Status.OCCLUDED).mean(axis=0) > 0.5
edges = np.flatnonzero(np.diff(np.r_[0, mostly.astype(int), 0]))
for start, stop in zip(edges[::2], edges[1::2]):
    print(f"occluded columns {start}..{stop - 1}")
print(f"expected: 0..{shift - 1} and {band.start + shift}..{band.stop + shift - 1}")
