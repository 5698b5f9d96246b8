"""
Filling the gaps
================

Pixels without a hint take the colour of their neighbours, weighted by how
similar their lightness is.  The result is the solution of one sparse linear
system per chroma channel.  Hints are kept exactly, and no propagated value
leaves the range spanned by the hints.
"""

import warnings

import numpy as np

from monocolor.propagation import PropagationConfig, propagate
from monocolor.scribbler import ScribbleMap, Status

h, w = 60, 90
mono = np.full((h, w), 0.2)
mono[:, 45:] = 0.8  # two flat regions meeting at a sharp edge
mono[20:40, 10:30] = 0.5  # and an island in the left one

a = np.full((h, w), np.nan)
b = np.full((h, w), np.nan)
status = np.full((h, w), Status.OCCLUDED, np.int8)
for (r, c), (va, vb) in {(5, 5): (0.35, 0.6), (55, 80): (0.65, 0.4), (30, 20): (0.5, 0.3)}.items():
    a[r, c], b[r, c] = va, vb
    status[r, c] = Status.VALID
hints = ScribbleMap(a, b, status)

res = propagate(mono, hints)
print(f"left {res.a[10, 40]:.3f}  island {res.a[30, 25]:.3f}  right {res.a[10, 60]:.3f}")
print(f"range of a: {np.nanmin(res.a):.3f}..{np.nanmax(res.a):.3f} (hints 0.35..0.65)")

# %%
# Each region ends up close to the colour of the single hint inside it.  With
# one hint per region, the long boundaries still leak a little colour, which
# shows up as small offsets from the hint values.
#
# The iterative solver (CG on the normal equations) needs no factorisation,
# but flat regions with point hints are badly conditioned.  It reports
# whether it converged, and the pipeline turns a failure into a flag.
with warnings.catch_warnings():
    warnings.simplefilter("ignore", RuntimeWarning)
    it = propagate(mono, hints, PropagationConfig(solver="cg"))
print(f"cg converged: {it.converged} after {it.iterations} iterations, "
      f"max difference to direct {np.nanmax(np.abs(it.a - res.a)):.3f}")
