"""
How many patches are enough?
============================

Matching is done on a stride-8 grid of 16-pixel patches, so every pixel is
covered by N = 4 patches.  Requiring T of them to be similar trades coverage
against reliability.  The shipped prior (how often a given share of the 256
covering candidates is similar, and how often such a pixel is correct)
turns that trade-off into two numbers per (N, T):

* the chance a pixel is declared valid,
* the chance a declared-valid pixel is actually right.
"""

from monocolor.sampler import PriorTable, emit_selection_table

prior = PriorTable.load()

print(" N  T   valid   right-given-valid")
for n, t, valid, conf in emit_selection_table(prior, range(1, 9), range(1, 9)):
    marker = "  <- default" if (n, t) == (4, 4) else ""
    print(f"{n:2d} {t:2d}  {valid:6.3f}   {conf:6.3f}{marker}")

# %%
# The same table is written to CSV by ``monocolor sampling-analysis``.
