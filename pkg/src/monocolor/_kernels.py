"""Numba hot loops for block matching and per-pixel candidate classification."""

import numba as nb
import numpy as np

VALID = 1
OCCLUDED = 2
AMBIGUOUS = 3
SEEDED = 4
PROPAGATED = 5


@nb.njit(parallel=True, cache=True, fastmath=False)
def match_grid(mono, guide_l, rows, cols, size, disp_dy, disp_dx):
    """Best guidance offset for every patch on the ``rows x cols`` grid.

    Displacements are visited in the given order and only a strictly smaller
    distance replaces the incumbent, so ties keep the earliest displacement.
    Partial sums are abandoned once they reach the incumbent, which cannot
    change the result because every term is non-negative.
    """
    h, w = guide_l.shape
    nr = rows.shape[0]
    nc = cols.shape[0]
    nd = disp_dy.shape[0]
    offsets = np.zeros((nr, nc, 2), dtype=np.int32)
    dists = np.full((nr, nc), np.inf, dtype=np.float64)
    for idx in nb.prange(nr * nc):
        pi = idx // nc
        pj = idx - pi * nc
        r0 = rows[pi]
        c0 = cols[pj]
        best = np.inf
        bdy = 0
        bdx = 0
        for d in range(nd):
            rr = r0 + disp_dy[d]
            cc = c0 + disp_dx[d]
            if rr < 0 or cc < 0 or rr + size > h or cc + size > w:
                continue
            acc = np.float32(0.0)
            stop = False
            for u in range(size):
                for v in range(size):
                    diff = mono[r0 + u, c0 + v] - guide_l[rr + u, cc + v]
                    acc += diff * diff
                if acc >= best:
                    stop = True
                    break
            if not stop and acc < best:
                best = acc
                bdy = disp_dy[d]
                bdx = disp_dx[d]
        offsets[pi, pj, 0] = bdy
        offsets[pi, pj, 1] = bdx
        dists[pi, pj] = best
    return offsets, dists


@nb.njit(cache=True)
def _max_sorted_gap(vals, n):
    if n < 2:
        return 0.0
    s = np.sort(vals[:n])
    g = 0.0
    for k in range(1, n):
        d = s[k] - s[k - 1]
        if d > g:
            g = d
    return g


@nb.njit(parallel=True, cache=True)
def classify_pixels(mono, jnd, guide_l, guide_a, guide_b, rows, cols, offsets,
                    row_lo, row_hi, col_lo, col_hi, similar_required, eps, tau):
    """Per-pixel candidate statistics, Eq.-2 colours and outlier status.

    ``row_lo[i]:row_hi[i]`` indexes the grid rows whose patches cover image
    row ``i`` (likewise for columns).
    """
    h, w = mono.shape
    status = np.empty((h, w), dtype=np.int8)
    chroma_a = np.empty((h, w), dtype=np.float64)
    chroma_b = np.empty((h, w), dtype=np.float64)
    count = np.zeros((h, w), dtype=np.int32)
    similar = np.zeros((h, w), dtype=np.int32)
    kmax = 0
    for i in range(h):
        kr = row_hi[i] - row_lo[i]
        for j in range(w):
            k = kr * (col_hi[j] - col_lo[j])
            if k > kmax:
                kmax = k
    kmax = max(kmax, 1)
    for i in nb.prange(h):
        lum = np.empty(kmax, dtype=np.float64)
        ca = np.empty(kmax, dtype=np.float64)
        cb = np.empty(kmax, dtype=np.float64)
        sa = np.empty(kmax, dtype=np.float64)
        sb = np.empty(kmax, dtype=np.float64)
        for j in range(w):
            m = mono[i, j]
            thr = jnd[i, j]
            k = 0
            r = 0
            for pi in range(row_lo[i], row_hi[i]):
                for pj in range(col_lo[j], col_hi[j]):
                    y = i + offsets[pi, pj, 0]
                    x = j + offsets[pi, pj, 1]
                    lv = guide_l[y, x]
                    lum[k] = lv
                    ca[k] = guide_a[y, x]
                    cb[k] = guide_b[y, x]
                    if abs(lv - m) < thr:
                        sa[r] = ca[k]
                        sb[r] = cb[k]
                        r += 1
                    k += 1
            count[i, j] = k
            similar[i, j] = r
            if k == 0:
                status[i, j] = OCCLUDED
                chroma_a[i, j] = np.nan
                chroma_b[i, j] = np.nan
                continue
            # accumulate deviations from the first candidate so that
            # identical candidates reproduce their chroma exactly
            wsum = 0.0
            acc_a = 0.0
            acc_b = 0.0
            for q in range(k):
                wq = 1.0 / (abs(lum[q] - m) + eps)
                wsum += wq
                acc_a += wq * (ca[q] - ca[0])
                acc_b += wq * (cb[q] - cb[0])
            chroma_a[i, j] = ca[0] + acc_a / wsum
            chroma_b[i, j] = cb[0] + acc_b / wsum
            need = similar_required if k >= similar_required else k
            if r < need:
                status[i, j] = OCCLUDED
            elif _max_sorted_gap(sa, r) > tau or _max_sorted_gap(sb, r) > tau:
                status[i, j] = AMBIGUOUS
            else:
                status[i, j] = VALID
    return status, chroma_a, chroma_b, count, similar
