"""Colour seeds for luminance levels that received no scribbles.

The target is cut into ``B x B`` blocks and each block into luminance levels
(split where sorted neighbouring values jump by more than ``level_tau``).  A
level without any hint gets one seed whose chroma is borrowed from the
``neighbors`` scribbled pixels that look most alike within a
``neighbor_window`` square around it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .scribbler import ScribbleMap, Status

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SeedConfig:
    block_size: int = 20
    level_tau: float = 9.0 / 255.0
    neighbors: int = 3
    neighbor_window: int = 50
    epsilon: float = 1e-4
    match_window: int = 5

    def __post_init__(self):
        if min(self.block_size, self.neighbors, self.neighbor_window, self.match_window) <= 0:
            raise ValueError("seed parameters must be positive")
        if self.level_tau <= 0 or self.epsilon <= 0:
            raise ValueError("level_tau and epsilon must be positive")
        if self.neighbor_window <= self.block_size:
            raise ValueError("neighbor_window must exceed block_size")


@dataclass
class Seed:
    row: int
    col: int
    a: float
    b: float


@dataclass
class SeedResult:
    seeds: list[Seed]
    scribbles: ScribbleMap
    skipped: list[tuple[int, int]]  # (row, col) of levels left without a hint


def luminance_levels(lumas, tau: float = 9.0 / 255.0) -> list[np.ndarray]:
    """Split values into levels at sorted gaps larger than ``tau``.

    Returns index arrays into ``lumas``, ordered from dark to bright.
    """
    lumas = np.asarray(lumas, dtype=np.float64).ravel()
    if lumas.size == 0:
        raise ValueError("empty block")
    order = np.argsort(lumas, kind="stable")
    cuts = np.flatnonzero(np.diff(lumas[order]) > tau) + 1
    return np.split(order, cuts)


def seed_color(luma_diffs, chromas, epsilon: float = 1e-4) -> float:
    """Reciprocal-distance weighted average of neighbour chroma."""
    w = 1.0 / (np.asarray(luma_diffs, dtype=np.float64) + epsilon)
    return float(w @ np.asarray(chromas, dtype=np.float64) / w.sum())


def _neighbours(hinted, r, c, window: int):
    h, w = hinted.shape
    half = window // 2
    r0, r1 = max(0, r - half), min(h, r + half + 1)
    c0, c1 = max(0, c - half), min(w, c + half + 1)
    rr, cc = np.nonzero(hinted[r0:r1, c0:c1])
    return rr + r0, cc + c0


def generate_seeds(mono: np.ndarray, scribbles: ScribbleMap, cfg: SeedConfig = SeedConfig()) -> SeedResult:
    """Place seeds so that every luminance level of every block holds a hint."""
    mono = np.asarray(mono, dtype=np.float64)
    out = scribbles.copy()
    hinted = scribbles.hinted
    h, w = mono.shape
    bs = cfg.block_size
    half = cfg.match_window // 2
    pad = np.pad(mono, half, mode="reflect")
    seeds: list[Seed] = []
    skipped: list[tuple[int, int]] = []
    for br in range(0, h, bs):
        for bc in range(0, w, bs):
            block = mono[br:br + bs, bc:bc + bs]
            bh = hinted[br:br + bs, bc:bc + bs].ravel()
            bw = block.shape[1]
            for level in luminance_levels(block, cfg.level_tau):
                if bh[level].any():
                    continue
                # the level is sorted by luma; its middle element is the median pixel
                k = level[(level.size - 1) // 2]
                r, c = br + k // bw, bc + k % bw
                seed = _make_seed(pad, hinted, scribbles, r, c, cfg, half)
                if seed is None:
                    skipped.append((r, c))
                    log.warning("no scribbled pixel near (%d, %d); level left unseeded", r, c)
                    continue
                seeds.append(seed)
    seeds.sort(key=lambda s: (s.row, s.col))
    for s in seeds:
        out.a[s.row, s.col] = s.a
        out.b[s.row, s.col] = s.b
        out.status[s.row, s.col] = Status.SEEDED
    return SeedResult(seeds, out, skipped)


def _make_seed(pad, hinted, scribbles, r, c, cfg: SeedConfig, half):
    for window in (cfg.neighbor_window, 2 * cfg.neighbor_window):
        nr, nc = _neighbours(hinted, r, c, window)
        if nr.size:
            break
    else:
        return None
    k = 2 * half + 1
    du = np.arange(k)
    ref = pad[r:r + k, c:c + k]
    wins = pad[nr[:, None, None] + du[None, :, None], nc[:, None, None] + du[None, None, :]]
    dist = np.abs(wins - ref).mean(axis=(1, 2))
    # nearest in luminance, ties by raster order
    pick = np.lexsort((nc, nr, dist))[: cfg.neighbors]
    return Seed(
        int(r), int(c),
        seed_color(dist[pick], scribbles.a[nr[pick], nc[pick]], cfg.epsilon),
        seed_color(dist[pick], scribbles.b[nr[pick], nc[pick]], cfg.epsilon),
    )


def level_coverage(mono: np.ndarray, hinted: np.ndarray, cfg: SeedConfig = SeedConfig()):
    """``(levels, levels_with_hint)`` counted over all blocks."""
    h, w = mono.shape
    bs = cfg.block_size
    total = covered = 0
    for br in range(0, h, bs):
        for bc in range(0, w, bs):
            bh = hinted[br:br + bs, bc:bc + bs].ravel()
            for level in luminance_levels(mono[br:br + bs, bc:bc + bs], cfg.level_tau):
                total += 1
                covered += bool(bh[level].any())
    return total, covered
