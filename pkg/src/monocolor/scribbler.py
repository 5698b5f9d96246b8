"""Dense scribbling: patch-grid block matching and outlier classification.

Every target patch on a regular grid is matched against the guidance
lightness inside a window bounded by the maximum disparity.  Each pixel then
collects one (luma, a, b) candidate per covering patch.  A pixel is a valid
match when enough candidates are JND-similar to it in luminance, occluded
otherwise; valid pixels whose similar candidates disagree in chroma by more
than ``ambiguity_tau`` are marked ambiguous.  The rest carry the
reciprocal-luma-distance weighted average of their candidates' chroma.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from . import _kernels
from .imagecore import LabImage, PairGeometry


class Status(IntEnum):
    VALID = _kernels.VALID
    OCCLUDED = _kernels.OCCLUDED
    AMBIGUOUS = _kernels.AMBIGUOUS
    SEEDED = _kernels.SEEDED
    PROPAGATED = _kernels.PROPAGATED


HINT_STATUSES = (Status.VALID, Status.SEEDED, Status.PROPAGATED)


@dataclass(frozen=True)
class MatchConfig:
    patch_size: int = 16
    search_width: int | None = None  # None: the pair's maximum disparity
    search_height: int | None = None  # None: twice the pair's vertical tolerance (30)
    stride: int = 8
    samples_per_pixel: int = 4
    similar_required: int = 4
    epsilon: float = 1e-4
    ambiguity_tau: float = 5.0 / 255.0

    def __post_init__(self):
        s, st = self.patch_size, self.stride
        if s < 1 or st < 1 or s % st:
            raise ValueError(f"stride {st} must divide patch_size {s}")
        if (s // st) ** 2 != self.samples_per_pixel:
            raise ValueError(
                f"samples_per_pixel must equal (patch_size/stride)^2 = {(s // st) ** 2}"
            )
        if not 1 <= self.similar_required <= self.samples_per_pixel:
            raise ValueError("need 1 <= similar_required <= samples_per_pixel")
        if self.ambiguity_tau <= 0 or self.epsilon <= 0:
            raise ValueError("ambiguity_tau and epsilon must be positive")

    @classmethod
    def full(cls, similar_required: int = 214, **kw) -> "MatchConfig":
        """Unsampled configuration: every patch position, ``S^2`` candidates per pixel."""
        s = kw.pop("patch_size", 16)
        return cls(patch_size=s, stride=1, samples_per_pixel=s * s,
                   similar_required=similar_required, **kw)


@dataclass
class CandidateSet:
    """Patch-level match results from which per-pixel candidates are read.

    Candidates are not stored per pixel (there can be ``S^2`` of them); the
    patch grid and its best offsets determine them completely.
    """

    rows: np.ndarray
    cols: np.ndarray
    offsets: np.ndarray
    distances: np.ndarray
    patch_size: int
    guide: LabImage = field(repr=False)

    def covering(self, i: int, j: int) -> tuple[np.ndarray, np.ndarray]:
        s = self.patch_size
        ri = np.flatnonzero((self.rows <= i) & (self.rows > i - s))
        ci = np.flatnonzero((self.cols <= j) & (self.cols > j - s))
        return ri, ci

    def at(self, i: int, j: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(matched_luma, matched_a, matched_b)`` for pixel ``(i, j)``."""
        ri, ci = self.covering(i, j)
        off = self.offsets[np.ix_(ri, ci)].reshape(-1, 2)
        y = i + off[:, 0]
        x = j + off[:, 1]
        g = self.guide
        return g.l[y, x], g.a[y, x], g.b[y, x]


@dataclass
class ScribbleMap:
    """Per-pixel chroma hints (NaN where absent) and their status codes."""

    a: np.ndarray
    b: np.ndarray
    status: np.ndarray

    @property
    def hinted(self) -> np.ndarray:
        return np.isin(self.status, [int(s) for s in HINT_STATUSES])

    def copy(self) -> "ScribbleMap":
        return ScribbleMap(self.a.copy(), self.b.copy(), self.status.copy())

    def fractions(self) -> dict[str, float]:
        n = self.status.size
        return {s.name.lower(): float(np.count_nonzero(self.status == s)) / n for s in Status}


@dataclass
class ScribbleStats:
    """Raw per-pixel quantities kept for calibration and diagnostics."""

    count: np.ndarray  # K, candidates per pixel
    similar: np.ndarray  # r, JND-similar candidates
    raw_a: np.ndarray  # weighted chroma before outlier removal
    raw_b: np.ndarray


def patch_distance(mono_patch: np.ndarray, guide_patch_l: np.ndarray) -> float:
    """Squared Frobenius norm of the luminance difference of two patches."""
    mono_patch = np.asarray(mono_patch, dtype=np.float64)
    guide_patch_l = np.asarray(guide_patch_l, dtype=np.float64)
    if mono_patch.shape != guide_patch_l.shape:
        raise ValueError("patches must have equal size")
    d = mono_patch - guide_patch_l
    return float(np.sum(d * d))


def candidate_weights(target_luma: float, matched_lumas, epsilon: float = 1e-4) -> np.ndarray:
    """Normalized reciprocal-luma-distance weights."""
    lum = np.asarray(matched_lumas, dtype=np.float64)
    if lum.size == 0:
        raise ValueError("need at least one candidate")
    w = 1.0 / (np.abs(lum - target_luma) + epsilon)
    return w / w.sum()


def weighted_color(chroma_a, chroma_b, weights) -> tuple[float, float]:
    w = np.asarray(weights, dtype=np.float64)
    return float(w @ np.asarray(chroma_a, float)), float(w @ np.asarray(chroma_b, float))


def ambiguity_check(chroma_a, chroma_b=None, tau: float = 5.0 / 255.0) -> bool:
    """True when some adjacent gap of the sorted chroma values exceeds ``tau``."""
    for vals in (chroma_a, chroma_b):
        if vals is None:
            continue
        v = np.sort(np.asarray(vals, dtype=np.float64))
        if v.size >= 2 and np.max(np.diff(v)) > tau:
            return True
    return False


def search_offsets(cfg: MatchConfig, geom: PairGeometry) -> tuple[np.ndarray, np.ndarray]:
    """Candidate displacements ordered by magnitude, then row-major."""
    width = geom.max_disparity if cfg.search_width is None else cfg.search_width
    height = 2 * geom.vertical_tolerance if cfg.search_height is None else cfg.search_height
    half = height // 2
    if geom.direction < 0:
        dx = np.arange(-width, 1)
    elif geom.direction > 0:
        dx = np.arange(0, width + 1)
    else:
        dx = np.arange(-width, width + 1)
    dy = np.arange(-half, half + 1)
    gy, gx = np.meshgrid(dy, dx, indexing="ij")
    gy, gx = gy.ravel(), gx.ravel()
    order = np.lexsort((gx, gy, gy * gy + gx * gx))
    return gy[order].astype(np.int64), gx[order].astype(np.int64)


def patch_grid(length: int, size: int, stride: int) -> np.ndarray:
    """Patch origins along one axis; the last patch is flush with the border."""
    if length < size:
        raise ValueError(f"image dimension {length} is smaller than patch size {size}")
    starts = np.arange(0, length - size + 1, stride)
    if starts[-1] != length - size:
        starts = np.append(starts, length - size)
    return starts.astype(np.int64)


def _as32(a):
    return np.ascontiguousarray(a, dtype=np.float32)


def match_patches(mono, guide_l, rows, cols, cfg: MatchConfig, geom: PairGeometry):
    dy, dx = search_offsets(cfg, geom)
    return _kernels.match_grid(_as32(mono), _as32(guide_l), np.asarray(rows, np.int64),
                               np.asarray(cols, np.int64), cfg.patch_size, dy, dx)


def best_match(mono: np.ndarray, guide_l: np.ndarray, at: tuple[int, int],
               cfg: MatchConfig = MatchConfig(), geom: PairGeometry = PairGeometry()):
    """Location in the guidance of the patch closest to the target patch at ``at``."""
    s = cfg.patch_size
    h, w = mono.shape
    r, c = at
    if s > h or s > w or r < 0 or c < 0 or r + s > h or c + s > w:
        raise ValueError(f"patch of size {s} at {at} does not fit a {h}x{w} image")
    offsets, dists = match_patches(mono, guide_l, [r], [c], cfg, geom)
    if not np.isfinite(dists[0, 0]):
        raise ValueError("empty search window")
    return int(r + offsets[0, 0, 0]), int(c + offsets[0, 0, 1])


def _cover_ranges(starts: np.ndarray, length: int, size: int):
    idx = np.arange(length)
    lo = np.searchsorted(starts, idx - size + 1, side="left")
    hi = np.searchsorted(starts, idx, side="right")
    return lo.astype(np.int64), hi.astype(np.int64)


def match_candidates(mono: np.ndarray, guide: LabImage, cfg: MatchConfig = MatchConfig(),
                     geom: PairGeometry = PairGeometry()) -> CandidateSet:
    """Block-match every patch of the stride grid against the guidance lightness."""
    mono = np.asarray(mono, dtype=np.float64)
    if guide.shape != mono.shape:
        raise ValueError(f"guide {guide.shape} and target {mono.shape} differ in size")
    h, w = mono.shape
    s = cfg.patch_size
    rows = patch_grid(h, s, cfg.stride)
    cols = patch_grid(w, s, cfg.stride)
    offsets, dists = match_patches(mono, guide.l, rows, cols, cfg, geom)
    return CandidateSet(rows, cols, offsets, dists, s, guide)


def classify(mono: np.ndarray, jnd: np.ndarray, cands: CandidateSet,
             cfg: MatchConfig = MatchConfig()) -> tuple[ScribbleMap, ScribbleStats]:
    """Valid/occluded/ambiguous status and weighted chroma from a candidate set."""
    mono = np.asarray(mono, dtype=np.float64)
    h, w = mono.shape
    s = cands.patch_size
    row_lo, row_hi = _cover_ranges(cands.rows, h, s)
    col_lo, col_hi = _cover_ranges(cands.cols, w, s)
    g = cands.guide
    status, a, b, count, similar = _kernels.classify_pixels(
        mono, np.ascontiguousarray(jnd, np.float64),
        np.ascontiguousarray(g.l, np.float64),
        np.ascontiguousarray(g.a, np.float64),
        np.ascontiguousarray(g.b, np.float64),
        cands.rows, cands.cols, np.ascontiguousarray(cands.offsets, np.int32),
        row_lo, row_hi, col_lo, col_hi,
        cfg.similar_required, cfg.epsilon, cfg.ambiguity_tau,
    )
    keep = status == Status.VALID
    scribbles = ScribbleMap(np.where(keep, a, np.nan), np.where(keep, b, np.nan), status)
    return scribbles, ScribbleStats(count, similar, a, b)


def dense_scribble(
    mono: np.ndarray,
    guide: LabImage,
    jnd: np.ndarray,
    cfg: MatchConfig = MatchConfig(),
    geom: PairGeometry = PairGeometry(),
    with_stats: bool = False,
):
    """Match the patch grid and turn the candidates into dense scribbles.

    Returns ``(CandidateSet, ScribbleMap)``, plus :class:`ScribbleStats` when
    ``with_stats`` is set.
    """
    cands = match_candidates(mono, guide, cfg, geom)
    scribbles, stats = classify(mono, jnd, cands, cfg)
    if with_stats:
        return cands, scribbles, stats
    return cands, scribbles
