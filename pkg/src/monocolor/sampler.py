"""Probability model for choosing how many patches to sample.

Seen from one pixel, sampling ``N`` of its ``S^2`` covering patches draws
``N`` candidates without replacement from a pool in which ``g`` are
luminance-similar to the pixel.  With a prior ``P(g)`` over the pool and a
linear model of ``P(correct colour | g)`` this gives the probability of a
valid match (``r >= T`` similar draws) and the confidence that a pixel with
exactly ``T`` similar draws receives a correct colour.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from pathlib import Path

import numpy as np

from .imagecore import PairGeometry, rgb_to_lab
from .perception import compute_jnd
from .scribbler import MatchConfig, dense_scribble

DEFAULT_PRIOR_PATH = Path(__file__).with_name("data") / "middlebury.prior"
MIN_BIN_SAMPLES = 50


@dataclass
class PriorTable:
    """``p_g[g]`` for ``g = 0..pool`` and the linear fit of ``P(B | g)``."""

    p_g: np.ndarray
    slope: float
    intercept: float

    def __post_init__(self):
        self.p_g = np.asarray(self.p_g, dtype=np.float64)
        if np.any(self.p_g < 0):
            raise ValueError("prior probabilities must be non-negative")
        if abs(self.p_g.sum() - 1.0) > 1e-9:
            raise ValueError(f"prior sums to {self.p_g.sum()!r}, not 1")

    @property
    def pool(self) -> int:
        return self.p_g.size - 1

    def b_given_g(self, g=None) -> np.ndarray:
        g = np.arange(self.pool + 1) if g is None else np.asarray(g)
        return np.clip(self.slope * g + self.intercept, 0.0, 1.0)

    def save(self, path: str | Path) -> None:
        lines = [f"g {g} {p:.17g}" for g, p in enumerate(self.p_g)]
        lines += [f"slope {self.slope:.17g}", f"intercept {self.intercept:.17g}"]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path: str | Path = DEFAULT_PRIOR_PATH) -> "PriorTable":
        probs: dict[int, float] = {}
        fit = {}
        for n, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "g" and len(parts) == 3:
                probs[int(parts[1])] = float(parts[2])
            elif parts[0] in ("slope", "intercept") and len(parts) == 2:
                fit[parts[0]] = float(parts[1])
            else:
                raise ValueError(f"{path}:{n}: cannot parse {line!r}")
        if not probs or set(fit) != {"slope", "intercept"}:
            raise ValueError(f"{path}: incomplete prior table")
        p = np.zeros(max(probs) + 1)
        for g, v in probs.items():
            p[g] = v
        return cls(p, fit["slope"], fit["intercept"])


def hypergeometric_term(r: int, g: int, n: int, pool: int = 256) -> float:
    """P(r similar among n draws | g similar in a pool), exact; 0 off the support."""
    if n > pool or g > pool or r < 0 or g < 0 or r > min(n, g) or n - r > pool - g:
        return 0.0
    return comb(g, r) * comb(pool - g, n - r) / comb(pool, n)


@lru_cache(maxsize=256)
def _draw_matrix(n: int, pool: int) -> np.ndarray:
    """``M[r, g] = P(A_r | g)`` for r = 0..n, g = 0..pool (exact ratios, then rounded)."""
    total = comb(pool, n)
    m = np.zeros((n + 1, pool + 1))
    for g in range(pool + 1):
        for r in range(max(0, n - (pool - g)), min(n, g) + 1):
            m[r, g] = comb(g, r) * comb(pool - g, n - r) / total
    m.setflags(write=False)
    return m


def draw_distribution(n: int, prior: PriorTable) -> np.ndarray:
    """``P(A_r)`` for r = 0..n under ``prior``."""
    if not 1 <= n <= prior.pool:
        raise ValueError(f"N must lie in [1, {prior.pool}]")
    return _draw_matrix(n, prior.pool) @ prior.p_g


def _check(n: int, t: int, prior: PriorTable):
    if not 1 <= t <= n <= prior.pool:
        raise ValueError(f"need 1 <= T <= N <= {prior.pool}, got N={n}, T={t}")


def prob_valid_match(n: int, t: int, prior: PriorTable) -> float:
    _check(n, t, prior)
    return float(draw_distribution(n, prior)[t:].sum())


def prob_confidence(n: int, t: int, prior: PriorTable) -> float:
    """``P(B | A_T)``: chance of a correct colour given exactly ``T`` similar draws."""
    _check(n, t, prior)
    row = _draw_matrix(n, prior.pool)[t]
    p_at = float(row @ prior.p_g)
    if p_at <= 0.0:
        raise ValueError(f"P(A_T) is zero for N={n}, T={t}")
    return float(row @ (prior.b_given_g() * prior.p_g)) / p_at


def emit_selection_table(prior: PriorTable, n_range, t_range) -> list[tuple[int, int, float, float]]:
    """Rows ``(N, T, valid, confidence)`` for every admissible pair; confidence NaN if undefined."""
    rows = []
    for n in n_range:
        for t in t_range:
            if not 1 <= t <= n <= prior.pool:
                continue
            try:
                conf = prob_confidence(n, t, prior)
            except ValueError:
                conf = float("nan")
            rows.append((n, t, prob_valid_match(n, t, prior), conf))
    return rows


def fit_b_given_g(correct: np.ndarray, total: np.ndarray, min_samples: int = MIN_BIN_SAMPLES):
    """Mass-weighted least-squares line through the per-bin accuracies."""
    g = np.arange(total.size, dtype=np.float64)
    use = total >= min_samples
    if use.sum() == 0:
        raise ValueError("no bin has enough samples for the fit")
    if use.sum() == 1:
        return 0.0, float(correct[use][0] / total[use][0])
    acc = correct[use] / total[use]
    slope, intercept = np.polyfit(g[use], acc, 1, w=np.sqrt(total[use]))
    return float(slope), float(intercept)


def calibration_counts(mono, guide, truth_a, truth_b, cfg: MatchConfig, geom: PairGeometry, jnd=None):
    """Histogram of ``g`` and of correct colours per ``g`` for one pair (interior pixels only)."""
    pool = cfg.patch_size**2
    jnd = compute_jnd(mono) if jnd is None else jnd
    _, _, stats = dense_scribble(mono, guide, jnd, cfg, geom, with_stats=True)
    full = stats.count == pool
    g = stats.similar[full]
    correct = (np.abs(stats.raw_a - truth_a) < jnd) & (np.abs(stats.raw_b - truth_b) < jnd)
    total = np.bincount(g, minlength=pool + 1)
    good = np.bincount(g, weights=correct[full].astype(np.float64), minlength=pool + 1)
    return total.astype(np.float64), good


def calibrate_priors(dataset, cfg: MatchConfig | None = None, geom: PairGeometry = PairGeometry(),
                     min_samples: int = MIN_BIN_SAMPLES) -> PriorTable:
    """Estimate ``P(g)`` and the ``P(B | g)`` line from pairs with ground truth.

    ``dataset`` yields ``(mono, guide_lab, truth_lab)`` triples.  Matching
    runs unsampled (stride 1), so ``g`` is the full similar-candidate count.
    Pixels near the border, whose patch pool is clipped, are left out.
    """
    cfg = MatchConfig.full() if cfg is None else cfg
    pool = cfg.patch_size**2
    total = np.zeros(pool + 1)
    good = np.zeros(pool + 1)
    n_pairs = 0
    for mono, guide, truth in dataset:
        t, c = calibration_counts(mono, guide, truth.a, truth.b, cfg, geom)
        total += t
        good += c
        n_pairs += 1
    if n_pairs == 0:
        raise ValueError("calibration needs at least one pair")
    if total.sum() == 0:
        raise ValueError("no interior pixels; images smaller than two patches?")
    slope, intercept = fit_b_given_g(good, total, min_samples)
    return PriorTable(total / total.sum(), slope, intercept)


def pair_from_rgb(left: np.ndarray, right: np.ndarray):
    """``(mono, guide_lab, truth_lab)`` triple from two rectified RGB views."""
    truth = rgb_to_lab(left)
    return truth.l, rgb_to_lab(right), truth
