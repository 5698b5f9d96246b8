"""End-to-end colorization and its key-value configuration file.

Config files are flat ``section.key = value`` lines; ``#`` starts a comment.
Numbers may be written as fractions (``ambiguity_tau = 5/255``).
"""

from __future__ import annotations

import dataclasses
import logging
import time
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .denoise import DenoiseParams, rrdct_denoise
from .evalkit import NoiseParams
from .imagecore import LabImage, PairGeometry, intensity_match, lab_to_rgb, rgb_to_lab, upsample_bicubic
from .perception import JndParams, compute_jnd
from .propagation import PropagationConfig, propagate
from .scribbler import MatchConfig, ScribbleMap, dense_scribble
from .seeding import Seed, SeedConfig, generate_seeds

log = logging.getLogger(__name__)

_SECTIONS = {
    "match": MatchConfig,
    "geometry": PairGeometry,
    "seed": SeedConfig,
    "propagation": PropagationConfig,
    "denoise": DenoiseParams,
    "jnd": JndParams,
}


@dataclass(frozen=True)
class PipelineConfig:
    match: MatchConfig = field(default_factory=MatchConfig)
    geometry: PairGeometry = field(default_factory=PairGeometry)
    seed: SeedConfig = field(default_factory=SeedConfig)
    propagation: PropagationConfig = field(default_factory=PropagationConfig)
    denoise: DenoiseParams = field(default_factory=DenoiseParams)
    jnd: JndParams = field(default_factory=JndParams)
    pre_denoise: bool = True
    intensity_matching: str = "auto"  # auto | none | global | local
    intensity_window: int = 61
    use_seeds: bool = True
    dump_debug: bool = False
    rng_seed: int = 0

    def replace(self, **changes) -> "PipelineConfig":
        """Copy with top-level fields or ``section__key`` entries changed."""
        top = {}
        nested: dict[str, dict] = {}
        for key, value in changes.items():
            if "__" in key:
                sec, sub = key.split("__", 1)
                nested.setdefault(sec, {})[sub] = value
            else:
                top[key] = value
        for sec, vals in nested.items():
            top[sec] = dataclasses.replace(getattr(self, sec), **vals)
        return dataclasses.replace(self, **top)

    # -- serialization ------------------------------------------------------

    def to_text(self) -> str:
        lines = ["# monocolor pipeline configuration"]
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if f.name in _SECTIONS:
                for sub in dataclasses.fields(value):
                    lines.append(f"{f.name}.{sub.name} = {_fmt(getattr(value, sub.name))}")
            else:
                lines.append(f"{f.name} = {_fmt(value)}")
        return "\n".join(lines) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def from_text(cls, text: str) -> "PipelineConfig":
        base = cls()
        changes = {}
        for n, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"line {n}: expected 'key = value', got {raw!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            if "." in key:
                sec, sub = key.split(".", 1)
                if sec not in _SECTIONS:
                    raise ValueError(f"line {n}: unknown section {sec!r}")
                current = getattr(getattr(base, sec), sub, _MISSING)
                if current is _MISSING and sub not in {f.name for f in dataclasses.fields(_SECTIONS[sec])}:
                    raise ValueError(f"line {n}: unknown key {key!r}")
                changes[f"{sec}__{sub}"] = _parse(value, current)
            else:
                if key not in {f.name for f in dataclasses.fields(cls)} or key in _SECTIONS:
                    raise ValueError(f"line {n}: unknown key {key!r}")
                changes[key] = _parse(value, getattr(base, key))
        return base.replace(**changes)

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        return cls.from_text(Path(path).read_text())


_MISSING = object()


def _fmt(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse(text: str, like):
    low = text.lower()
    if low == "none":
        return None
    if isinstance(like, bool):
        if low in ("true", "yes", "on", "1"):
            return True
        if low in ("false", "no", "off", "0"):
            return False
        raise ValueError(f"not a boolean: {text!r}")
    if isinstance(like, str):
        return text
    num = Fraction(text) if "/" in text else None
    if isinstance(like, int) or (like is None and "." not in text and num is None):
        try:
            return int(text)
        except ValueError:
            pass
    return float(num) if num is not None else float(text)


# ------------------------------------------------------------------ pipeline


@dataclass
class ColorizeResult:
    rgb: np.ndarray
    lab: LabImage
    scribbles: ScribbleMap  # after outlier removal, before seeding
    hints: ScribbleMap  # scribbles plus seeds
    seeds: list[Seed]
    final: ScribbleMap
    timings: dict[str, float]
    flags: list[str] = field(default_factory=list)


def prepare_guide(mono: np.ndarray, guide_rgb: np.ndarray, config: PipelineConfig,
                  noise: NoiseParams | None = None, flags: list | None = None) -> LabImage:
    """Denoise, resize and intensity-match the guidance; returns its Lab planes."""
    flags = [] if flags is None else flags
    guide = np.asarray(guide_rgb, dtype=np.float64)
    resized = guide.shape[:2] != mono.shape
    if config.pre_denoise and not (noise is not None and noise.is_zero):
        res = rrdct_denoise(guide, config.denoise, noise, config.rng_seed)
        if res.passthrough:
            flags.append("denoise-passthrough")
        guide = res.image
    if resized:
        if guide.shape[0] > mono.shape[0] or guide.shape[1] > mono.shape[1]:
            raise ValueError(f"guidance {guide.shape[:2]} is larger than the target {mono.shape}")
        guide = upsample_bicubic(guide, shape=mono.shape)
    lab = rgb_to_lab(guide)
    mode = config.intensity_matching
    if mode == "auto":
        mode = "global" if resized else "none"
    if mode != "none":
        m = intensity_match(mono, lab.l, mode, config.intensity_window)
        if m.degenerate:
            flags.append("intensity-match-degenerate")
        lab = LabImage(m.scaled, lab.a, lab.b)
    return lab


def colorize(mono: np.ndarray, guide_rgb: np.ndarray, config: PipelineConfig = PipelineConfig(),
             noise: NoiseParams | None = None) -> ColorizeResult:
    """Colorize ``mono`` (lightness in [0, 1]) from an RGB guidance image.

    ``noise`` describes the guidance noise for the pre-denoiser; when it is
    omitted the noise level is estimated from the guidance.  The output
    lightness plane is ``mono`` itself.
    """
    mono = np.asarray(mono, dtype=np.float64)
    if mono.ndim != 2:
        raise ValueError("target must be a single plane")
    timings: dict[str, float] = {}
    flags: list[str] = []

    t = time.perf_counter()
    guide = prepare_guide(mono, guide_rgb, config, noise, flags)
    timings["prepare"] = time.perf_counter() - t

    t = time.perf_counter()
    jnd = compute_jnd(mono, config.jnd)
    _, scribbles = dense_scribble(mono, guide, jnd, config.match, config.geometry)
    timings["scribble"] = time.perf_counter() - t

    t = time.perf_counter()
    if config.use_seeds:
        seeded = generate_seeds(mono, scribbles, config.seed)
        hints, seeds = seeded.scribbles, seeded.seeds
        if seeded.skipped:
            flags.append(f"seed-skipped:{len(seeded.skipped)}")
    else:
        hints, seeds = scribbles, []
    timings["seed"] = time.perf_counter() - t

    t = time.perf_counter()
    if hints.hinted.any():
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", RuntimeWarning)
            prop = propagate(mono, hints, config.propagation)
        if not prop.converged:
            flags.append("propagation-not-converged")
        for w in caught:
            log.warning("%s", w.message)
        final = ScribbleMap(prop.a, prop.b, prop.status)
    else:
        flags.append("no-hints")
        neutral = np.full_like(mono, 128.0 / 255.0)
        final = ScribbleMap(neutral, neutral.copy(), hints.status.copy())
    timings["propagate"] = time.perf_counter() - t

    lab = LabImage(mono, np.clip(final.a, 0.0, 1.0), np.clip(final.b, 0.0, 1.0))
    rgb = lab_to_rgb(lab)
    timings["total"] = sum(timings.values())
    return ColorizeResult(rgb, lab, scribbles, hints, seeds, final, timings, flags)
