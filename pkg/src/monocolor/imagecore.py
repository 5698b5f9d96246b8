"""Image containers, file I/O, CIELAB conversion and guidance preparation.

Planes are plain 2-D ``float64`` arrays in [0, 1]; colour images are
``(H, W, 3)`` arrays.  Lightness is stored as ``L* / 100`` and the two
chroma planes are mapped affinely from [-128, 127] to [0, 1], so every
threshold in the pipeline lives on the same scale.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np

# sRGB primaries, D65 white (IEC 61966-2-1).
_RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_XYZ_TO_RGB = np.linalg.inv(_RGB_TO_XYZ)
# White taken from the matrix itself so that (1, 1, 1) has exactly zero chroma.
_WHITE_D65 = _RGB_TO_XYZ.sum(axis=1)

_EPS = 216.0 / 24389.0
_KAPPA = 24389.0 / 27.0

CHROMA_OFFSET = 128.0
CHROMA_SCALE = 255.0


@dataclass(frozen=True)
class LabImage:
    """Normalized CIELAB planes: ``l = L*/100``, ``a = (a* + 128)/255``, same for b."""

    l: np.ndarray
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        if not (self.l.shape == self.a.shape == self.b.shape) or self.l.ndim != 2:
            raise ValueError(
                f"Lab planes must be equal-size 2-D arrays, got "
                f"{self.l.shape}, {self.a.shape}, {self.b.shape}"
            )

    @property
    def shape(self) -> tuple[int, int]:
        return self.l.shape

    def stack(self) -> np.ndarray:
        return np.stack([self.l, self.a, self.b], axis=-1)


@dataclass(frozen=True)
class PairGeometry:
    """Search geometry of a mono-colour pair.

    ``direction`` is the sign of the horizontal offset from a target pixel to
    its correspondence in the guidance: -1 when the guidance is the right view
    of a rectified pair (content moves left), +1 for the opposite arrangement.
    """

    max_disparity: int = 64
    vertical_tolerance: int = 15
    direction: int = -1

    def __post_init__(self):
        if self.max_disparity < 0 or self.vertical_tolerance < 0:
            raise ValueError("max_disparity and vertical_tolerance must be >= 0")
        if self.direction not in (-1, 0, 1):
            raise ValueError("direction must be -1, 0 or +1")


def _check_rgb(rgb: np.ndarray) -> np.ndarray:
    rgb = np.asarray(rgb, dtype=np.float64)
    if rgb.ndim != 3 or rgb.shape[-1] != 3:
        raise ValueError(f"expected an (H, W, 3) image, got shape {rgb.shape}")
    return rgb


def _srgb_to_linear(c):
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def _linear_to_srgb(c):
    c = np.clip(c, 0.0, None)
    return np.where(c <= 0.0031308, 12.92 * c, 1.055 * c ** (1 / 2.4) - 0.055)


def _f(t):
    return np.where(t > _EPS, np.cbrt(t), (_KAPPA * t + 16.0) / 116.0)


def _f_inv(f):
    f3 = f**3
    return np.where(f3 > _EPS, f3, (116.0 * f - 16.0) / _KAPPA)


def rgb_to_lab(rgb: np.ndarray, white_point: str = "D65") -> LabImage:
    """Convert an sRGB image in [0, 1] to normalized CIELAB planes."""
    if white_point.upper() != "D65":
        raise ValueError(f"unsupported white point {white_point!r}; only D65")
    rgb = _check_rgb(rgb)
    xyz = _srgb_to_linear(rgb) @ _RGB_TO_XYZ.T / _WHITE_D65
    fx, fy, fz = (_f(xyz[..., k]) for k in range(3))
    L = 116.0 * fy - 16.0
    a = 500.0 * (fx - fy)
    b = 200.0 * (fy - fz)
    return LabImage(
        l=np.clip(L / 100.0, 0.0, 1.0),
        a=(a + CHROMA_OFFSET) / CHROMA_SCALE,
        b=(b + CHROMA_OFFSET) / CHROMA_SCALE,
    )


def lab_to_rgb(lab: LabImage) -> np.ndarray:
    """Inverse of :func:`rgb_to_lab`; out-of-gamut colours are clamped to [0, 1]."""
    L = lab.l * 100.0
    a = lab.a * CHROMA_SCALE - CHROMA_OFFSET
    b = lab.b * CHROMA_SCALE - CHROMA_OFFSET
    fy = (L + 16.0) / 116.0
    fx = fy + a / 500.0
    fz = fy - b / 200.0
    xyz = np.stack([_f_inv(fx), _f_inv(fy), _f_inv(fz)], axis=-1) * _WHITE_D65
    rgb = _linear_to_srgb(xyz @ _XYZ_TO_RGB.T)
    return np.clip(rgb, 0.0, 1.0)


def gray_of_color(rgb: np.ndarray) -> np.ndarray:
    """Per-pixel mean of the R, G and B channels."""
    rgb = _check_rgb(rgb)
    return (rgb[..., 0] + rgb[..., 1] + rgb[..., 2]) / 3.0


@dataclass
class IntensityMatch:
    scaled: np.ndarray
    ratio: np.ndarray | float
    degenerate: bool = False


def _box_mean(img: np.ndarray, window: int) -> np.ndarray:
    return cv2.blur(img, (window, window), borderType=cv2.BORDER_REFLECT)


def intensity_match(
    mono: np.ndarray,
    gray: np.ndarray,
    mode: str = "global",
    window: int = 61,
) -> IntensityMatch:
    """Scale ``gray`` so that its intensity level matches ``mono``.

    In ``global`` mode a single ratio ``mean(mono) / mean(gray)`` is used.  In
    ``local`` mode the ratio is the quotient of ``window``-sized box means
    around each pixel, i.e. one ratio per search region.
    """
    mono = np.asarray(mono, dtype=np.float64)
    gray = np.asarray(gray, dtype=np.float64)
    if mono.shape != gray.shape:
        raise ValueError(f"shape mismatch: {mono.shape} vs {gray.shape}")
    if mode == "global":
        mg = gray.mean()
        if mg < 1e-6:
            warnings.warn("guidance is black; intensity matching skipped", RuntimeWarning)
            return IntensityMatch(gray.copy(), 1.0, degenerate=True)
        lam = mono.mean() / mg
        return IntensityMatch(np.clip(lam * gray, 0.0, 1.0), float(lam))
    if mode == "local":
        if window < 1:
            raise ValueError("window must be positive")
        mm = _box_mean(mono, window)
        mg = _box_mean(gray, window)
        bad = mg < 1e-6
        lam = np.where(bad, 1.0, mm / np.where(bad, 1.0, mg))
        return IntensityMatch(np.clip(lam * gray, 0.0, 1.0), lam, degenerate=bool(bad.any()))
    raise ValueError(f"unknown intensity matching mode {mode!r}")


def _keys_kernel(x, a=-0.5):
    x = np.abs(x)
    return np.where(
        x <= 1,
        (a + 2) * x**3 - (a + 3) * x**2 + 1,
        np.where(x < 2, a * x**3 - 5 * a * x**2 + 8 * a * x - 4 * a, 0.0),
    )


def _resample_matrix(n_in: int, n_out: int) -> np.ndarray:
    # Pixel-centre aligned sampling, replicate border.
    scale = n_in / n_out
    centres = (np.arange(n_out) + 0.5) * scale - 0.5
    base = np.floor(centres).astype(int)
    mat = np.zeros((n_out, n_in))
    rows = np.arange(n_out)
    for tap in range(-1, 3):
        idx = base + tap
        w = _keys_kernel(centres - idx)
        np.add.at(mat, (rows, np.clip(idx, 0, n_in - 1)), w)
    return mat / mat.sum(axis=1, keepdims=True)


def upsample_bicubic(
    img: np.ndarray, factor: float | None = None, shape: tuple[int, int] | None = None
) -> np.ndarray:
    """Bicubic (Keys, a = -0.5) upsampling of a plane or colour image.

    Either ``factor`` (output dims ``round(dim * factor)``) or an explicit
    output ``shape`` must be given.
    """
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape[:2]
    if shape is None:
        if factor is None or factor < 1:
            raise ValueError("factor must be >= 1")
        shape = (int(round(h * factor)), int(round(w * factor)))
    if shape == (h, w):
        return img.copy()
    ry = _resample_matrix(h, shape[0])
    rx = _resample_matrix(w, shape[1])
    out = np.einsum("ij,jk...->ik...", ry, img)
    out = np.einsum("ij,kj...->ki...", rx, out)
    return np.clip(out, 0.0, 1.0)


# --------------------------------------------------------------------------- I/O


def read_image(path: str | Path) -> np.ndarray:
    """Read a PNG/PPM/PGM file (8 or 16 bit) as floats in [0, 1].

    Grey files give an ``(H, W)`` array, colour files ``(H, W, 3)`` in RGB order.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such image: {path}")
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise OSError(f"cannot decode image: {path}")
    if raw.dtype == np.uint8:
        img = raw / 255.0
    elif raw.dtype == np.uint16:
        img = raw / 65535.0
    else:
        raise OSError(f"unsupported sample type {raw.dtype} in {path}")
    if img.ndim == 3:
        if img.shape[2] == 4:
            img = img[..., :3]
        img = img[..., ::-1]
    return np.ascontiguousarray(img)


def write_image(path: str | Path, img: np.ndarray, bits: int = 8) -> None:
    """Write a plane or RGB image; format from the suffix (.png, .ppm, .pgm)."""
    path = Path(path)
    if bits not in (8, 16):
        raise ValueError("bits must be 8 or 16")
    img = np.clip(np.asarray(img, dtype=np.float64), 0.0, 1.0)
    peak, dtype = (255, np.uint8) if bits == 8 else (65535, np.uint16)
    q = np.round(img * peak).astype(dtype)
    if q.ndim == 3:
        q = q[..., ::-1]
    suffix = path.suffix.lower()
    if suffix == ".pgm" and q.ndim != 2:
        raise ValueError("PGM files hold a single plane")
    if suffix == ".ppm" and q.ndim != 3:
        raise ValueError("PPM files hold RGB images")
    path.parent.mkdir(parents=True, exist_ok=True)
    if not cv2.imwrite(str(path), np.ascontiguousarray(q)):
        raise OSError(f"cannot write image: {path}")
