"""Stereo-guided colorization of a monochrome view from a colour view."""

from .evalkit import NoiseParams, psnr, ssim
from .imagecore import LabImage, lab_to_rgb, read_image, rgb_to_lab, write_image
from .pipeline import ColorizeResult, PipelineConfig, colorize

__all__ = [
    "ColorizeResult", "LabImage", "NoiseParams", "PipelineConfig", "colorize",
    "lab_to_rgb", "psnr", "read_image", "rgb_to_lab", "ssim", "write_image",
]
__version__ = "0.1.0"
