"""Time-frequency analysis, masked-pixel recovery, and IF estimation toolkit.

Pipeline: generate a test signal -> S-method time-frequency map -> 8-bit
grayscale image -> discard pixels by a sampling mask -> recover the image by
smoothed total-variation minimization -> compare the instantaneous frequency
estimated from the recovered image against the one from the full image.
"""

from .signals import SignalSpec, ComplexSignal, generate, analytic_if
from .tfa import Window, StftMatrix, SmParams, TFMap, stft, spectrogram, s_method
from .imagequant import GrayImage, quantize, write_pgm, read_pgm, write_png, apply_mask
from .csrecovery import (
    PixelMask,
    UniformScheme,
    BandedScheme,
    TvParams,
    MeasurementSet,
    InpaintResult,
    make_mask,
    write_mask,
    read_mask,
    tv_value,
    tv_gradient,
    tv_inpaint,
    l1_recover,
)
from .ifest import IFTrack, ErrorReport, estimate_if, if_error
from .pipeline import RunConfig, RunReport, run_pipeline, render_plots
from .errors import FormatError, PipelineError

__version__ = "0.1.0"

__all__ = [
    "SignalSpec", "ComplexSignal", "generate", "analytic_if",
    "Window", "StftMatrix", "SmParams", "TFMap", "stft", "spectrogram", "s_method",
    "GrayImage", "quantize", "write_pgm", "read_pgm", "write_png", "apply_mask",
    "PixelMask", "UniformScheme", "BandedScheme", "TvParams", "MeasurementSet",
    "InpaintResult", "make_mask", "write_mask", "read_mask",
    "tv_value", "tv_gradient", "tv_inpaint", "l1_recover",
    "IFTrack", "ErrorReport", "estimate_if", "if_error",
    "RunConfig", "RunReport", "run_pipeline", "render_plots",
    "FormatError", "PipelineError",
]
