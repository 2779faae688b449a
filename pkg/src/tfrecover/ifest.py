"""Instantaneous frequency estimation from TF maps or images, and IF comparison.

The estimator is the per-column argmax (peak) on the bin grid, with ties
broken toward the smallest bin index. Columns within ``edge_guard`` samples
of either signal end are flagged invalid: STFT zero-padding corrupts the
ridge there.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class IFTrack:
    """Per time instant: frequency-bin index, frequency in Hz, validity flag."""

    bins: np.ndarray
    valid: np.ndarray
    fs: float
    fft_length: int

    @property
    def freqs(self):
        return (self.bins - self.fft_length / 2) * self.fs / self.fft_length

    def __len__(self):
        return len(self.bins)


@dataclass
class ErrorReport:
    """Signed error signal e(n) = f_a(n) - f_b(n) over jointly valid columns."""

    errors_hz: np.ndarray
    joint_valid: np.ndarray
    bin_width_hz: float
    tol_bins: float = 2.0

    @property
    def frac_within_tol(self):
        return self.frac_within(self.tol_bins)

    @property
    def mse(self):
        return float(np.mean(self.errors_hz**2))

    @property
    def max_abs(self):
        return float(np.max(np.abs(self.errors_hz)))

    @property
    def mean_abs(self):
        return float(np.mean(np.abs(self.errors_hz)))

    def frac_within(self, tol_bins: float) -> float:
        return float(np.mean(np.abs(self.errors_hz) <= tol_bins * self.bin_width_hz))


def estimate_if(map_or_image, edge_guard: int = 0, fs: float = None,
                fft_length: int = None) -> IFTrack:
    """Peak IF estimate: argmax over frequency bins for every time row.

    ``fs`` and ``fft_length`` default to the input's own metadata (TFMap or
    GrayImage carrying a sidecar); pass them explicitly for bare arrays.
    """
    values = np.asarray(getattr(map_or_image, "values",
                                getattr(map_or_image, "pixels", map_or_image)),
                        dtype=float)
    if values.size == 0:
        raise ValueError("empty map")
    if fs is None:
        fs = getattr(map_or_image, "fs", None)
    if fft_length is None:
        fft_length = getattr(map_or_image, "fft_length", None)
    if fs is None or fft_length is None:
        raise ValueError("fs and fft_length are required (input carries no metadata)")
    if edge_guard < 0:
        raise ValueError("edge_guard must be >= 0")
    n = values.shape[0]
    bins = np.argmax(values, axis=1)  # ties resolve to the smallest index
    valid = np.ones(n, dtype=bool)
    guard = min(edge_guard, n)
    if guard:
        valid[:guard] = False
        valid[n - guard:] = False
    return IFTrack(bins=bins, valid=valid, fs=float(fs), fft_length=int(fft_length))


def if_error(a: IFTrack, b: IFTrack, tol_bins: float = 2.0) -> ErrorReport:
    """Compare two IF tracks on their jointly valid columns."""
    if a.fs != b.fs or a.fft_length != b.fft_length:
        raise ValueError("tracks have different frequency-axis mappings")
    if len(a) != len(b):
        raise ValueError("tracks have different lengths")
    joint = a.valid & b.valid
    if not joint.any():
        raise ValueError("no jointly valid columns")
    errors = (a.freqs - b.freqs)[joint]
    return ErrorReport(errors_hz=errors, joint_valid=joint,
                       bin_width_hz=a.fs / a.fft_length, tol_bins=tol_bins)
