"""Discrete STFT, spectrogram, and S-method.

The STFT slides a length-M window over the signal with hop 1 and a centered
lag axis (the window covers x[n-M/2 .. n+M/2-1]); edges are zero-padded.
The S-method sharpens the spectrogram by adding cross products of STFT
values from a +-L frequency neighborhood:

    SM(n, k) = |STFT(n, k)|^2 + 2 Re sum_{l=1..L} STFT(n, k+l) STFT*(n, k-l)

Both the spectrogram and the S-method are returned with the frequency axis
center-shifted so that bin K/2 is 0 Hz. Neighborhood terms that fall outside
the shifted bin range are dropped rather than wrapped, so no energy aliases
across the Nyquist edge.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class Window:
    """Analysis window: kind, even length M, and coefficients."""

    kind: str
    length: int
    coefficients: np.ndarray

    @classmethod
    def make(cls, kind: str, length: int) -> "Window":
        if length < 2 or length % 2 != 0:
            raise ValueError("window length must be even and >= 2")
        if kind == "rect":
            coeff = np.ones(length)
        elif kind == "hann":
            # periodic Hann
            coeff = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(length) / length)
        else:
            raise ValueError(f"unknown window kind {kind!r}")
        return cls(kind=kind, length=length, coefficients=coeff)


@dataclass
class StftMatrix:
    """Complex STFT values, time rows n = 0..N-1, DFT-ordered frequency columns."""

    values: np.ndarray
    fs: float
    window_length: int
    fft_length: int


@dataclass(frozen=True)
class SmParams:
    """Half-width L of the rectangular frequency-domain window (2L+1 taps)."""

    L: int = 6

    def validate(self, fft_length):
        if not 0 <= self.L < fft_length // 2:
            raise ValueError(f"require 0 <= L < K/2, got L={self.L}, K={fft_length}")


@dataclass
class TFMap:
    """Real time-frequency map, center-shifted: bin k maps to (k - K/2) fs / K Hz."""

    values: np.ndarray
    fs: float
    fft_length: int

    def freq_of_bin(self, k):
        return (np.asarray(k) - self.fft_length / 2) * self.fs / self.fft_length

    @property
    def freqs(self):
        return self.freq_of_bin(np.arange(self.fft_length))


def stft(signal, window: Window, fft_length: int) -> StftMatrix:
    """Sliding-window DFT, hop 1, centered lag axis, zero-padded edges."""
    M = window.length
    K = fft_length
    if K < M:
        raise ValueError(f"fft_length {K} must be >= window length {M}")
    if K % 2 != 0:
        raise ValueError("fft_length must be even")
    x = np.asarray(signal.samples, dtype=complex)
    N = len(x)
    if N == 0:
        raise ValueError("signal is empty")
    half = M // 2
    xp = np.concatenate([np.zeros(half, complex), x, np.zeros(half, complex)])
    frames = np.lib.stride_tricks.sliding_window_view(xp, M)[:N] * window.coefficients
    # place lag m = -M/2..M/2-1 at DFT position m mod K so the exponent is e^{-j2pi m k/K}
    buf = np.zeros((N, K), complex)
    buf[:, :half] = frames[:, half:]
    buf[:, K - half:] = frames[:, :half]
    return StftMatrix(values=np.fft.fft(buf, axis=1), fs=signal.fs,
                      window_length=M, fft_length=K)


def spectrogram(S: StftMatrix) -> TFMap:
    """Squared magnitude of the STFT, frequency axis center-shifted."""
    values = np.fft.fftshift(np.abs(S.values) ** 2, axes=1)
    return TFMap(values=values, fs=S.fs, fft_length=S.fft_length)


def s_method(S: StftMatrix, params: SmParams = SmParams()) -> TFMap:
    """Rectangular-window S-method; L=0 degenerates to the spectrogram."""
    params.validate(S.fft_length)
    Sc = np.fft.fftshift(S.values, axes=1)
    K = S.fft_length
    sm = np.abs(Sc) ** 2
    for l in range(1, params.L + 1):
        # term at output bin k is Sc[k+l] * conj(Sc[k-l]); out-of-range bins dropped
        sm[:, l:K - l] += 2.0 * np.real(Sc[:, 2 * l:] * np.conj(Sc[:, :K - 2 * l]))
    return TFMap(values=sm, fs=S.fs, fft_length=K)
