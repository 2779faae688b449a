"""Test signals with known analytic instantaneous frequency.

Three unit-modulus phase signals are provided:

  slow   x(t)  = exp(j sin(1.2 pi t))      IF  0.6 cos(1.2 pi t)  Hz
  fast   x1(t) = exp(j sin(10 pi t))       IF  5 cos(10 pi t)     Hz
  chirp  x2(t) = exp(-j 40 pi t^2)         IF  -40 t              Hz

The default grid is t in [-1, 1): 256 samples at 128 Hz, which keeps the
chirp IF (+-40 Hz) inside Nyquist (64 Hz) with margin.
"""

from dataclasses import dataclass, field

import numpy as np

KINDS = ("slow", "fast", "chirp")


@dataclass(frozen=True)
class SignalSpec:
    """Which signal to generate and on what uniform time grid."""

    kind: str
    n_samples: int = 256
    fs: float = 128.0
    t0: float = -1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown signal kind {self.kind!r}, expected one of {KINDS}")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.fs <= 0:
            raise ValueError("fs must be > 0")

    @property
    def times(self):
        return self.t0 + np.arange(self.n_samples) / self.fs


@dataclass
class ComplexSignal:
    """Uniformly sampled complex signal."""

    samples: np.ndarray
    fs: float
    t0: float

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("samples must be finite")

    def __len__(self):
        return len(self.samples)

    @property
    def times(self):
        return self.t0 + np.arange(len(self.samples)) / self.fs


def _phase(kind, t):
    t = np.asarray(t, dtype=float)
    if kind == "slow":
        return np.sin(1.2 * np.pi * t)
    if kind == "fast":
        return np.sin(10.0 * np.pi * t)
    if kind == "chirp":
        return -40.0 * np.pi * t**2
    raise ValueError(f"unknown signal kind {kind!r}")


def generate(spec: SignalSpec) -> ComplexSignal:
    """Evaluate the selected formula on the spec's time grid."""
    samples = np.exp(1j * _phase(spec.kind, spec.times))
    return ComplexSignal(samples=samples, fs=spec.fs, t0=spec.t0)


def analytic_if(spec: SignalSpec, t):
    """Closed-form instantaneous frequency in Hz (phase derivative / 2 pi)."""
    t = np.asarray(t, dtype=float)
    if spec.kind == "slow":
        return 0.6 * np.cos(1.2 * np.pi * t)
    if spec.kind == "fast":
        return 5.0 * np.cos(10.0 * np.pi * t)
    return -40.0 * t
