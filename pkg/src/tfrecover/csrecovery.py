"""Sampling masks, total-variation inpainting, and a small l1 recovery solver.

The TV functional is the smoothed forward-difference form

    TV_eps(s) = sum_{i,j} sqrt((s[i+1,j]-s[i,j])^2 + (s[i,j+1]-s[i,j])^2 + eps^2)

with replicate (Neumann) boundary: differences off the last row/column are 0.
eps = 0 reproduces the exact discrete TV. Inpainting minimizes TV_eps by
projected gradient descent with backtracking; observed pixels are re-imposed
after every step, so the equality constraint holds at every iterate.

The l1 solver is a self-contained demonstrator for the 1-D compressive
sensing model: recover a DFT-sparse spectrum from a subset of time samples
by iterative shrinkage-thresholding, then debias by least squares on the
detected support. It is not used in the image pipeline.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FormatError
from .imagequant import GrayImage, read_pgm


# ---------------------------------------------------------------------------
# sampling masks

@dataclass(frozen=True)
class UniformScheme:
    """Retain round(retain_fraction * total) pixels uniformly over the image."""

    retain_fraction: float

    kind = "uniform"

    def to_dict(self):
        return {"kind": self.kind, "retain_fraction": self.retain_fraction}


@dataclass(frozen=True)
class BandedScheme:
    """Retain round(p_high * total) pixels from the high-frequency band and
    round(p_low * total) from the centered low band.

    Percentages are fractions of the TOTAL pixel count. The low band is the
    centered fraction ``low_band_fraction`` of frequency bins around 0 Hz
    (the image's column axis).
    """

    p_high: float
    p_low: float
    low_band_fraction: float = 0.25

    kind = "banded"

    def to_dict(self):
        return {"kind": self.kind, "p_high": self.p_high, "p_low": self.p_low,
                "low_band_fraction": self.low_band_fraction}


def scheme_from_dict(d):
    d = dict(d)
    kind = d.pop("kind", None)
    if kind == "uniform":
        return UniformScheme(**d)
    if kind == "banded":
        return BandedScheme(**d)
    raise ValueError(f"unknown mask scheme kind {kind!r}")


@dataclass
class PixelMask:
    """Boolean observed/missing matrix with its generation parameters."""

    observed: np.ndarray
    scheme: object
    seed: int

    @property
    def dims(self):
        return self.observed.shape

    @property
    def n_observed(self):
        return int(self.observed.sum())


def _low_band_columns(cols, low_band_fraction):
    n_low = int(round(low_band_fraction * cols))
    lo = cols // 2 - n_low // 2
    return lo, lo + n_low


def make_mask(dims, scheme, seed: int) -> PixelMask:
    """Deterministic mask: same (dims, scheme, seed) always gives the same pixels."""
    rows, cols = dims
    total = rows * cols
    rng = np.random.default_rng(seed)
    observed = np.zeros(total, dtype=bool)
    if isinstance(scheme, UniformScheme):
        n_keep = int(round(scheme.retain_fraction * total))
        if not 0 <= n_keep <= total:
            raise ValueError(f"retain count {n_keep} outside 0..{total}")
        observed[rng.choice(total, size=n_keep, replace=False)] = True
    elif isinstance(scheme, BandedScheme):
        lo, hi = _low_band_columns(cols, scheme.low_band_fraction)
        col_is_low = (np.arange(cols) >= lo) & (np.arange(cols) < hi)
        flat_low = np.flatnonzero(np.broadcast_to(col_is_low, dims).ravel())
        flat_high = np.flatnonzero(np.broadcast_to(~col_is_low, dims).ravel())
        n_high = int(round(scheme.p_high * total))
        n_low = int(round(scheme.p_low * total))
        if n_high > len(flat_high):
            raise ValueError(f"high-band count {n_high} exceeds capacity {len(flat_high)}")
        if n_low > len(flat_low):
            raise ValueError(f"low-band count {n_low} exceeds capacity {len(flat_low)}")
        observed[rng.choice(flat_high, size=n_high, replace=False)] = True
        observed[rng.choice(flat_low, size=n_low, replace=False)] = True
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return PixelMask(observed=observed.reshape(dims), scheme=scheme, seed=seed)


def write_mask(mask: PixelMask, path) -> None:
    """PGM P5 of 0/255 values plus a JSON sidecar with the generation parameters."""
    rows, cols = mask.dims
    path = Path(path)
    with open(path, "wb") as f:
        f.write(f"P5\n{cols} {rows}\n255\n".encode("ascii"))
        f.write((mask.observed.astype(np.uint8) * 255).tobytes())
    meta = {"scheme": mask.scheme.to_dict(), "seed": mask.seed}
    Path(str(path) + ".json").write_text(json.dumps(meta, sort_keys=True) + "\n")


def read_mask(path) -> PixelMask:
    img = read_pgm(path)
    side = Path(str(path) + ".json")
    if not side.exists():
        raise FormatError(f"{side}: mask sidecar missing")
    try:
        meta = json.loads(side.read_text())
    except json.JSONDecodeError:
        raise FormatError(f"{side}: malformed sidecar JSON") from None
    return PixelMask(observed=img.pixels > 127,
                     scheme=scheme_from_dict(meta["scheme"]),
                     seed=meta["seed"])


# ---------------------------------------------------------------------------
# total variation

def _as_array(img):
    return np.asarray(getattr(img, "pixels", img), dtype=float)


def _forward_diffs(s):
    dv = np.zeros_like(s)
    dh = np.zeros_like(s)
    dv[:-1, :] = s[1:, :] - s[:-1, :]
    dh[:, :-1] = s[:, 1:] - s[:, :-1]
    return dv, dh


def tv_value(img, epsilon: float = 0.0) -> float:
    """Smoothed total variation; epsilon = 0 gives the exact discrete TV."""
    s = _as_array(img)
    if not np.all(np.isfinite(s)):
        raise ValueError("image must be finite")
    dv, dh = _forward_diffs(s)
    return float(np.sqrt(dv**2 + dh**2 + epsilon**2).sum())


def tv_gradient(img, epsilon: float):
    """Analytic gradient of tv_value with respect to each pixel."""
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0 (smoothed TV is differentiable)")
    s = _as_array(img)
    dv, dh = _forward_diffs(s)
    t = np.sqrt(dv**2 + dh**2 + epsilon**2)
    # pixel (i,j) appears in its own term (with -dv, -dh) and in the terms
    # of its upper and left neighbors (with +dv, +dh respectively)
    g = -(dv + dh) / t
    g[1:, :] += (dv / t)[:-1, :]
    g[:, 1:] += (dh / t)[:, :-1]
    return g


@dataclass(frozen=True)
class TvParams:
    """Inpainting solver parameters.

    epsilon is in pixel units (0..255 scale). The defaults favor ridge
    propagation from sparse anchors: near-exact TV (tiny epsilon) measurably
    flattens long unobserved ridge segments, so the default smoothing is
    deliberately large.
    """

    epsilon: float = 60.0
    step: float = 0.25
    max_iters: int = 20000
    tol: float = 1e-8

    def __post_init__(self):
        if self.epsilon <= 0 or self.step <= 0 or self.max_iters <= 0 or self.tol <= 0:
            raise ValueError("all TvParams fields must be positive")


@dataclass
class InpaintResult:
    """Recovered image plus solver diagnostics."""

    image: GrayImage
    objectives: np.ndarray
    iterations: int
    converged: bool
    status: str  # "converged" | "max_iters" | "step_underflow"


def tv_inpaint(damaged: GrayImage, mask: PixelMask, params: TvParams = TvParams()) -> InpaintResult:
    """Fill missing pixels by minimizing smoothed TV subject to the observed ones.

    Projected gradient descent with backtracking: every accepted iterate keeps
    the observed pixels at their measured values, and the objective sequence
    over accepted iterates is non-increasing.
    """
    observed = np.asarray(mask.observed, dtype=bool)
    measured = np.asarray(damaged.pixels, dtype=float)
    if observed.shape != measured.shape:
        raise ValueError(f"mask dims {observed.shape} != image dims {measured.shape}")
    if not observed.any():
        raise ValueError("mask has no observed pixels")

    cur = measured.copy()
    cur[~observed] = measured[observed].mean()
    eps = params.epsilon
    step = params.step
    fcur = tv_value(cur, eps)
    grad = tv_gradient(cur, eps)
    objectives = [fcur]
    status = "max_iters"
    it = 0
    while it < params.max_iters:
        cand = cur - step * grad
        cand[observed] = measured[observed]
        fcand = tv_value(cand, eps)
        if fcand > fcur:
            step *= 0.5
            if step < 1e-12:
                status = "step_underflow"
                break
            continue
        rel = (fcur - fcand) / max(fcur, np.finfo(float).tiny)
        cur, fcur = cand, fcand
        grad = tv_gradient(cur, eps)
        objectives.append(fcur)
        it += 1
        if rel < params.tol:
            status = "converged"
            break

    out = np.clip(cur, 0.0, 255.0)
    out[observed] = measured[observed]
    image = GrayImage(pixels=out, vmin=damaged.vmin, vmax=damaged.vmax,
                      fs=damaged.fs, fft_length=damaged.fft_length)
    return InpaintResult(image=image, objectives=np.asarray(objectives),
                         iterations=it, converged=status == "converged", status=status)


# ---------------------------------------------------------------------------
# 1-D compressive sensing demonstrator

@dataclass
class MeasurementSet:
    """Time samples y = x[sample_indices] of a DFT-sparse signal of length N."""

    sample_indices: np.ndarray
    values: np.ndarray
    signal_length: int

    def __post_init__(self):
        self.sample_indices = np.asarray(self.sample_indices, dtype=int)
        self.values = np.asarray(self.values, dtype=complex)
        idx = self.sample_indices
        if len(idx) != len(self.values):
            raise ValueError("indices and values must have equal length")
        if len(idx) > self.signal_length:
            raise ValueError("more measurements than signal samples")
        if len(idx) and (np.any(np.diff(idx) <= 0) or idx[0] < 0
                         or idx[-1] >= self.signal_length):
            raise ValueError("indices must be strictly increasing within 0..N-1")


def l1_recover(meas: MeasurementSet, lam: float, max_iters: int = 2000):
    """Sparse-spectrum recovery by ISTA on 0.5||y - Theta s||^2 + lam ||s||_1.

    The sparsity basis is the unitary inverse DFT (x = ifft(s, norm="ortho")),
    so step size 1 is a valid Lipschitz bound. After ISTA, the coefficients on
    the detected support {k : |s_k| > 1e-6 max|s|} are debiased by
    unregularized least squares.
    """
    if len(meas.sample_indices) == 0:
        raise ValueError("measurement set is empty")
    if lam <= 0:
        raise ValueError("lam must be > 0")
    N = meas.signal_length
    idx = meas.sample_indices
    y = meas.values

    def theta(s):
        return np.fft.ifft(s, norm="ortho")[idx]

    def theta_h(r):
        full = np.zeros(N, complex)
        full[idx] = r
        return np.fft.fft(full, norm="ortho")

    s = np.zeros(N, complex)
    for _ in range(max_iters):
        z = s - theta_h(theta(s) - y)
        mag = np.abs(z)
        with np.errstate(invalid="ignore", divide="ignore"):
            s = np.where(mag > lam, z * (1.0 - lam / np.where(mag > 0, mag, 1.0)), 0.0)

    peak = np.abs(s).max()
    if peak == 0:
        return s
    support = np.flatnonzero(np.abs(s) > 1e-6 * peak)
    basis = np.fft.ifft(np.eye(N, dtype=complex)[:, support], axis=0, norm="ortho")[idx]
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    out = np.zeros(N, complex)
    out[support] = coef
    return out
