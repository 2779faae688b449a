"""End-to-end orchestration: signal -> S-method -> image -> mask -> TV
recovery -> IF comparison, with reproducible on-disk artifacts.

A run writes into its output directory:

  original.pgm / damaged.pgm / reconstructed.pgm (+ .json sidecars, + PNGs)
  mask.pgm (+ .json with the scheme and seed)
  tracks.csv      one row per time index (schema below)
  report.json     fully determined by the config; byte-identical across runs
  timings.json    wall-clock stage timings (excluded from the determinism contract)
  if_overlay.png / error.png

CSV schema: n,t_seconds,f_analytic_hz,f_original_hz,f_reconstructed_hz,error_hz,valid
"""

import csv
import json
import time
from dataclasses import dataclass, asdict, fields, replace
from pathlib import Path

import numpy as np

from .errors import FormatError, PipelineError
from .signals import SignalSpec, generate, analytic_if
from .tfa import Window, SmParams, stft, s_method
from .imagequant import GrayImage, quantize, write_pgm, read_pgm, write_png, apply_mask
from .csrecovery import (UniformScheme, BandedScheme, TvParams,
                         make_mask, write_mask, tv_inpaint)
from .ifest import estimate_if, if_error

CSV_HEADER = ["n", "t_seconds", "f_analytic_hz", "f_original_hz",
              "f_reconstructed_hz", "error_hz", "valid"]


@dataclass(frozen=True)
class RunConfig:
    signal: str = "chirp"
    n: int = 256
    fs: float = 128.0
    t0: float = -1.0
    window: str = "hann"
    wlen: int = 64
    fft_len: int = 256
    sm_l: int = 6
    mask: str = "banded"          # "uniform" | "banded"
    retain: float = 0.46          # uniform scheme only
    p_high: float = 0.45
    p_low: float = 0.01
    low_band: float = 0.25
    seed: int = 70
    epsilon: float = 60.0
    step: float = 0.25
    max_iters: int = 20000
    tol: float = 1e-8
    edge_guard: int = None        # default wlen // 2
    tol_bins: float = 2.0
    out_dir: str = "run_out"
    png: bool = True

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def resolved_edge_guard(self):
        return self.wlen // 2 if self.edge_guard is None else self.edge_guard

    def signal_spec(self):
        return SignalSpec(kind=self.signal, n_samples=self.n, fs=self.fs, t0=self.t0)

    def mask_scheme(self):
        if self.mask == "uniform":
            return UniformScheme(retain_fraction=self.retain)
        if self.mask == "banded":
            return BandedScheme(p_high=self.p_high, p_low=self.p_low,
                                low_band_fraction=self.low_band)
        raise ValueError(f"unknown mask scheme {self.mask!r}")

    def tv_params(self):
        return TvParams(epsilon=self.epsilon, step=self.step,
                        max_iters=self.max_iters, tol=self.tol)


@dataclass
class RunReport:
    config: dict
    solver: dict
    metrics: dict
    deviation_notes: list

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"


def _error_metrics(report):
    return {
        "mse_hz2": report.mse,
        "max_abs_hz": report.max_abs,
        "mean_abs_hz": report.mean_abs,
        "mean_abs_bins": report.mean_abs / report.bin_width_hz,
        "tol_bins": report.tol_bins,
        "frac_within_tol": report.frac_within_tol,
    }


def run_pipeline(config: RunConfig) -> RunReport:
    """Run the full procedure; raises PipelineError with the failing stage."""
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    timings = {}

    def emit(writer, name, *args):
        path = out / name
        writer(*args, path)
        written.append(path)
        sidecar = Path(str(path) + ".json")
        if sidecar.exists():
            written.append(sidecar)
        return path

    stage = "setup"
    t_start = time.perf_counter()
    try:
        stage = "generate"
        spec = config.signal_spec()
        sig = generate(spec)
        timings[stage] = time.perf_counter() - t_start

        stage = "s_method"
        t = time.perf_counter()
        S = stft(sig, Window.make(config.window, config.wlen), config.fft_len)
        sm = s_method(S, SmParams(L=config.sm_l))
        timings[stage] = time.perf_counter() - t

        stage = "quantize"
        t = time.perf_counter()
        original = quantize(sm)
        emit(write_pgm, "original.pgm", original)
        if config.png:
            emit(write_png, "original.png", original)
        timings[stage] = time.perf_counter() - t

        stage = "mask"
        t = time.perf_counter()
        mask = make_mask(original.dims, config.mask_scheme(), config.seed)
        emit(write_mask, "mask.pgm", mask)
        damaged = apply_mask(original, mask)
        emit(write_pgm, "damaged.pgm", damaged)
        if config.png:
            emit(write_png, "damaged.png", damaged)
        timings[stage] = time.perf_counter() - t

        stage = "reconstruct"
        t = time.perf_counter()
        result = tv_inpaint(damaged, mask, config.tv_params())
        # store (and estimate from) the 8-bit version of the recovered image
        reconstructed = GrayImage(pixels=np.floor(result.image.pixels + 0.5),
                                  vmin=result.image.vmin, vmax=result.image.vmax,
                                  fs=result.image.fs, fft_length=result.image.fft_length)
        emit(write_pgm, "reconstructed.pgm", reconstructed)
        if config.png:
            emit(write_png, "reconstructed.png", reconstructed)
        timings[stage] = time.perf_counter() - t

        stage = "estimate"
        t = time.perf_counter()
        guard = config.resolved_edge_guard()
        track_orig = estimate_if(original, edge_guard=guard)
        track_rec = estimate_if(reconstructed, edge_guard=guard)
        err_rec = if_error(track_orig, track_rec, config.tol_bins)

        times = spec.times
        f_analytic = analytic_if(spec, times)
        bin_w = config.fs / config.fft_len
        analytic_bins = np.clip(np.round(f_analytic / bin_w + config.fft_len / 2),
                                0, config.fft_len - 1).astype(int)
        from .ifest import IFTrack
        track_analytic = IFTrack(bins=analytic_bins, valid=track_orig.valid.copy(),
                                 fs=config.fs, fft_length=config.fft_len)
        err_orig_analytic = if_error(track_analytic, track_orig, config.tol_bins)
        err_rec_analytic = if_error(track_analytic, track_rec, config.tol_bins)
        timings[stage] = time.perf_counter() - t

        stage = "csv"
        csv_path = out / "tracks.csv"
        with open(csv_path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(CSV_HEADER)
            f_orig = track_orig.freqs
            f_rec = track_rec.freqs
            for n in range(config.n):
                w.writerow([n, repr(float(times[n])), repr(float(f_analytic[n])),
                            repr(float(f_orig[n])), repr(float(f_rec[n])),
                            repr(float(f_orig[n] - f_rec[n])),
                            int(track_orig.valid[n])])
        written.append(csv_path)

        stage = "report"
        report = RunReport(
            config=asdict(replace(config, edge_guard=guard)),
            solver={
                "iterations": result.iterations,
                "final_objective": float(result.objectives[-1]),
                "status": result.status,
                "mask_observed_pixels": mask.n_observed,
            },
            metrics={
                "original_vs_reconstructed": _error_metrics(err_rec),
                "analytic_vs_original": _error_metrics(err_orig_analytic),
                "analytic_vs_reconstructed": _error_metrics(err_rec_analytic),
            },
            deviation_notes=[
                "images are lossless 8-bit grayscale (PGM/PNG), not JPEG: lossy "
                "block artifacts would confound the missing-pixel experiment",
            ],
        )
        (out / "report.json").write_text(report.to_json())
        written.append(out / "report.json")

        stage = "plots"
        t = time.perf_counter()
        render_plots(csv_path, out)
        timings[stage] = time.perf_counter() - t

        (out / "timings.json").write_text(
            json.dumps({k: round(v, 6) for k, v in timings.items()},
                       sort_keys=True, indent=2) + "\n")
        return report
    except Exception as exc:
        for path in written:
            try:
                path.unlink()
            except OSError:
                pass
        if isinstance(exc, PipelineError):
            raise
        raise PipelineError(stage, str(exc)) from exc


def render_plots(csv_path, out_dir):
    """IF-overlay and error-signal line plots from a tracks CSV."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        with open(csv_path, newline="") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if header != CSV_HEADER:
                raise FormatError(f"{csv_path}: unexpected CSV header {header}")
            rows = [[float(c) for c in row] for row in reader]
    except (OSError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"{csv_path}: malformed CSV ({exc})") from exc
    if not rows:
        raise FormatError(f"{csv_path}: no data rows")
    data = np.asarray(rows)
    valid = data[:, 6] > 0
    if not valid.any():
        raise FormatError(f"{csv_path}: no valid columns")
    t = data[valid, 1]

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(t, data[valid, 3], "r-", label="original image IF")
    ax.plot(t, data[valid, 4], "b--", label="reconstructed image IF")
    ax.set_xlabel("time [s]")
    ax.set_ylabel("frequency [Hz]")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_dir / "if_overlay.png")
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(7, 3))
    ax.plot(t, data[valid, 5], "g-")
    ax.set_xlabel("time [s]")
    ax.set_ylabel("IF error [Hz]")
    fig.tight_layout()
    fig.savefig(out_dir / "error.png")
    plt.close(fig)
    return [out_dir / "if_overlay.png", out_dir / "error.png"]
