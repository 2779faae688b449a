"""Command-line interface.

Subcommands mirror the pipeline stages: generate, analyze, mask,
reconstruct, estimate, plot, and run (end to end). Every flag can also be
supplied through a JSON config file (--config); explicit flags win.
"""

import argparse
import csv
import json
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from .errors import PipelineError
from .signals import SignalSpec, generate
from .tfa import Window, SmParams, stft, s_method
from .imagequant import quantize, write_pgm, read_pgm, write_png
from .csrecovery import (TvParams, make_mask, write_mask, read_mask, tv_inpaint)
from .ifest import estimate_if
from .pipeline import RunConfig, run_pipeline, render_plots


def _add_signal_flags(p):
    p.add_argument("--signal", choices=["slow", "fast", "chirp"])
    p.add_argument("--n", type=int)
    p.add_argument("--fs", type=float)
    p.add_argument("--t0", type=float)


def _add_tfa_flags(p):
    p.add_argument("--window", choices=["hann", "rect"])
    p.add_argument("--wlen", type=int)
    p.add_argument("--fft-len", type=int, dest="fft_len")
    p.add_argument("--sm-l", type=int, dest="sm_l")


def _add_mask_flags(p):
    p.add_argument("--mask", choices=["uniform", "banded"])
    p.add_argument("--retain", type=float)
    p.add_argument("--p-high", type=float, dest="p_high")
    p.add_argument("--p-low", type=float, dest="p_low")
    p.add_argument("--low-band", type=float, dest="low_band")
    p.add_argument("--seed", type=int)


def _add_tv_flags(p):
    p.add_argument("--epsilon", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--max-iters", type=int, dest="max_iters")
    p.add_argument("--tol", type=float)


def build_parser():
    ap = argparse.ArgumentParser(prog="tfrecover",
                                 description="S-method time-frequency analysis with "
                                             "masked-pixel TV recovery and IF estimation")
    ap.add_argument("--config", help="JSON config file; explicit flags win")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a test signal to an .npz file")
    _add_signal_flags(p)
    p.add_argument("--out", default="signal.npz")

    p = sub.add_parser("analyze", help="S-method image of a test signal")
    _add_signal_flags(p)
    _add_tfa_flags(p)
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--no-png", action="store_true")

    p = sub.add_parser("mask", help="generate a sampling mask file")
    _add_mask_flags(p)
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--out", default="mask.pgm")

    p = sub.add_parser("reconstruct", help="TV-inpaint a damaged image")
    _add_tv_flags(p)
    p.add_argument("--image", required=True, help="damaged image (PGM)")
    p.add_argument("--mask-file", required=True, dest="mask_file")
    p.add_argument("--out", default="reconstructed.pgm")

    p = sub.add_parser("estimate", help="estimate the IF track of an image")
    p.add_argument("--image", required=True)
    p.add_argument("--edge-guard", type=int, dest="edge_guard", default=0)
    p.add_argument("--fs", type=float)
    p.add_argument("--fft-len", type=int, dest="fft_len")
    p.add_argument("--out", default="track.csv")

    p = sub.add_parser("run", help="full pipeline: signal to report")
    _add_signal_flags(p)
    _add_tfa_flags(p)
    _add_mask_flags(p)
    _add_tv_flags(p)
    p.add_argument("--edge-guard", type=int, dest="edge_guard")
    p.add_argument("--tol-bins", type=float, dest="tol_bins")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--no-png", action="store_true")

    p = sub.add_parser("plot", help="render IF-overlay and error plots from a tracks CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--out-dir", dest="out_dir", default=".")
    return ap


def _merged(args, names):
    """Config-file values overridden by explicit flags, for the given keys."""
    merged = {}
    if args.config:
        loaded = json.loads(Path(args.config).read_text())
        unknown = set(loaded) - set(names)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        merged.update(loaded)
    for name in names:
        value = getattr(args, name, None)
        if value is not None:
            merged[name] = value
    return merged


def _run_config(args):
    names = [f.name for f in fields(RunConfig)]
    merged = _merged(args, names)
    if getattr(args, "no_png", False):
        merged["png"] = False
    return RunConfig.from_dict(merged)


def _cmd_generate(args):
    cfg = _run_config(args)
    sig = generate(cfg.signal_spec())
    np.savez(args.out, samples=sig.samples, fs=sig.fs, t0=sig.t0)
    print(f"wrote {args.out} ({len(sig)} samples, kind={cfg.signal})")


def _cmd_analyze(args):
    cfg = _run_config(args)
    sig = generate(cfg.signal_spec())
    S = stft(sig, Window.make(cfg.window, cfg.wlen), cfg.fft_len)
    sm = s_method(S, SmParams(L=cfg.sm_l))
    img = quantize(sm)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_pgm(img, out / "original.pgm")
    if cfg.png:
        write_png(img, out / "original.png")
    print(f"wrote {out / 'original.pgm'} ({img.dims[0]}x{img.dims[1]})")


def _cmd_mask(args):
    cfg = _run_config(args)
    mask = make_mask((args.rows, args.cols), cfg.mask_scheme(), cfg.seed)
    write_mask(mask, args.out)
    print(f"wrote {args.out} ({mask.n_observed}/{args.rows * args.cols} observed)")


def _cmd_reconstruct(args):
    cfg = _run_config(args)
    damaged = read_pgm(args.image)
    mask = read_mask(args.mask_file)
    result = tv_inpaint(damaged, mask, cfg.tv_params())
    img = result.image
    img.pixels = np.floor(img.pixels + 0.5)  # 8-bit for storage
    write_pgm(img, args.out)
    print(f"wrote {args.out} (status={result.status}, iterations={result.iterations})")


def _cmd_estimate(args):
    img = read_pgm(args.image)
    track = estimate_if(img, edge_guard=args.edge_guard,
                        fs=args.fs, fft_length=args.fft_len)
    with open(args.out, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["n", "bin", "f_hz", "valid"])
        freqs = track.freqs
        for n in range(len(track)):
            w.writerow([n, int(track.bins[n]), repr(float(freqs[n])),
                        int(track.valid[n])])
    print(f"wrote {args.out} ({len(track)} rows)")


def _cmd_run(args):
    cfg = _run_config(args)
    report = run_pipeline(cfg)
    m = report.metrics["original_vs_reconstructed"]
    print(f"wrote {cfg.out_dir}/: frac_within({m['tol_bins']:g} bins)="
          f"{m['frac_within_tol']:.3f}, mean |error|={m['mean_abs_hz']:.3f} Hz")


def _cmd_plot(args):
    paths = render_plots(args.csv, args.out_dir)
    print("wrote " + ", ".join(str(p) for p in paths))


_COMMANDS = {
    "generate": _cmd_generate,
    "analyze": _cmd_analyze,
    "mask": _cmd_mask,
    "reconstruct": _cmd_reconstruct,
    "estimate": _cmd_estimate,
    "run": _cmd_run,
    "plot": _cmd_plot,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: [{args.command}] {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
