import csv
import json

import numpy as np
import pytest

from tfrecover import (RunConfig, run_pipeline, render_plots, read_pgm,
                       FormatError, PipelineError)
from tfrecover.cli import main
from tfrecover.pipeline import CSV_HEADER


def small_config(out_dir, **overrides):
    base = dict(signal="chirp", n=64, fs=128.0, t0=-0.25, wlen=16, fft_len=64,
                sm_l=3, mask="uniform", retain=0.6, seed=4, epsilon=10.0,
                max_iters=300, tol=1e-7, out_dir=str(out_dir), png=False)
    base.update(overrides)
    return RunConfig(**base)


def test_full_observation_recovers_exactly(tmp_path):
    cfg = small_config(tmp_path / "full", retain=1.0)
    report = run_pipeline(cfg)
    orig = read_pgm(tmp_path / "full" / "original.pgm")
    rec = read_pgm(tmp_path / "full" / "reconstructed.pgm")
    np.testing.assert_array_equal(orig.pixels, rec.pixels)
    m = report.metrics["original_vs_reconstructed"]
    assert m["mse_hz2"] == 0.0 and m["frac_within_tol"] == 1.0


def test_csv_schema_and_row_count(tmp_path):
    cfg = small_config(tmp_path / "run")
    run_pipeline(cfg)
    with open(tmp_path / "run" / "tracks.csv", newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == CSV_HEADER
    assert len(rows) == 1 + cfg.n


def test_run_determinism_byte_identical(tmp_path):
    cfg_a = small_config(tmp_path / "a")
    cfg_b = small_config(tmp_path / "b")
    run_pipeline(cfg_a)
    run_pipeline(cfg_b)
    for name in ("tracks.csv", "report.json"):
        a = (tmp_path / "a" / name).read_bytes()
        b = (tmp_path / "b" / name).read_bytes()
        # out_dir is the only config field allowed to differ
        assert a.replace(str(tmp_path / "a").encode(), b"X") == \
            b.replace(str(tmp_path / "b").encode(), b"X")


def test_plots_exist_and_nonempty(tmp_path):
    cfg = small_config(tmp_path / "run", png=True)
    run_pipeline(cfg)
    for name in ("if_overlay.png", "error.png", "original.png",
                 "reconstructed.png"):
        assert (tmp_path / "run" / name).stat().st_size > 0


def test_report_is_config_determined(tmp_path):
    cfg = small_config(tmp_path / "r")
    report = run_pipeline(cfg)
    loaded = json.loads((tmp_path / "r" / "report.json").read_text())
    assert loaded["config"]["seed"] == cfg.seed
    assert loaded["solver"]["iterations"] >= 0
    assert "timings" not in loaded  # timings live in timings.json only
    assert (tmp_path / "r" / "timings.json").exists()


def test_stage_error_tagged_and_partial_outputs_removed(tmp_path):
    out = tmp_path / "fail"
    # banded high-band request exceeds capacity -> mask stage fails after
    # original.pgm was already written
    cfg = small_config(out, mask="banded", p_high=0.9, p_low=0.01,
                      low_band=0.5)
    with pytest.raises(PipelineError) as exc:
        run_pipeline(cfg)
    assert exc.value.stage == "mask"
    assert not (out / "original.pgm").exists()


def test_unknown_config_key_rejected():
    with pytest.raises(ValueError):
        RunConfig.from_dict({"signal": "chirp", "bogus": 1})


def test_render_plots_flat_zero_error(tmp_path):
    path = tmp_path / "tracks.csv"
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(CSV_HEADER)
        for n in range(10):
            w.writerow([n, n * 0.1, 1.0, 1.0, 1.0, 0.0, 1])
    outs = render_plots(path, tmp_path)
    for p in outs:
        assert p.stat().st_size > 0


def test_render_plots_malformed_csv(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("not,a,tracks,file\n1,2,3,4\n")
    with pytest.raises(FormatError):
        render_plots(path, tmp_path)


def test_render_plots_empty_valid_set(tmp_path):
    path = tmp_path / "tracks.csv"
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(CSV_HEADER)
        w.writerow([0, 0.0, 1.0, 1.0, 1.0, 0.0, 0])
    with pytest.raises(FormatError):
        render_plots(path, tmp_path)


# ---------------------------------------------------------------------------
# CLI

def test_cli_generate(tmp_path):
    out = tmp_path / "sig.npz"
    assert main(["generate", "--signal", "chirp", "--n", "32",
                 "--out", str(out)]) == 0
    data = np.load(out)
    assert len(data["samples"]) == 32


def test_cli_stagewise_roundtrip(tmp_path):
    img_dir = tmp_path / "img"
    assert main(["analyze", "--signal", "chirp", "--n", "64", "--t0", "-0.25",
                 "--wlen", "16", "--fft-len", "64", "--sm-l", "3",
                 "--out-dir", str(img_dir), "--no-png"]) == 0
    mask_path = tmp_path / "mask.pgm"
    assert main(["mask", "--rows", "64", "--cols", "64", "--mask", "uniform",
                 "--retain", "0.6", "--seed", "4", "--out", str(mask_path)]) == 0
    rec_path = tmp_path / "rec.pgm"
    assert main(["reconstruct", "--image", str(img_dir / "original.pgm"),
                 "--mask-file", str(mask_path), "--epsilon", "10",
                 "--max-iters", "200", "--out", str(rec_path)]) == 0
    track_path = tmp_path / "track.csv"
    assert main(["estimate", "--image", str(rec_path), "--edge-guard", "8",
                 "--out", str(track_path)]) == 0
    with open(track_path, newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["n", "bin", "f_hz", "valid"]
    assert len(rows) == 1 + 64


def test_cli_run_and_plot(tmp_path):
    out = tmp_path / "run"
    assert main(["run", "--signal", "chirp", "--n", "64", "--t0", "-0.25",
                 "--wlen", "16", "--fft-len", "64", "--sm-l", "3",
                 "--mask", "uniform", "--retain", "0.7", "--seed", "1",
                 "--epsilon", "10", "--max-iters", "200",
                 "--out-dir", str(out), "--no-png"]) == 0
    assert (out / "report.json").exists()
    plot_dir = tmp_path / "plots"
    assert main(["plot", "--csv", str(out / "tracks.csv"),
                 "--out-dir", str(plot_dir)]) == 0
    assert (plot_dir / "if_overlay.png").exists()


def test_cli_config_file_with_flag_override(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({
        "signal": "chirp", "n": 64, "t0": -0.25, "wlen": 16, "fft_len": 64,
        "sm_l": 3, "mask": "uniform", "retain": 0.5, "seed": 2,
        "epsilon": 10.0, "max_iters": 100, "png": False,
        "out_dir": str(tmp_path / "from_config")}))
    out = tmp_path / "from_flag"
    assert main(["--config", str(cfg_path), "run", "--out-dir", str(out)]) == 0
    assert (out / "report.json").exists()
    assert not (tmp_path / "from_config").exists()


def test_cli_unknown_config_key(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"nope": 1}))
    assert main(["--config", str(cfg_path), "run"]) == 1


def test_cli_errors_exit_nonzero(tmp_path):
    assert main(["estimate", "--image", str(tmp_path / "missing.pgm")]) == 1
    assert main(["plot", "--csv", str(tmp_path / "missing.csv")]) == 1
