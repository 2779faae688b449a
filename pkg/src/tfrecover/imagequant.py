"""8-bit grayscale quantization of TF maps and lossless image I/O.

Negative map values (possible from the S-method cross sum) are clipped to 0
before scaling. Images are stored as binary PGM (P5, maxval 255) with a JSON
sidecar carrying the scaling range and frequency-axis metadata so the map
remains dequantizable.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError


@dataclass
class GrayImage:
    """Float pixels in [0, 255] plus the map range that produced them."""

    pixels: np.ndarray
    vmin: float
    vmax: float
    fs: float = None
    fft_length: int = None

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=float)
        if not np.all(np.isfinite(self.pixels)):
            raise ValueError("pixels must be finite")
        if self.pixels.min() < 0 or self.pixels.max() > 255:
            raise ValueError("pixels must lie in [0, 255]")
        if self.vmax < self.vmin:
            raise ValueError("vmax must be >= vmin")

    @property
    def dims(self):
        return self.pixels.shape


def quantize(tfmap) -> GrayImage:
    """Clip negatives, scale the full range to 0..255, round half away from zero."""
    v = np.clip(np.asarray(tfmap.values, dtype=float), 0.0, None)
    vmin = float(v.min())
    vmax = float(v.max())
    if vmax == vmin:
        pixels = np.zeros_like(v)
    else:
        # values are nonnegative after scaling, so floor(x + 0.5) rounds half away from zero
        pixels = np.floor(255.0 * (v - vmin) / (vmax - vmin) + 0.5)
    return GrayImage(pixels=pixels, vmin=vmin, vmax=vmax,
                     fs=getattr(tfmap, "fs", None),
                     fft_length=getattr(tfmap, "fft_length", None))


def _sidecar_path(path):
    return Path(str(path) + ".json")


def write_pgm(img: GrayImage, path) -> None:
    """Binary PGM (P5, maxval 255) plus a JSON metadata sidecar."""
    px = img.pixels
    if not np.array_equal(px, np.round(px)):
        raise ValueError("pixels must be integral; quantize first")
    rows, cols = px.shape
    path = Path(path)
    with open(path, "wb") as f:
        f.write(f"P5\n{cols} {rows}\n255\n".encode("ascii"))
        f.write(px.astype(np.uint8).tobytes())
    meta = {"vmin": img.vmin, "vmax": img.vmax, "rows": rows, "cols": cols,
            "fs": img.fs, "fft_length": img.fft_length}
    _sidecar_path(path).write_text(json.dumps(meta, sort_keys=True) + "\n")


def read_pgm(path) -> GrayImage:
    """Read a binary PGM written by write_pgm; the sidecar is optional."""
    data = Path(path).read_bytes()
    fields = []
    pos = 0
    while len(fields) < 4 and pos < len(data):
        # header tokens separated by whitespace; '#' starts a comment
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            nl = data.find(b"\n", pos)
            if nl < 0:
                raise FormatError(f"{path}: unterminated comment in header")
            pos = nl + 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos])
    if len(fields) < 4:
        raise FormatError(f"{path}: truncated PGM header")
    magic, w, h, maxval = fields
    if magic != b"P5":
        raise FormatError(f"{path}: not a binary PGM (magic {magic!r})")
    try:
        cols, rows, maxval = int(w), int(h), int(maxval)
    except ValueError:
        raise FormatError(f"{path}: non-numeric PGM header fields") from None
    if maxval != 255:
        raise FormatError(f"{path}: unsupported maxval {maxval} (only 255)")
    pos += 1  # single whitespace byte after maxval
    body = data[pos:pos + rows * cols]
    if len(body) != rows * cols:
        raise FormatError(f"{path}: truncated pixel data "
                          f"({len(body)} of {rows * cols} bytes)")
    pixels = np.frombuffer(body, dtype=np.uint8).reshape(rows, cols).astype(float)
    vmin, vmax, fs, fft_length = 0.0, 255.0, None, None
    side = _sidecar_path(path)
    if side.exists():
        try:
            meta = json.loads(side.read_text())
        except json.JSONDecodeError:
            raise FormatError(f"{side}: malformed sidecar JSON") from None
        vmin, vmax = meta.get("vmin", 0.0), meta.get("vmax", 255.0)
        fs, fft_length = meta.get("fs"), meta.get("fft_length")
    return GrayImage(pixels=pixels, vmin=vmin, vmax=vmax, fs=fs, fft_length=fft_length)


def write_png(img: GrayImage, path) -> None:
    """Optional 8-bit grayscale PNG export (display convenience)."""
    from PIL import Image

    Image.fromarray(img.pixels.astype(np.uint8), mode="L").save(str(path))


def apply_mask(img: GrayImage, mask) -> GrayImage:
    """Zero out missing pixels; observed ones pass through unchanged."""
    observed = np.asarray(mask.observed, dtype=bool)
    if observed.shape != img.pixels.shape:
        raise ValueError(f"mask dims {observed.shape} != image dims {img.pixels.shape}")
    pixels = np.where(observed, img.pixels, 0.0)
    return GrayImage(pixels=pixels, vmin=img.vmin, vmax=img.vmax,
                     fs=img.fs, fft_length=img.fft_length)
