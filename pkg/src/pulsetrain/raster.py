"""Greyscale PNG rendering of spectrogram excerpts.

Minimal self-contained PNG writer (8-bit greyscale, zlib-deflated) so the
annotation service produces bit-stable images with no plotting dependency.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .spectrogram import Spectrogram

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


def _chunk(kind: bytes, payload: bytes) -> bytes:
    body = kind + payload
    return struct.pack(">I", len(payload)) + body + struct.pack(">I", zlib.crc32(body))


def write_png_grey8(pixels: np.ndarray) -> bytes:
    """Encode a (height, width) uint8 matrix as a PNG byte string."""
    pixels = np.ascontiguousarray(pixels, dtype=np.uint8)
    if pixels.ndim != 2:
        raise ValueError("expected a 2-d greyscale matrix")
    h, w = pixels.shape
    # each scanline prefixed with filter type 0
    raw = b"".join(b"\x00" + pixels[r].tobytes() for r in range(h))
    ihdr = struct.pack(">IIBBBBB", w, h, 8, 0, 0, 0, 0)
    return (
        PNG_SIGNATURE
        + _chunk(b"IHDR", ihdr)
        + _chunk(b"IDAT", zlib.compress(raw, 9))
        + _chunk(b"IEND", b"")
    )


def spectrogram_raster(
    spec: Spectrogram,
    t0_s: float,
    t1_s: float,
    outline: tuple[float, float, float, float] | None = None,
) -> np.ndarray:
    """Greyscale pixels for the [t0, t1] excerpt: time on x, frequency on y.

    dB maps linearly from the spectrogram floor (black) to the excerpt
    maximum (white); row 0 is the highest frequency. ``outline`` draws a
    one-pixel white box around (t_start, t_end, f_lo, f_hi).
    """
    frames = spec.frames_in_span(t0_s, t1_s)
    if frames.size == 0:
        frames = np.arange(spec.n_frames)
    cells = spec.cells_db[frames]  # [frames x bins]

    floor = spec.params.floor_db
    top = float(cells.max())
    if top <= floor:
        scaled = np.zeros(cells.shape)
    else:
        scaled = (cells - floor) / (top - floor)
    pixels = np.round(np.clip(scaled, 0.0, 1.0) * 255.0).astype(np.uint8)
    # transpose to (freq, time) and flip so high frequencies sit on top
    pixels = pixels.T[::-1]

    if outline is not None:
        e_t0, e_t1, e_flo, e_fhi = outline
        times = spec.frame_times_s[frames]
        x0 = int(np.searchsorted(times, e_t0))
        x1 = int(np.searchsorted(times, e_t1, side="right")) - 1
        y_hi = pixels.shape[0] - 1 - int(np.searchsorted(spec.bin_freqs_hz, e_fhi, side="right")) + 1
        y_lo = pixels.shape[0] - 1 - int(np.searchsorted(spec.bin_freqs_hz, e_flo))
        x0, x1 = max(0, x0), min(pixels.shape[1] - 1, max(x0, x1))
        y_hi, y_lo = max(0, y_hi), min(pixels.shape[0] - 1, max(y_hi, y_lo))
        pixels[y_hi, x0 : x1 + 1] = 255
        pixels[y_lo, x0 : x1 + 1] = 255
        pixels[y_hi : y_lo + 1, x0] = 255
        pixels[y_hi : y_lo + 1, x1] = 255

    return pixels


def spectrogram_png(
    spec: Spectrogram,
    t0_s: float,
    t1_s: float,
    outline: tuple[float, float, float, float] | None = None,
) -> bytes:
    return write_png_grey8(spectrogram_raster(spec, t0_s, t1_s, outline))
