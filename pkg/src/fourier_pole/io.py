"""File formats: binary PGM images, FPES float grids, CSV tables and JSON sidecars.

All angles written to disk are in degrees and their field names end in
``_deg``.
"""

from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

FPES_MAGIC = b"FPES"


def write_pgm(path, pixels, maxval=None) -> None:
    """Write a P5 (binary) PGM.

    Boolean images are stored as 0/255. Integer images keep their values with
    ``maxval`` defaulting to the image maximum; values above 255 use two
    big-endian bytes per pixel as the format requires.
    """
    a = np.asarray(pixels)
    if a.ndim != 2:
        raise ValueError("PGM images are 2D")
    if a.dtype == bool:
        a = a.astype(np.uint8) * 255
        maxval = 255
    if maxval is None:
        maxval = int(a.max()) if a.size else 0
    maxval = max(int(maxval), 1)
    if maxval > 65535 or a.min() < 0 or a.max() > maxval:
        raise ValueError("pixel values do not fit the PGM maxval")
    dtype = ">u1" if maxval < 256 else ">u2"
    h, w = a.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n{maxval}\n".encode("ascii"))
        f.write(a.astype(dtype).tobytes())


def _pgm_tokens(data: bytes, count: int):
    """First ``count`` header tokens of a PGM plus the offset of the raster."""
    tokens = []
    pos = 0
    while len(tokens) < count:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError("truncated PGM header")
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def read_pgm(path) -> tuple:
    """Read a P5 PGM; returns ``(pixels, maxval)`` with integer pixels."""
    data = Path(path).read_bytes()
    try:
        tokens, offset = _pgm_tokens(data, 4)
    except (ValueError, IndexError) as exc:
        raise ValueError(f"{path}: malformed PGM header") from exc
    if tokens[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM")
    w, h, maxval = (int(t) for t in tokens[1:])
    dtype = ">u1" if maxval < 256 else ">u2"
    need = w * h * np.dtype(dtype).itemsize
    raster = data[offset:offset + need]
    if len(raster) != need:
        raise ValueError(f"{path}: truncated PGM raster")
    return np.frombuffer(raster, dtype=dtype).reshape(h, w).astype(np.int64), maxval


def read_silhouette_pgm(path) -> np.ndarray:
    pixels, _ = read_pgm(path)
    return pixels > 0


def write_fpes(path, grid) -> None:
    """Square float grid: ``FPES``, N as uint32 LE, then N*N float32 LE row-major."""
    g = np.asarray(grid)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError("FPES grids are square")
    with open(path, "wb") as f:
        f.write(FPES_MAGIC + struct.pack("<I", g.shape[0]))
        f.write(g.astype("<f4").tobytes())


def read_fpes(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if data[:4] != FPES_MAGIC:
        raise ValueError(f"{path}: bad FPES magic")
    (n,) = struct.unpack("<I", data[4:8])
    body = data[8:]
    if len(body) != 4 * n * n:
        raise ValueError(f"{path}: FPES size mismatch")
    return np.frombuffer(body, dtype="<f4").reshape(n, n).copy()


def write_json(path, obj) -> None:
    with open(path, "w") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")


def read_json(path):
    with open(path) as f:
        return json.load(f)


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as f:
        out = csv.writer(f)
        out.writerow(header)
        for r in rows:
            out.writerow([_fmt(x) for x in r])


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, np.integer):
        return int(x)
    return x


def read_csv(path) -> list:
    """Rows as dicts keyed by the header."""
    with open(path, newline="") as f:
        return list(csv.DictReader(f))
