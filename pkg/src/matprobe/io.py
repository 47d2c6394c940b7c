"""CSV tables with echoed headers, and PGM images."""

from __future__ import annotations

import csv
import io
from typing import Iterable, Optional

import numpy as np

from .errors import ValidationError


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    if isinstance(v, (list, tuple)):
        return ";".join(format_value(x) for x in v)
    return str(v)


def render_csv(meta: dict, columns: list, rows: Iterable[dict], footer: Optional[dict] = None) -> str:
    """``#``-prefixed ``key=value`` header, column row, data rows, optional footer."""
    buf = io.StringIO()
    for key in meta:
        buf.write(f"# {key}={format_value(meta[key])}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format_value(row.get(c)) for c in columns])
    for key in footer or {}:
        buf.write(f"# {key}={format_value(footer[key])}\n")
    return buf.getvalue()


def read_csv(path) -> tuple:
    """Return ``(comments, rows)``; comment values stay strings, rows are dicts."""
    comments, lines = {}, []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                comments[key] = val
            elif line.strip():
                lines.append(line)
    return comments, list(csv.DictReader(lines))


def _tokens(data: bytes):
    """Yield header tokens and the offset just past each one, skipping comments."""
    i = 0
    while i < len(data):
        c = data[i:i + 1]
        if c == b"#":
            while i < len(data) and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
        elif c.isspace():
            i += 1
        else:
            j = i
            while j < len(data) and not data[j:j + 1].isspace() and data[j:j + 1] != b"#":
                j += 1
            yield data[i:j], j
            i = j


def read_pgm(path) -> np.ndarray:
    """Read a P2 or P5 image as floats in ``[0, 1]``, shape ``(rows, cols)``."""
    with open(path, "rb") as fh:
        data = fh.read()
    toks = _tokens(data)
    try:
        magic, _ = next(toks)
        width, _ = next(toks)
        height, _ = next(toks)
        maxval, end = next(toks)
    except StopIteration:
        raise ValidationError(f"{path}: truncated PGM header") from None
    width, height, maxval = int(width), int(height), int(maxval)
    if magic not in (b"P2", b"P5") or not 0 < maxval < 65536:
        raise ValidationError(f"{path}: not a supported PGM image")
    if magic == b"P5":
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        start = end + 1
        count = width * height
        raw = np.frombuffer(data[start:start + count * dtype.itemsize], dtype=dtype)
        if raw.size != count:
            raise ValidationError(f"{path}: truncated PGM raster")
        vals = raw.astype(float)
    else:
        vals = np.array(data[end:].split(), dtype=float)
        if vals.size != width * height:
            raise ValidationError(f"{path}: expected {width * height} samples, got {vals.size}")
    return vals.reshape(height, width) / maxval


def write_pgm(path, image, maxval: int = 255, binary: bool = True) -> None:
    """Write values in ``[0, 1]`` (clipped) as P5 or P2."""
    if maxval not in (255, 65535):
        raise ValidationError("maxval must be 255 or 65535")
    img = np.asarray(image, dtype=float)
    if img.ndim != 2:
        raise ValidationError("PGM images are two dimensional")
    q = np.rint(np.clip(img, 0.0, 1.0) * maxval).astype(np.int64)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"{'P5' if binary else 'P2'}\n{w} {h}\n{maxval}\n".encode())
        if binary:
            fh.write(q.astype(">u2" if maxval > 255 else "u1").tobytes())
        else:
            for row in q:
                fh.write((" ".join(str(v) for v in row) + "\n").encode())
