"""Image and signal file I/O: PGM (P2/P5), optional PNG, complex-signal CSV."""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np

from .signal import Signal2D, TorusGrid


def _pgm_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """First ``count`` header tokens and the offset just past the last one."""
    tokens: list[bytes] = []
    i = 0
    while len(tokens) < count:
        if i >= len(data):
            raise ValueError("truncated PGM header")
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
            tokens.append(data[i:j])
            i = j
    return tokens, i


def read_pgm(path: str | Path) -> np.ndarray:
    """Read an 8- or 16-bit grayscale PGM (plain P2 or raw P5) as floats."""
    data = Path(path).read_bytes()
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise ValueError(f"{path}: not a P2/P5 PGM file")
    try:
        tokens, pos = _pgm_tokens(data[2:], 3)
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise ValueError(f"{path}: malformed PGM header") from exc
    if width <= 0 or height <= 0 or not 0 < maxval < 65536:
        raise ValueError(f"{path}: bad PGM dimensions or maxval")
    body = data[2 + pos:]
    if magic == b"P2":
        vals = np.array(body.split(), dtype=np.int64)
        if vals.size < width * height:
            raise ValueError(f"{path}: truncated pixel data")
        pix = vals[: width * height]
    else:
        # Exactly one whitespace byte separates the header from raw data.
        raw = body[1:]
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        if len(raw) < width * height * dtype.itemsize:
            raise ValueError(f"{path}: truncated pixel data")
        pix = np.frombuffer(raw, dtype=dtype, count=width * height)
    if pix.max(initial=0) > maxval:
        raise ValueError(f"{path}: pixel value exceeds maxval")
    return pix.reshape(height, width).astype(float)


def to_uint8(image: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(np.asarray(image, float)), 0, 255).astype(np.uint8)


def write_pgm(path: str | Path, image: np.ndarray, plain: bool = False) -> None:
    """Write an image as 8-bit PGM; values are rounded and clamped to ``[0, 255]``."""
    pix = to_uint8(image)
    h, w = pix.shape
    if plain:
        buf = io.StringIO()
        buf.write(f"P2\n{w} {h}\n255\n")
        for row in pix:
            buf.write(" ".join(str(int(v)) for v in row) + "\n")
        Path(path).write_text(buf.getvalue(), encoding="ascii")
    else:
        Path(path).write_bytes(f"P5\n{w} {h}\n255\n".encode("ascii") + pix.tobytes())


def read_image(path: str | Path) -> np.ndarray:
    """PGM always; PNG and other raster formats when Pillow is installed."""
    p = Path(path)
    if p.suffix.lower() in (".pgm", ".pnm") or p.read_bytes()[:2] in (b"P2", b"P5"):
        return read_pgm(p)
    try:
        from PIL import Image
    except ImportError as exc:
        raise ValueError(f"{path}: only PGM is supported without Pillow (pip install afd2d[png])") from exc
    with Image.open(p) as im:
        return np.asarray(im.convert("L"), dtype=float)


def write_signal_csv(path: str | Path, f: Signal2D) -> None:
    """Header ``m,n,offset`` and its values, then one ``p,q,re,im`` row per sample."""
    m, n = f.grid.shape
    lines = ["m,n,offset", f"{m},{n},{f.grid.offset:.12e}", "p,q,re,im"]
    for p in range(m):
        for q in range(n):
            v = f.values[p, q]
            lines.append(f"{p},{q},{v.real:.17e},{v.imag:.17e}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_signal_csv(path: str | Path) -> Signal2D:
    lines = [ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]
    if len(lines) < 3 or lines[0] != "m,n,offset" or lines[2] != "p,q,re,im":
        raise ValueError(f"{path}: not a complex-signal CSV")
    m_s, n_s, off_s = lines[1].split(",")
    grid = TorusGrid(int(m_s), int(n_s), float(off_s))
    vals = np.full(grid.shape, np.nan, complex)
    for ln in lines[3:]:
        p, q, re, im = ln.split(",")
        vals[int(p), int(q)] = complex(float(re), float(im))
    if np.isnan(vals.real).any():
        raise ValueError(f"{path}: missing samples")
    return Signal2D(grid, vals)


def synthetic_image(size: int = 64) -> np.ndarray:
    """Deterministic smooth 8-bit-range test image (gradient, blobs, soft disc)."""
    y, x = np.mgrid[0:size, 0:size] / (size - 1.0)
    img = 60.0 + 70.0 * x + 30.0 * y
    img += 80.0 * np.exp(-((x - 0.3) ** 2 + (y - 0.35) ** 2) / 0.015)
    img -= 50.0 * np.exp(-((x - 0.7) ** 2 + (y - 0.65) ** 2) / 0.03)
    r = np.hypot(x - 0.65, y - 0.3)
    img += 40.0 / (1.0 + np.exp((r - 0.15) / 0.02))
    return np.clip(np.rint(img), 0, 255)
