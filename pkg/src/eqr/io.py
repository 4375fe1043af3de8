"""CSV and PGM writers.  Output is byte-stable for identical inputs."""

from __future__ import annotations

from pathlib import Path

import numpy as np

FLOAT_FMT = "%.12e"


def write_csv(path, header, table, fmt=FLOAT_FMT) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table = np.atleast_2d(np.asarray(table, dtype=float))
    if table.size == 0:
        table = table.reshape(0, len(header))
    np.savetxt(path, table, fmt=fmt, delimiter=",", header=",".join(header), comments="")
    return path


def read_csv(path) -> tuple[list[str], np.ndarray]:
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


def write_pgm(path, values, clip: float) -> Path:
    """Plain (P2) greyscale image, one pixel per cell, 0 = low value.

    Values are clipped to ``[0, clip]`` and scaled to 0..255; non-finite
    cells map to 255.
    """
    if not clip > 0.0:
        raise ValueError("clip must be positive")
    values = np.asarray(values, dtype=float)
    scaled = np.where(np.isfinite(values), np.clip(values, 0.0, clip) / clip, 1.0)
    pixels = np.rint(255.0 * scaled).astype(int)
    rows, cols = pixels.shape
    lines = ["P2", f"{cols} {rows}", "255"]
    lines += [" ".join(str(v) for v in row) for row in pixels]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_pgm(path) -> np.ndarray:
    tokens = Path(path).read_text().split()
    if tokens[0] != "P2":
        raise ValueError("not a plain PGM file")
    cols, rows, _ = int(tokens[1]), int(tokens[2]), int(tokens[3])
    return np.array(tokens[4:], dtype=int).reshape(rows, cols)
