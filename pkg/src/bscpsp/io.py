"""File formats: 16-bit PGM frame dumps and CSV tables."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .retrieval import TWO_PI, WrappedPhaseMap

PGM_MAXVAL = 65535


def to_pgm_samples(image: np.ndarray) -> np.ndarray:
    """Map [0, 1] to [0, 65535] with round-half-up; out-of-range values clamp."""
    image = np.asarray(image, dtype=float)
    if image.ndim != 2:
        raise ValueError("PGM images must be two-dimensional")
    scaled = np.floor(np.nan_to_num(image, nan=0.0) * PGM_MAXVAL + 0.5)
    return np.clip(scaled, 0, PGM_MAXVAL).astype(">u2")


def write_pgm(path: str | Path, image: np.ndarray) -> Path:
    """Binary P5 PGM, maxval 65535, big-endian samples."""
    samples = to_pgm_samples(image)
    h, w = samples.shape
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n{PGM_MAXVAL}\n".encode("ascii"))
        fh.write(samples.tobytes())
    return path


def read_pgm(path: str | Path) -> np.ndarray:
    """Read a 16-bit P5 PGM back to raw integer samples."""
    data = Path(path).read_bytes()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while not data[end : end + 1].isspace():
            end += 1
        tokens.append(data[pos:end].decode("ascii"))
        pos = end
    if tokens[0] != "P5":
        raise ValueError(f"not a binary PGM: magic {tokens[0]!r}")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if maxval != PGM_MAXVAL:
        raise ValueError(f"expected maxval {PGM_MAXVAL}, got {maxval}")
    pos += 1  # single whitespace byte before the raster
    return np.frombuffer(data[pos : pos + 2 * w * h], dtype=">u2").reshape(h, w).astype(np.uint16)


def write_phase_pgm(path: str | Path, pm: WrappedPhaseMap) -> Path:
    """Phase scaled by 1/(2*pi); invalid pixels are written as 0."""
    return write_pgm(path, np.where(pm.valid, pm.phase / TWO_PI, 0.0))


def write_phase_csv(path: str | Path, pm: WrappedPhaseMap) -> Path:
    h, w = pm.shape
    yy, xx = np.mgrid[0:h, 0:w]
    rows = zip(xx.ravel(), yy.ravel(), pm.phase.ravel(), pm.valid.ravel())
    return write_csv(
        path,
        ("x", "y", "phase_rad", "valid"),
        ((x, y, p if v else float("nan"), int(v)) for x, y, p, v in rows),
    )


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """CSV with ``repr`` floats so values round-trip exactly."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


def read_csv(path: str | Path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
