"""Binomial self-compensation of motion error.

Two routes to the same ripple suppression:

* :func:`pbsc` retrieves K+1 successive phase frames, rebases them to the
  window datum and averages them pairwise in a pyramid with :func:`oplus`,
  which realises the K-th binomial weights.
* :func:`ibsc` sums homogeneous fringe images (same step modulo 4) with
  binomial weights and takes a single arctangent.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import comb
from typing import Iterable, Iterator, Sequence

import numpy as np

from .retrieval import (
    WrappedPhaseMap,
    quadrature_phase,
    rebase,
    wrap_phase,
    wrapped_phase_3step,
    wrapped_phase_4step,
)

MAX_ORDER = 60
METHODS = ("pbsc3", "pbsc4", "ibsc")


@dataclass(frozen=True)
class BinomialWeights:
    order: int
    weights: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.weights)

    def next(self) -> "BinomialWeights":
        """Next Pascal row by pairwise addition."""
        w = (0,) + self.weights + (0,)
        return BinomialWeights(self.order + 1, tuple(a + b for a, b in zip(w[:-1], w[1:])))


@dataclass
class CompensatedImages:
    """Binomial-weighted sums of homogeneous frames, one per step group ``m``."""

    images: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]
    K: int

    def __getitem__(self, m: int) -> np.ndarray:
        return self.images[m]


def binomial_row(K: int) -> BinomialWeights:
    if K < 0:
        raise ValueError(f"binomial order must be >= 0, got {K}")
    if K > MAX_ORDER:
        raise ValueError(f"binomial order {K} exceeds supported maximum {MAX_ORDER}")
    return BinomialWeights(K, tuple(comb(K, k) for k in range(K + 1)))


def oplus(a, b):
    """Circular midpoint of two wrapped phases on the shorter arc.

    Plain average when ``|a - b| <= pi``, otherwise the average moved by a
    half turn. Inputs and output lie in [0, 2*pi).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    mid = 0.5 * (a + b)
    return wrap_phase(np.where(np.abs(a - b) > np.pi, mid + np.pi, mid))


def _as_frames(frames) -> list[np.ndarray]:
    return [np.asarray(f, dtype=float) for f in frames]


def pbsc_phase_frames(frames, N: int, K: int) -> list[WrappedPhaseMap]:
    """Raw phase frames 0..K, each rebased to the window datum."""
    if N not in (3, 4):
        raise ValueError(f"P-BSC supports N=3 or N=4, got {N}")
    if K < 0:
        raise ValueError("K must be >= 0")
    frames = _as_frames(frames)
    if len(frames) < K + N:
        raise ValueError(f"P-BSC with N={N}, K={K} needs {K + N} frames, got {len(frames)}")
    retrieve = wrapped_phase_3step if N == 3 else wrapped_phase_4step
    return [rebase(retrieve(*frames[t : t + N], t=t), t) for t in range(K + 1)]


def pbsc(frames, N: int, K: int) -> WrappedPhaseMap:
    """Phase-sequential compensation of order ``K`` for 3- or 4-step pi/2 fringes."""
    layer = pbsc_phase_frames(frames, N, K)
    valid = np.logical_and.reduce([p.valid for p in layer])
    phases = [p.phase for p in layer]
    for _ in range(K):
        phases = [oplus(phases[i], phases[i + 1]) for i in range(len(phases) - 1)]
    return WrappedPhaseMap(np.where(valid, phases[0], np.nan), valid, 0)


def ibsc_index(m: int, k: int) -> int:
    """Frame index of the ``k``-th homogeneous image of step group ``m``."""
    if m not in (0, 1, 2, 3):
        raise ValueError(f"step group m must be in 0..3, got {m}")
    if k < 0:
        raise ValueError("k must be >= 0")
    return (k + 3) - ((k + 3 - m) % 4)


def ibsc_compensated_images(frames, K: int, exact: bool = False) -> CompensatedImages:
    """Binomial sums of homogeneous frames.

    ``exact=True`` accumulates in extended precision so that identical
    inputs give exactly ``2**K * I``; it is several times slower than the
    default float64 path, whose error is a few ulp.
    """
    weights = binomial_row(K).weights
    frames = _as_frames(frames)
    if len(frames) < K + 4:
        raise ValueError(f"I-BSC with K={K} needs {K + 4} frames, got {len(frames)}")
    dtype = np.longdouble if exact else float
    images = []
    for m in range(4):
        acc = frames[ibsc_index(m, 0)].astype(dtype)
        for k in range(1, K + 1):
            acc += dtype(weights[k]) * frames[ibsc_index(m, k)]
        images.append(acc.astype(float))
    return CompensatedImages(tuple(images), K)


def ibsc_phase(comp: CompensatedImages) -> WrappedPhaseMap:
    # the 2**K weight sum cancels in the quotient, so no normalisation
    return quadrature_phase(comp[1] - comp[3], comp[0] - comp[2], 0)


def ibsc(frames, K: int) -> WrappedPhaseMap:
    """Image-sequential compensation: one arctangent per pixel."""
    return ibsc_phase(ibsc_compensated_images(frames, K))


def ibsc_modulation(comp: CompensatedImages) -> np.ndarray:
    """Ripple-free modulation ``2**-(K+1) * |quadrature|``."""
    return np.ldexp(np.hypot(comp[1] - comp[3], comp[0] - comp[2]), -(comp.K + 1))


def window_length(method: str, K: int) -> int:
    if method == "pbsc3":
        return K + 3
    if method in ("pbsc4", "ibsc"):
        return K + 4
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def compensate(frames, method: str, K: int) -> WrappedPhaseMap:
    """Dispatch by method name (``pbsc3``, ``pbsc4`` or ``ibsc``)."""
    if method == "pbsc3":
        return pbsc(frames, 3, K)
    if method == "pbsc4":
        return pbsc(frames, 4, K)
    if method == "ibsc":
        return ibsc(frames, K)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def sliding_stream(
    source: Iterable[np.ndarray], method: str, K: int, datum_rebase: bool = True
) -> Iterator[WrappedPhaseMap]:
    """Emit one compensated phase map per incoming frame once the window fills.

    The window for the map tagged ``t`` is frames ``t .. t+L-1`` (``L`` from
    :func:`window_length`). With ``datum_rebase`` the map is shifted by
    ``t*pi/2`` so that every output refers to the stream's first frame.
    """
    L = window_length(method, K)
    window: deque = deque(maxlen=L)
    for n, frame in enumerate(source):
        window.append(np.asarray(frame, dtype=float))
        if len(window) < L:
            continue
        t = n - L + 1
        out = compensate(list(window), method, K)
        out.t = t
        yield rebase(out, t) if datum_rebase else out


def batch_windows(frames: Sequence[np.ndarray], method: str, K: int, datum_rebase: bool = True) -> list[WrappedPhaseMap]:
    """Reference non-streaming counterpart of :func:`sliding_stream`."""
    frames = _as_frames(frames)
    L = window_length(method, K)
    out = []
    for t in range(len(frames) - L + 1):
        pm = compensate(frames[t : t + L], method, K)
        pm.t = t
        out.append(rebase(pm, t) if datum_rebase else pm)
    return out
