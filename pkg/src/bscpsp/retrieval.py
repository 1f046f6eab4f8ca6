"""Wrapped-phase retrieval and wrap-aware phase arithmetic."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

TWO_PI = 2.0 * np.pi
# both quadrature components below this -> no usable modulation
QUADRATURE_EPS = 1e-12


@dataclass
class WrappedPhaseMap:
    """Per-pixel wrapped phase in [0, 2*pi); invalid pixels hold NaN.

    ``t`` is the frame the phase refers to.
    """

    phase: np.ndarray
    valid: np.ndarray
    t: int = 0

    def __post_init__(self):
        self.phase = np.asarray(self.phase, dtype=float)
        self.valid = np.asarray(self.valid, dtype=bool)
        if self.phase.shape != self.valid.shape:
            raise ValueError("phase and mask shapes differ")

    @property
    def shape(self):
        return self.phase.shape


def wrap_phase(phase):
    """Reduce to [0, 2*pi), guarding the float edge where mod returns 2*pi."""
    out = np.mod(phase, TWO_PI)
    return np.where(out >= TWO_PI, 0.0, out)


def phase_diff_wrapped(a, b):
    """Signed circular difference ``a - b`` in (-pi, pi]."""
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    return np.pi - np.mod(np.pi - d, TWO_PI)


def quadrature_phase(num, den, t: int = 0) -> WrappedPhaseMap:
    """Full-quadrant phase of ``atan(num/den)`` with zero-modulation masking."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    valid = (np.abs(num) >= QUADRATURE_EPS) | (np.abs(den) >= QUADRATURE_EPS)
    valid &= np.isfinite(num) & np.isfinite(den)
    phase = np.where(valid, wrap_phase(np.arctan2(num, den)), np.nan)
    return WrappedPhaseMap(phase, valid, t)


def wrapped_phase_nstep(window: Sequence[np.ndarray], N: int | None = None, t: int = 0) -> WrappedPhaseMap:
    """Standard N-step retrieval over ``N`` consecutive frames shifted by 2*pi/N."""
    N = len(window) if N is None else N
    if N < 3:
        raise ValueError(f"N-step retrieval needs N >= 3, got {N}")
    if len(window) != N:
        raise ValueError(f"window holds {len(window)} frames, expected {N}")
    delta = TWO_PI * np.arange(N) / N
    num = sum(np.sin(d) * np.asarray(I, dtype=float) for d, I in zip(delta, window))
    den = sum(np.cos(d) * np.asarray(I, dtype=float) for d, I in zip(delta, window))
    return quadrature_phase(num, den, t)


def wrapped_phase_3step(I0, I1, I2, t: int = 0) -> WrappedPhaseMap:
    """Three-step retrieval for pi/2 shifts (not the usual 2*pi/3)."""
    I0, I1, I2 = (np.asarray(I, dtype=float) for I in (I0, I1, I2))
    return quadrature_phase(2.0 * I1 - I0 - I2, I0 - I2, t)


def wrapped_phase_4step(I0, I1, I2, I3, t: int = 0) -> WrappedPhaseMap:
    I0, I1, I2, I3 = (np.asarray(I, dtype=float) for I in (I0, I1, I2, I3))
    return quadrature_phase(I1 - I3, I0 - I2, t)


def rebase(phase: WrappedPhaseMap, t: int) -> WrappedPhaseMap:
    """Undo the cyclic pi/2 shift of frame ``t``: ``(phi + t*pi/2) mod 2*pi``."""
    out = wrap_phase(phase.phase + t * np.pi / 2)
    return WrappedPhaseMap(np.where(phase.valid, out, np.nan), phase.valid.copy(), phase.t - t)
