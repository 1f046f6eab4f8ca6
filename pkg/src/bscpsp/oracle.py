"""Closed-form motion-error predictions and simulated RMSE curves.

All ripple predictions are first order in the motion offsets and are written
as functions of the datum (window-start) phase ``phi``:

    error(phi) = dc + cos_coeff*cos(2*phi) + sin_coeff*sin(2*phi)

Small-angle validity: keep ``max|x| <= 0.1`` rad and keep the DC lag small
(centre the trajectory on the window) for percent-level agreement.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .bsc import compensate, ibsc_index, window_length
from .imaging import TWO_PI, CaptureConfig, FringeParams, MotionTrajectory, ScenePhase, simulate_capture
from .retrieval import phase_diff_wrapped

SMALL_ANGLE_LIMIT = 0.1


@dataclass(frozen=True)
class ErrorPrediction:
    """Predicted error: DC lag plus a ripple at twice the wrapped-phase frequency.

    ``dc`` is ``None`` where no closed form is available.
    """

    method: str
    K: int
    cos_coeff: float
    sin_coeff: float = 0.0
    dc: float | None = None

    @property
    def amplitude(self) -> float:
        return float(np.hypot(self.cos_coeff, self.sin_coeff))

    def ripple(self, phi):
        phi = np.asarray(phi, dtype=float)
        return self.cos_coeff * np.cos(2 * phi) + self.sin_coeff * np.sin(2 * phi)

    def error(self, phi):
        return (self.dc or 0.0) + self.ripple(phi)


def _check_span(x: np.ndarray, last: int):
    if last >= len(x):
        raise IndexError(f"needs motion offsets up to index {last}, have {len(x)}")


def diff_k_recursive(x: Sequence[float], K: int, i: int) -> float:
    """K-th forward difference by repeated first differences."""
    x = np.asarray(x, dtype=float)
    if i < 0 or K < 0:
        raise IndexError("negative index or order")
    _check_span(x, i + K)
    seq = x[i : i + K + 1]
    for _ in range(K):
        seq = seq[1:] - seq[:-1]
    return float(seq[0])


def diff_k_closed(x: Sequence[float], K: int, i: int) -> float:
    """K-th forward difference as an alternating binomial sum."""
    x = np.asarray(x, dtype=float)
    if i < 0 or K < 0:
        raise IndexError("negative index or order")
    _check_span(x, i + K)
    return float(sum((-1) ** k * comb(K, k) * x[i + K - k] for k in range(K + 1)))


def diff_k(x: Sequence[float], K: int, i: int) -> float:
    """K-th forward difference of ``x`` at ``i``, cross-checked between both definitions."""
    rec = diff_k_recursive(x, K, i)
    closed = diff_k_closed(x, K, i)
    scale = max(1.0, float(np.max(np.abs(np.asarray(x)[i : i + K + 1]))) * 2**K)
    if abs(rec - closed) > 1e-12 * scale:
        raise ArithmeticError(f"difference definitions disagree: {rec} vs {closed}")
    return rec


def predict_error_nstep(x: Sequence[float], phi, i: int, N: int):
    """First-order N-step error at truth phase ``phi`` of frame ``i``.

    Frame ``i+n`` sits at truth phase ``phi - 2*pi*n/N``.
    """
    x = np.asarray(x, dtype=float)
    _check_span(x, i + N - 1)
    phi = np.asarray(phi, dtype=float)
    total = np.zeros_like(phi)
    for n in range(N):
        total = total + x[i + n] * (1.0 - np.cos(2.0 * (phi - TWO_PI * n / N)))
    return total / N


def predict_error_4step(x: Sequence[float], phi, i: int):
    """Four-step special case where the cos(2*phi) sign alternates with ``n``."""
    x = np.asarray(x, dtype=float)
    _check_span(x, i + 3)
    c = np.cos(2.0 * np.asarray(phi, dtype=float))
    return 0.25 * sum(x[i + n] - (-1) ** n * x[i + n] * c for n in range(4))


def _raw_dc(x: np.ndarray, start: int, width: int) -> float:
    return float(np.mean(x[start : start + width]))


def predict_residual_pbsc4(x: Sequence[float], i: int, K: int) -> ErrorPrediction:
    """4-step P-BSC residual: ``2**-(K+2) (D^{K+1} x_i + D^{K+1} x_{i+2})`` ripple.

    The ``(-1)**K`` factor refers the ripple to the window-start phase.
    """
    x = np.asarray(x, dtype=float)
    _check_span(x, i + K + 3)
    amp = 2.0 ** -(K + 2) * (diff_k(x, K + 1, i) + diff_k(x, K + 1, i + 2))
    dc = 2.0**-K * sum(comb(K, k) * _raw_dc(x, i + k, 4) for k in range(K + 1))
    return ErrorPrediction("pbsc4", K, (-1) ** K * amp, 0.0, dc)


def predict_residual_pbsc3(x: Sequence[float], i: int, K: int) -> ErrorPrediction:
    """3-step (pi/2) P-BSC residual, with both quadrature ripple components.

    cos term ``-(-1)**K 2**-(K+2) D^{K+2} x_i``; sin term
    ``-(-1)**K 2**-(K+2) (D^{K+1} x_i + D^{K+1} x_{i+1})``. The DC lag is left
    to simulation.
    """
    x = np.asarray(x, dtype=float)
    _check_span(x, i + K + 2)
    sign = -((-1) ** K) * 2.0 ** -(K + 2)
    cos_c = sign * diff_k(x, K + 2, i)
    sin_c = sign * (diff_k(x, K + 1, i) + diff_k(x, K + 1, i + 1))
    return ErrorPrediction("pbsc3", K, cos_c, sin_c, None)


def ibsc_ripple_direct(x: Sequence[float], K: int) -> float:
    """I-BSC ripple coefficient summed term by term over the index vectors."""
    x = np.asarray(x, dtype=float)
    _check_span(x, K + 3)
    total = 0.0
    for k in range(K + 1):
        v = [x[ibsc_index(m, k)] for m in range(4)]
        total += comb(K, k) * (-v[0] + v[1] - v[2] + v[3])
    return 2.0 ** -(K + 2) * total


def predict_residual_ibsc(x: Sequence[float], K: int) -> ErrorPrediction:
    """I-BSC residual ``2**-(K+2) (-1)**K (D^{K+1} x_0 + D^{K+1} x_2) cos(2 phi0)``."""
    x = np.asarray(x, dtype=float)
    _check_span(x, K + 3)
    amp = 2.0 ** -(K + 2) * (-1) ** K * (diff_k(x, K + 1, 0) + diff_k(x, K + 1, 2))
    dc = 2.0 ** -(K + 2) * sum(comb(K, k) * sum(x[ibsc_index(m, k)] for m in range(4)) for k in range(K + 1))
    return ErrorPrediction("ibsc", K, amp, 0.0, float(dc))


def predict_residual(method: str, x: Sequence[float], K: int) -> ErrorPrediction:
    if method == "pbsc4":
        return predict_residual_pbsc4(x, 0, K)
    if method == "pbsc3":
        return predict_residual_pbsc3(x, 0, K)
    if method == "ibsc":
        return predict_residual_ibsc(x, K)
    raise ValueError(f"unknown method {method!r}")


def circular_mean(d: np.ndarray) -> float:
    return float(np.angle(np.mean(np.exp(1j * d))))


def ripple_error(estimate: np.ndarray, truth: np.ndarray, valid: np.ndarray | None = None) -> tuple[np.ndarray, float]:
    """Wrapped error with its circular mean (the DC lag) removed.

    Returns ``(ripple, dc)`` over valid pixels.
    """
    err = phase_diff_wrapped(estimate, truth)
    mask = np.isfinite(err) if valid is None else (valid & np.isfinite(err))
    if not np.any(mask):
        raise ValueError("no valid pixels to evaluate")
    e = err[mask]
    dc = circular_mean(e)
    return phase_diff_wrapped(e, dc), dc


def rmse_curve(
    scene: ScenePhase,
    params: FringeParams,
    motion: MotionTrajectory,
    config: CaptureConfig | None,
    method: str,
    K_range: Iterable[int],
) -> list[tuple[int, float, float]]:
    """Simulated ripple RMSE after compensation for each K.

    Frames 0..L-1 are rendered once for the largest K; each order uses the
    leading window. Rows are ``(K, rmse_rad, dc_rad)``; RMSE excludes the DC lag.
    """
    Ks = list(K_range)
    if params.N != 4:
        raise ValueError("compensation assumes pi/2 phase steps (params.N == 4)")
    count = max(window_length(method, max(Ks)), params.N)
    frames = simulate_capture(scene, params, motion, config, count)
    rows = []
    for K in Ks:
        pm = compensate(frames.frames, method, K)
        rip, dc = ripple_error(pm.phase, scene.phi0, pm.valid)
        rows.append((K, float(np.sqrt(np.mean(rip**2))), dc))
    return rows
