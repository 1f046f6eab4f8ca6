"""Temporal phase unwrapping on BSC-compensated, interleaved fringe streams.

Three unwrappers are provided: two-frequency hierarchical, three-wavelength
heterodyne cascade and two-frequency number-theoretic (coprime periods). The
deployment study interleaves the frequencies slot by slot, applies P-BSC or
I-BSC to each frequency's own frames and reports the fraction of pixels with
the correct fringe order.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .bsc import compensate
from .retrieval import TWO_PI, WrappedPhaseMap, wrap_phase

UNWRAP_METHODS = ("number_theory", "heterodyne", "hierarchical")


@dataclass(frozen=True)
class ProjectionSchedule:
    """Projected pattern per capture slot as ``(frequency index, step index)``."""

    frequencies: tuple
    N: int
    order: tuple

    def slots(self, j: int) -> list[int]:
        """Capture slots that carry frequency ``j``, in time order."""
        return [s for s, (f, _) in enumerate(self.order) if f == j]

    def __len__(self) -> int:
        return len(self.order)


@dataclass
class AbsolutePhaseMap:
    """Unwrapped phase ``wrapped + 2*pi*orders``; invalid pixels hold NaN."""

    phase: np.ndarray
    orders: np.ndarray
    valid: np.ndarray
    wrapped: np.ndarray

    def __post_init__(self):
        self.orders = np.asarray(self.orders, dtype=np.int64)
        self.valid = np.asarray(self.valid, dtype=bool)
        v = self.valid
        gap = np.abs(self.phase[v] - (self.wrapped[v] + TWO_PI * self.orders[v]))
        if gap.size and gap.max() > 1e-9:
            raise ArithmeticError(f"absolute phase disagrees with its orders by {gap.max():.3g} rad")


def _phase_and_mask(p) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(p, WrappedPhaseMap):
        return p.phase, p.valid
    p = np.asarray(p, dtype=float)
    return p, np.isfinite(p)


def _absolute(wrapped: np.ndarray, orders: np.ndarray, valid: np.ndarray) -> AbsolutePhaseMap:
    orders = np.where(valid, orders, 0).astype(np.int64)
    return AbsolutePhaseMap(np.where(valid, wrapped + TWO_PI * orders, np.nan), orders, valid, wrapped)


def interleave_schedule(frequencies: Sequence, N: int, cycles: int) -> ProjectionSchedule:
    """Round-robin over frequencies at each step index: slot ``s`` shows
    frequency ``s mod F`` at step ``(s // F) mod N``."""
    F = len(frequencies)
    if F == 0:
        raise ValueError("at least one frequency is required")
    if F > 3:
        raise ValueError(f"at most three frequencies are supported, got {F}")
    order = tuple((s % F, (s // F) % N) for s in range(F * N * cycles))
    return ProjectionSchedule(tuple(frequencies), N, order)


def unwrap_hierarchical(phi_high, phi_unit, f_high: float, f_unit: float = 1.0) -> AbsolutePhaseMap:
    """Order ``round((f_high/f_unit * phi_unit - phi_high) / 2pi)``."""
    ph, vh = _phase_and_mask(phi_high)
    pu, vu = _phase_and_mask(phi_unit)
    valid = vh & vu
    orders = np.rint(np.where(valid, (f_high / f_unit * pu - ph) / TWO_PI, 0.0))
    return _absolute(ph, orders, valid)


def beat_wavelength(l1: float, l2: float) -> float:
    if l1 == l2:
        raise ValueError("beat of equal wavelengths is undefined")
    return l1 * l2 / abs(l2 - l1)


def unwrap_heterodyne3(phi1, phi2, phi3, wavelengths: Sequence[float] = (22.0, 24.0, 26.0), field_of_view: float | None = None) -> AbsolutePhaseMap:
    """Three-wavelength heterodyne cascade, returning the finest phase unwrapped.

    Wavelengths must be strictly increasing. Beats ``12`` and ``23`` are formed
    by wrapped subtraction and beat ``123`` from those two; it must be at least
    as long as ``field_of_view`` (pixels) so that it is already absolute.
    """
    l1, l2, l3 = wavelengths
    if not l1 < l2 < l3:
        raise ValueError(f"wavelengths must be strictly increasing, got {wavelengths}")
    l12 = beat_wavelength(l1, l2)
    l23 = beat_wavelength(l2, l3)
    l123 = beat_wavelength(l12, l23)
    if field_of_view is not None and l123 < field_of_view:
        raise ValueError(f"beat wavelength {l123:.1f} px is shorter than the field of view {field_of_view}")
    p1, v1 = _phase_and_mask(phi1)
    p2, v2 = _phase_and_mask(phi2)
    p3, v3 = _phase_and_mask(phi3)
    valid = v1 & v2 & v3
    p12 = wrap_phase(p1 - p2)
    p23 = wrap_phase(p2 - p3)
    p123 = wrap_phase(p12 - p23)
    k12 = np.rint(np.where(valid, (l123 / l12 * p123 - p12) / TWO_PI, 0.0))
    abs12 = p12 + TWO_PI * k12
    k1 = np.rint(np.where(valid, (l12 / l1 * abs12 - p1) / TWO_PI, 0.0))
    return _absolute(p1, k1, valid)


def _nt_table(f1: int, f2: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    k1, k2 = np.meshgrid(np.arange(f1), np.arange(f2), indexing="ij")
    key = (f1 * k2 - f2 * k1).ravel()
    idx = np.argsort(key)
    return key[idx].astype(float), k1.ravel()[idx], k2.ravel()[idx]


def number_theory_orders(p1: np.ndarray, p2: np.ndarray, f1: int, f2: int) -> tuple[np.ndarray, np.ndarray]:
    """Order pair minimising ``|(p1 + 2pi k1)/f1 - (p2 + 2pi k2)/f2|``.

    The residual equals ``2pi |r - (f1 k2 - f2 k1)| / (f1 f2)`` with
    ``r = (f2 p1 - f1 p2) / 2pi``, so the search is a nearest-key lookup in a
    sorted table of the ``f1*f2`` distinct keys.
    """
    keys, t1, t2 = _nt_table(f1, f2)
    r = (f2 * p1 - f1 * p2) / TWO_PI
    pos = np.clip(np.searchsorted(keys, r), 1, len(keys) - 1)
    left = keys[pos - 1]
    right = keys[pos]
    # ties go to the lower key
    pick = np.where(np.abs(r - left) <= np.abs(right - r), pos - 1, pos)
    return t1[pick], t2[pick]


def number_theory_orders_bruteforce(p1: float, p2: float, f1: int, f2: int) -> tuple[int, int]:
    best = None
    for k1 in range(f1):
        for k2 in range(f2):
            res = abs((p1 + TWO_PI * k1) / f1 - (p2 + TWO_PI * k2) / f2)
            if best is None or res < best[0] - 1e-15:
                best = (res, k1, k2)
    return best[1], best[2]


def unwrap_number_theory(phi1, phi2, f1: int, f2: int) -> AbsolutePhaseMap:
    """Number-theoretic unwrapping; returns the second (``f2``) phase unwrapped."""
    if int(f1) != f1 or int(f2) != f2 or f1 < 1 or f2 < 1:
        raise ValueError("frequencies must be positive integers")
    if gcd(int(f1), int(f2)) != 1:
        raise ValueError(f"frequencies {f1} and {f2} are not coprime")
    p1, v1 = _phase_and_mask(phi1)
    p2, v2 = _phase_and_mask(phi2)
    valid = v1 & v2
    _, k2 = number_theory_orders(np.where(valid, p1, 0.0), np.where(valid, p2, 0.0), int(f1), int(f2))
    return _absolute(p2, k2, valid)


def true_orders(wrapped, absolute_truth: np.ndarray) -> np.ndarray:
    """Fringe orders that lift ``wrapped`` closest to the true absolute phase."""
    p, _ = _phase_and_mask(wrapped)
    return np.rint(np.where(np.isfinite(p), (absolute_truth - p) / TWO_PI, 0.0)).astype(np.int64)


def success_rate(result: AbsolutePhaseMap, truth_orders: np.ndarray) -> float:
    truth_orders = np.asarray(truth_orders)
    if truth_orders.shape != result.orders.shape:
        raise ValueError(f"shape mismatch: {result.orders.shape} vs {truth_orders.shape}")
    mask = result.valid
    if not np.any(mask):
        raise ValueError("no valid pixels")
    return float(np.mean(result.orders[mask] == truth_orders[mask]))


# -- deployment study -------------------------------------------------------


@dataclass(frozen=True)
class DeploymentScene:
    """1-D ramp scene for the unwrapping study.

    Pixel ``c`` sits at normalised position ``u = (c + 0.5 + pad)/(W + 2 pad)``
    so that no phase touches a wrap boundary at the image edges. Frequencies
    are periods per unit ``u``; heterodyne wavelengths are in pixels.
    """

    width: int = 480
    height: int = 4
    pad: float = 8.0
    A: float = 0.5
    B: float = 0.4
    hierarchical: tuple = (1, 20)
    heterodyne: tuple = (22.0, 24.0, 26.0)
    number_theory: tuple = (7, 8)

    def position(self) -> np.ndarray:
        cols = np.arange(self.width, dtype=float) + 0.5
        return np.broadcast_to(cols, (self.height, self.width))

    def absolute_phases(self, method: str) -> list[np.ndarray]:
        c = self.position()
        u = (c + self.pad) / (self.width + 2 * self.pad)
        if method == "hierarchical":
            return [TWO_PI * f * u for f in self.hierarchical]
        if method == "heterodyne":
            return [TWO_PI * (c + self.pad) / lam for lam in self.heterodyne]
        if method == "number_theory":
            return [TWO_PI * f * u for f in self.number_theory]
        raise ValueError(f"unknown unwrapping method {method!r}")


def _unwrap(method: str, phases: list, scene: DeploymentScene) -> tuple[AbsolutePhaseMap, int]:
    """Unwrap and return the result plus the index of the phase it refers to."""
    if method == "hierarchical":
        f_unit, f_high = scene.hierarchical
        return unwrap_hierarchical(phases[1], phases[0], f_high, f_unit), 1
    if method == "heterodyne":
        fov = scene.width + 2 * scene.pad
        return unwrap_heterodyne3(*phases, wavelengths=scene.heterodyne, field_of_view=fov), 0
    f1, f2 = scene.number_theory
    return unwrap_number_theory(phases[0], phases[1], f1, f2), 1


def deployment_trial(
    method: str,
    bsc: str,
    K: int,
    v0: float = 0.15,
    a: float = 0.005,
    scene: DeploymentScene | None = None,
) -> float:
    """Success rate of one (method, BSC variant, K) cell.

    Frequencies are interleaved slot by slot; the motion offset of slot ``s``
    is ``v0*(s-d) + a*(s-d)**2/2`` with datum ``d`` at the centre of the
    capture window, applied equally to every frequency. Each frequency's
    ``K+4`` frames are compensated with ``bsc`` (``pbsc`` = 4-step P-BSC, or
    ``ibsc``). K = 0 is the raw 4-step method for both variants.
    """
    scene = scene or DeploymentScene()
    truth = scene.absolute_phases(method)
    F = len(truth)
    n = K + 4
    schedule = interleave_schedule(truth, 4, (n + 3) // 4)
    d = (F * n - 1) / 2.0
    phases = []
    for j, Phi in enumerate(truth):
        slots = schedule.slots(j)[:n]
        frames = []
        for i, s in enumerate(slots):
            x = v0 * (s - d) + 0.5 * a * (s - d) ** 2
            step = schedule.order[s][1]
            assert step == i % 4
            frames.append(scene.A + scene.B * np.cos(Phi - np.pi / 2 * step + x))
        phases.append(compensate(frames, "ibsc" if bsc == "ibsc" else "pbsc4", K))
    result, ref = _unwrap(method, phases, scene)
    return success_rate(result, true_orders(phases[ref], truth[ref]))


def deployment_study(
    method: str,
    bsc: str,
    K_range: Iterable[int] = range(5),
    v0: float = 0.15,
    a: float = 0.005,
    scene: DeploymentScene | None = None,
) -> list[tuple[str, str, int, float]]:
    """Rows ``(method, bsc, K, success_rate)``."""
    if method not in UNWRAP_METHODS:
        raise ValueError(f"unknown unwrapping method {method!r}")
    if bsc not in ("pbsc", "ibsc"):
        raise ValueError(f"bsc must be 'pbsc' or 'ibsc', got {bsc!r}")
    return [(method, bsc, K, deployment_trial(method, bsc, K, v0, a, scene)) for K in K_range]
