"""Monte-Carlo propagation of intensity noise into wrapped phase.

Each trial renders one static pixel, adds Gaussian intensity noise with
variance ``dark_variance + gain*(I - dark_signal)`` to every frame and
retrieves its phase. Trials are spread evenly over ``phases`` reference
phases spanning one period, because the phase variance depends on the
phase value at second order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .bsc import compensate
from .retrieval import TWO_PI, phase_diff_wrapped, wrapped_phase_nstep

MIN_TRIALS = 10**5


@dataclass(frozen=True)
class NoiseStudyConfig:
    """Sensor and sampling setup for a noise study.

    ``A == B`` by default so that the full PSP variance law reduces exactly
    to ``2G/(N*B)``.
    """

    gain: float = 0.02
    A: float = 0.4
    B: float = 0.4
    dark_signal: float = 0.0
    dark_variance: float = 0.0
    trials: int = 10**6
    seed: int = 0
    phases: int = 8
    phase0: float = np.pi / 4
    chunk: int = 1 << 17
    workers: int = 1

    def __post_init__(self):
        if self.trials < MIN_TRIALS:
            raise ValueError(f"trials must be >= {MIN_TRIALS} for 5% variance estimates, got {self.trials}")
        if self.gain < 0 or self.dark_variance < 0:
            raise ValueError("gain and dark variance must be non-negative")
        if not self.B > 0:
            raise ValueError("modulation B must be positive")
        if self.phases < 1 or self.chunk < 1 or self.workers < 1:
            raise ValueError("phases, chunk and workers must be positive")
        if self.A - self.B - self.dark_signal < 0 and self.gain > 0:
            raise ValueError("dark signal exceeds the darkest intensity; noise variance would be negative")

    @property
    def noiseless(self) -> bool:
        return self.gain == 0 and self.dark_variance == 0

    def reference_phases(self) -> np.ndarray:
        return self.phase0 + TWO_PI * np.arange(self.phases) / self.phases


@dataclass(frozen=True)
class NoiseEstimate:
    N: int
    method: str
    sigma2: float
    sigma2_predicted: float
    skewness: float
    trials: int

    @property
    def sigma(self) -> float:
        return float(np.sqrt(self.sigma2))


def psp_variance_prediction(N: int, cfg: NoiseStudyConfig) -> float:
    """``2 (dark_var + G (A - I_dark)) / (N B**2)``; equals ``2G/(N B)`` when A = B."""
    return 2.0 * (cfg.dark_variance + cfg.gain * (cfg.A - cfg.dark_signal)) / (N * cfg.B**2)


def bsc_variance_prediction(K: int, cfg: NoiseStudyConfig) -> float:
    """Empirical BSC law ``G / (sqrt(N) B)`` with ``N = K + 4`` patterns."""
    return cfg.gain / (np.sqrt(K + 4) * cfg.B)


def _tasks(cfg: NoiseStudyConfig) -> list[tuple[int, int, int, float]]:
    """``(phase index, chunk index, size, phi)`` covering all trials."""
    base, extra = divmod(cfg.trials, cfg.phases)
    tasks = []
    for p, phi in enumerate(cfg.reference_phases()):
        n = base + (1 if p < extra else 0)
        for c, start in enumerate(range(0, n, cfg.chunk)):
            tasks.append((p, c, min(cfg.chunk, n - start), float(phi)))
    return tasks


def _moments(estimator, shifts: np.ndarray, cfg: NoiseStudyConfig, stream: int) -> tuple[int, float, float, float]:
    """Sum of e, e^2, e^3 of the phase error over all trials."""

    def run(task):
        p, c, size, phi = task
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(stream, p, c)))
        clean = cfg.A + cfg.B * np.cos(phi - shifts)
        std = np.sqrt(np.clip(cfg.dark_variance + cfg.gain * (clean - cfg.dark_signal), 0.0, None))
        frames = clean[:, None] + std[:, None] * rng.standard_normal((len(shifts), size))
        e = phase_diff_wrapped(estimator(list(frames)), phi)
        return np.array([e.sum(), (e * e).sum(), (e**3).sum()])

    tasks = _tasks(cfg)
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(run, tasks))
    else:
        parts = [run(t) for t in tasks]
    s1, s2, s3 = np.sum(parts, axis=0)
    return cfg.trials, float(s1), float(s2), float(s3)


def _variance_and_skew(n: int, s1: float, s2: float, s3: float) -> tuple[float, float]:
    m = s1 / n
    var = s2 / n - m * m
    if var <= 0:
        return 0.0, 0.0
    third = s3 / n - 3 * m * s2 / n + 2 * m**3
    return var, third / var**1.5


def phase_noise_psp(N: int, cfg: NoiseStudyConfig) -> NoiseEstimate:
    """Wrapped-phase variance of standard N-step retrieval (shifts ``2*pi/N``)."""
    if N < 3:
        raise ValueError(f"N must be >= 3, got {N}")
    pred = psp_variance_prediction(N, cfg)
    if cfg.noiseless:
        return NoiseEstimate(N, "psp", 0.0, pred, 0.0, cfg.trials)
    shifts = TWO_PI * np.arange(N) / N
    moments = _moments(lambda fr: wrapped_phase_nstep(fr, N).phase, shifts, cfg, stream=N)
    var, skew = _variance_and_skew(*moments)
    return NoiseEstimate(N, "psp", var, pred, skew, cfg.trials)


def phase_noise_bsc(method: str, K: int, cfg: NoiseStudyConfig) -> NoiseEstimate:
    """Wrapped-phase variance after ``pbsc`` (4-step) or ``ibsc`` of order K on a static scene.

    Both methods see the same noise draws for a given K.
    """
    if method not in ("pbsc", "ibsc"):
        raise ValueError(f"method must be 'pbsc' or 'ibsc', got {method!r}")
    if K < 0:
        raise ValueError("K must be >= 0")
    N = K + 4
    pred = bsc_variance_prediction(K, cfg)
    if cfg.noiseless:
        return NoiseEstimate(N, method, 0.0, pred, 0.0, cfg.trials)
    shifts = np.pi / 2 * np.arange(N)
    name = "pbsc4" if method == "pbsc" else "ibsc"
    moments = _moments(lambda fr: compensate(fr, name, K).phase, shifts, cfg, stream=1000 + K)
    var, skew = _variance_and_skew(*moments)
    return NoiseEstimate(N, method, var, pred, skew, cfg.trials)


def fit_noise_law(samples: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Least-squares power law ``sigma2 = c * N**p`` in log-log space; returns ``(c, p)``."""
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or len(arr) < 4:
        raise ValueError("need at least 4 (N, sigma2) samples")
    if np.any(arr <= 0):
        raise ValueError("power-law fit needs positive N and variance")
    p, logc = np.polyfit(np.log(arr[:, 0]), np.log(arr[:, 1]), 1)
    return float(np.exp(logc)), float(p)


def noise_study(cfg: NoiseStudyConfig, N_values: Iterable[int] = (4, 8, 12, 16, 20)) -> list[NoiseEstimate]:
    """PSP, P-BSC and I-BSC estimates at each pattern count (``K = N - 4`` for BSC)."""
    rows = []
    for N in N_values:
        rows.append(phase_noise_psp(N, cfg))
        rows.append(phase_noise_bsc("pbsc", N - 4, cfg))
        rows.append(phase_noise_bsc("ibsc", N - 4, cfg))
    return rows
