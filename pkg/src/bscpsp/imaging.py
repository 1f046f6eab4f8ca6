"""Synthetic fringe capture: scenes, motion trajectories, gamma and sensor noise.

A captured frame follows the usual sinusoidal model

    I_i = A + B cos(phi0 - 2*pi*i/N + x_i)

where ``x_i`` is the unknown phase offset that object motion adds between the
datum frame and frame ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class FringeParams:
    """Fringe pattern and image geometry.

    ``A`` and ``B`` are intensity fractions, ``N`` is the phase-shift period
    in frames, ``wavelength`` is pixels per fringe period along x.
    """

    A: float = 0.5
    B: float = 0.4
    N: int = 4
    wavelength: float = 24.0
    width: int = 480
    height: int = 16

    def __post_init__(self):
        if not (0.0 <= self.A - self.B and self.A + self.B <= 1.0):
            raise ValueError(f"need A-B >= 0 and A+B <= 1, got A={self.A}, B={self.B}")
        if self.B < 0:
            raise ValueError("modulation B must be non-negative")
        if int(self.N) != self.N or self.N < 3:
            raise ValueError(f"step count N must be an integer >= 3, got {self.N}")
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be positive")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    @property
    def frequency(self) -> float:
        """Fringe periods across the image width."""
        return self.width / self.wavelength


@dataclass(frozen=True)
class MotionTrajectory:
    """Per-frame motion phase offsets ``x_i`` in radians.

    Build explicit sequences directly, or use :meth:`kinematic` for uniform
    acceleration, where ``x_i = v0*(i-d) + a*(i-d)**2/2`` about datum ``d``.
    """

    x: np.ndarray
    v0: float | None = None
    a: float | None = None
    datum: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        if self.x.ndim != 1:
            raise ValueError("motion offsets must be one-dimensional")

    @classmethod
    def kinematic(cls, v0: float, a: float, count: int, datum: float = 0.0) -> "MotionTrajectory":
        i = np.arange(count, dtype=float) - datum
        return cls(v0 * i + 0.5 * a * i * i, v0=v0, a=a, datum=datum)

    @classmethod
    def static(cls, count: int) -> "MotionTrajectory":
        return cls(np.zeros(count), v0=0.0, a=0.0)

    def __len__(self) -> int:
        return len(self.x)

    def __getitem__(self, i):
        return self.x[i]


@dataclass(frozen=True)
class CaptureConfig:
    """Sensor transfer: power-law gamma and signal-dependent Gaussian noise.

    Noise variance per pixel is ``dark_variance + gain*(I - dark_signal)``.
    """

    gamma: float = 1.0
    gain: float = 0.0
    dark_signal: float = 0.0
    dark_variance: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.gamma < 1.0:
            raise ValueError(f"gamma must be >= 1, got {self.gamma}")
        if self.gain < 0 or self.dark_variance < 0:
            raise ValueError("gain and dark variance must be non-negative")

    @property
    def noiseless(self) -> bool:
        return self.gain == 0 and self.dark_variance == 0


@dataclass(frozen=True)
class ScenePhase:
    """Ground-truth wrapped phase ``phi0`` of the datum frame, in [0, 2*pi)."""

    phi0: np.ndarray

    def frame_phase(self, i: int, N: int = 4) -> np.ndarray:
        """True wrapped phase of frame ``i``."""
        return np.mod(self.phi0 - TWO_PI * (i % N) / N, TWO_PI)


@dataclass
class ImageSequence:
    """Ordered intensity frames sharing one shape."""

    frames: list = field(default_factory=list)

    def __post_init__(self):
        self.frames = [np.asarray(f, dtype=float) for f in self.frames]
        shapes = {f.shape for f in self.frames}
        if len(shapes) > 1:
            raise ValueError(f"frames differ in shape: {sorted(shapes)}")

    def __len__(self) -> int:
        return len(self.frames)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return ImageSequence(self.frames[i])
        return self.frames[i]

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.frames)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.frames[0].shape if self.frames else ()


def make_ramp_scene(params: FringeParams) -> ScenePhase:
    """Linear phase ramp ``2*pi*x/wavelength`` wrapped to [0, 2*pi)."""
    if not params.wavelength > 0:
        raise ValueError(f"wavelength must be positive, got {params.wavelength}")
    cols = np.arange(params.width, dtype=float)
    row = np.mod(TWO_PI * cols / params.wavelength, TWO_PI)
    return ScenePhase(np.broadcast_to(row, params.shape).copy())


def synthesize_frame(scene: ScenePhase, params: FringeParams, i: int, x_i: float) -> np.ndarray:
    # reduce i first so frames i and i+N are bit-identical
    shift = TWO_PI * (i % params.N) / params.N
    return params.A + params.B * np.cos(scene.phi0 - shift + x_i)


def apply_gamma(frame: np.ndarray, gamma: float) -> np.ndarray:
    """Power-law response on intensities normalised to [0, 1]."""
    frame = np.asarray(frame, dtype=float)
    if np.any(frame < 0):
        raise ValueError("gamma is undefined for negative intensities")
    if gamma == 1.0:
        return frame.copy()
    return frame**gamma


def _row_generators(config: CaptureConfig, rows: int, stream: int) -> list[np.random.Generator]:
    # one generator per row, derived from (seed, stream) so rows can be filled independently
    root = np.random.SeedSequence(config.seed, spawn_key=(stream,))
    return [np.random.default_rng(s) for s in root.spawn(rows)]


def add_noise(frame: np.ndarray, config: CaptureConfig, stream: int = 0) -> np.ndarray:
    """Add zero-mean Gaussian noise with variance ``dark_var + G*(I - I_dark)``.

    ``stream`` selects an independent noise realisation (the frame index in
    :func:`simulate_capture`). Output is deterministic in ``(seed, stream)``.
    """
    frame = np.asarray(frame, dtype=float)
    if config.noiseless:
        return frame.copy()
    var = config.dark_variance + config.gain * (frame - config.dark_signal)
    if np.any(var < -1e-15):
        raise ValueError("noise variance is negative; dark signal exceeds intensity")
    std = np.sqrt(np.clip(var, 0.0, None))
    flat = frame.reshape(-1, frame.shape[-1]) if frame.ndim > 1 else frame.reshape(1, -1)
    std = std.reshape(flat.shape)
    out = np.empty_like(flat)
    for r, rng in enumerate(_row_generators(config, flat.shape[0], stream)):
        out[r] = flat[r] + std[r] * rng.standard_normal(flat.shape[1])
    return out.reshape(frame.shape)


def simulate_capture(
    scene: ScenePhase,
    params: FringeParams,
    motion: MotionTrajectory | Sequence[float],
    config: CaptureConfig | None = None,
    count: int | None = None,
) -> ImageSequence:
    """Render ``count`` cyclic phase-shifted frames under motion, gamma and noise."""
    config = config or CaptureConfig()
    x = motion.x if isinstance(motion, MotionTrajectory) else np.asarray(motion, dtype=float)
    count = len(x) if count is None else count
    if count < params.N:
        raise ValueError(f"need at least N={params.N} frames, got {count}")
    if len(x) < count:
        raise ValueError(f"motion has {len(x)} offsets but {count} frames were requested")
    frames = []
    for i in range(count):
        frame = synthesize_frame(scene, params, i, x[i])
        frame = apply_gamma(frame, config.gamma)
        frames.append(add_noise(frame, config, stream=i))
    return ImageSequence(frames)
