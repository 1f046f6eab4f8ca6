"""Per-pixel operation counts and wall-clock throughput of P-BSC and I-BSC.

Counting conventions (one output pixel, 4-step fringes, order K):

* phase frame: two quadrature differences (addsub), one full-quadrant
  arctangent into [0, 2*pi), then the rebase: the offset accumulator
  advances by pi/2 (addsub), is added to the phase (addsub) and wrapped (mod).
* circular midpoint: ``a + b`` (addsub), halving (muldiv), the shorter-arc
  test ``|a - b| > pi`` as one compare-distance (cmp), the half-turn
  correction ``mid + pi*w`` as one fused multiply-add (muldiv), wrap (mod).
* I-BSC: per step group, K multiplies and K adds for the weighted terms
  k = 1..K; then two quadrature differences and one arctangent. Frame
  index arithmetic is precomputed once per stream and not counted.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from statistics import median
from typing import Sequence

import numpy as np

from .bsc import binomial_row, compensate, ibsc_index
from .imaging import FringeParams, MotionTrajectory, make_ramp_scene, simulate_capture

OP_NAMES = ("arctan", "mod", "addsub", "muldiv", "cmp")


@dataclass
class OpCounter:
    arctan: int = 0
    mod: int = 0
    addsub: int = 0
    muldiv: int = 0
    cmp: int = 0

    def reset(self) -> None:
        for f in fields(self):
            setattr(self, f.name, 0)

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(getattr(self, n) for n in OP_NAMES)

    # instrumented scalar primitives
    def add(self, a: float, b: float) -> float:
        self.addsub += 1
        return a + b

    def sub(self, a: float, b: float) -> float:
        self.addsub += 1
        return a - b

    def mul(self, a: float, b: float) -> float:
        self.muldiv += 1
        return a * b

    def fma(self, a: float, b: float, c: float) -> float:
        self.muldiv += 1
        return a + b * c

    def wrap(self, a: float) -> float:
        self.mod += 1
        r = math.fmod(a, 2 * math.pi)
        r = r + 2 * math.pi if r < 0 else r
        return 0.0 if r >= 2 * math.pi else r

    def atan2pos(self, num: float, den: float) -> float:
        self.arctan += 1
        r = math.atan2(num, den)
        return r + 2 * math.pi if r < 0 else r

    def far_apart(self, a: float, b: float, limit: float) -> bool:
        self.cmp += 1
        return abs(a - b) > limit


def table_counts(method: str, K: int) -> OpCounter:
    """Closed-form per-pixel counts of the complexity table."""
    if K < 0:
        raise ValueError("K must be >= 0")
    if method == "pbsc":
        tri = K * (K + 1) // 2
        return OpCounter(
            arctan=K + 1,
            mod=(K + 1) + tri,  # (0.5K + 1)(K + 1)
            addsub=4 * (K + 1) + tri,  # (0.5K + 4)(K + 1)
            muldiv=K * (K + 1),
            cmp=tri,
        )
    if method == "ibsc":
        return OpCounter(arctan=1, mod=0, addsub=4 * K + 2, muldiv=4 * K, cmp=0)
    raise ValueError(f"method must be 'pbsc' or 'ibsc', got {method!r}")


def _oplus_counted(c: OpCounter, a: float, b: float) -> float:
    mid = c.mul(c.add(a, b), 0.5)
    w = 1.0 if c.far_apart(a, b, math.pi) else 0.0
    return c.wrap(c.fma(mid, math.pi, w))


def pbsc_pixel(intensities: Sequence[float], K: int, counter: OpCounter) -> float:
    """Scalar 4-step P-BSC of one pixel with every operation counted."""
    if len(intensities) < K + 4:
        raise ValueError(f"need {K + 4} intensities, got {len(intensities)}")
    I = intensities
    layer = []
    offset = -math.pi / 2
    for t in range(K + 1):
        phi = counter.atan2pos(counter.sub(I[t + 1], I[t + 3]), counter.sub(I[t], I[t + 2]))
        offset = counter.add(offset, math.pi / 2)
        layer.append(counter.wrap(counter.add(phi, offset)))
    while len(layer) > 1:
        layer = [_oplus_counted(counter, layer[i], layer[i + 1]) for i in range(len(layer) - 1)]
    return layer[0]


def ibsc_pixel(intensities: Sequence[float], K: int, counter: OpCounter) -> float:
    """Scalar I-BSC of one pixel with every operation counted."""
    if len(intensities) < K + 4:
        raise ValueError(f"need {K + 4} intensities, got {len(intensities)}")
    w = binomial_row(K).weights
    idx = [[ibsc_index(m, k) for k in range(K + 1)] for m in range(4)]
    sums = []
    for m in range(4):
        acc = intensities[idx[m][0]]
        for k in range(1, K + 1):
            acc = counter.add(acc, counter.mul(w[k], intensities[idx[m][k]]))
        sums.append(acc)
    return counter.atan2pos(counter.sub(sums[1], sums[3]), counter.sub(sums[0], sums[2]))


def count_ops(method: str, K: int, intensities: Sequence[float] | None = None) -> OpCounter:
    """Run the instrumented pixel once and return its counts."""
    if intensities is None:
        intensities = [0.5 + 0.4 * math.cos(1.0 - math.pi / 2 * i + 0.01 * i) for i in range(K + 4)]
    counter = OpCounter()
    if method == "pbsc":
        pbsc_pixel(intensities, K, counter)
    elif method == "ibsc":
        ibsc_pixel(intensities, K, counter)
    else:
        raise ValueError(f"method must be 'pbsc' or 'ibsc', got {method!r}")
    return counter


@dataclass(frozen=True)
class BenchResult:
    method: str
    K: int
    ops: OpCounter
    fps: float
    width: int
    height: int

    def row(self) -> tuple:
        return (self.method, self.K, *self.ops.as_tuple(), self.fps)


def bench_frames(K: int, width: int = 640, height: int = 480) -> list[np.ndarray]:
    params = FringeParams(width=width, height=height)
    scene = make_ramp_scene(params)
    motion = MotionTrajectory.kinematic(0.05, 0.0, K + 4)
    return simulate_capture(scene, params, motion).frames


def throughput(
    method: str,
    K: int,
    width: int = 640,
    height: int = 480,
    repetitions: int = 100,
    warmup: int = 2,
    workers: int = 1,
    frames: Sequence[np.ndarray] | None = None,
) -> float:
    """Median frames per second of one full-image compensation.

    With ``workers > 1`` the image is split into row bands that are processed
    concurrently; this is a scaling report only.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    if method not in ("pbsc", "ibsc"):
        raise ValueError(f"method must be 'pbsc' or 'ibsc', got {method!r}")
    name = "pbsc4" if method == "pbsc" else "ibsc"
    frames = list(frames) if frames is not None else bench_frames(K, width, height)
    if workers > 1:
        bands = np.array_split(np.arange(frames[0].shape[0]), workers)
        pool = ThreadPoolExecutor(workers)

        def run():
            list(pool.map(lambda r: compensate([f[r[0] : r[-1] + 1] for f in frames], name, K), bands))

    else:
        pool = None

        def run():
            compensate(frames, name, K)

    try:
        for _ in range(warmup):
            run()
        times = []
        for _ in range(repetitions):
            t0 = time.perf_counter()
            run()
            times.append(time.perf_counter() - t0)
    finally:
        if pool is not None:
            pool.shutdown()
    return 1.0 / median(times)


def run_bench(
    K_values: Sequence[int] = range(16),
    width: int = 640,
    height: int = 480,
    repetitions: int = 100,
    warmup: int = 2,
    workers: int = 1,
) -> list[BenchResult]:
    """Both methods at each K, P-BSC and I-BSC interleaved so drift hits both alike."""
    out = []
    for K in K_values:
        frames = bench_frames(K, width, height)
        for method in ("pbsc", "ibsc"):
            fps = throughput(method, K, width, height, repetitions, warmup, workers, frames)
            out.append(BenchResult(method, K, count_ops(method, K), fps, width, height))
    return out


def speedup_slope(results: Sequence[BenchResult]) -> float:
    """Least-squares slope of ``fps_ibsc / fps_pbsc`` against K."""
    by = {(r.method, r.K): r.fps for r in results}
    Ks = sorted({r.K for r in results if ("pbsc", r.K) in by and ("ibsc", r.K) in by})
    if len(Ks) < 2:
        raise ValueError("need at least two K values with both methods")
    ratios = [by[("ibsc", K)] / by[("pbsc", K)] for K in Ks]
    return float(np.polyfit(Ks, ratios, 1)[0])
