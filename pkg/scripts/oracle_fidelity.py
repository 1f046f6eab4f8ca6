"""Predicted vs simulated residual ripple for each method and K.

Prints one row per (method, K) for a uniform-acceleration trajectory centred
on the window: predicted amplitude, simulated ripple amplitude and DC lag.
"""

import argparse

import numpy as np

from bscpsp.bsc import compensate, window_length
from bscpsp.imaging import FringeParams, MotionTrajectory, ScenePhase, simulate_capture
from bscpsp.oracle import predict_residual, ripple_error


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--v0", type=float, default=0.01)
    ap.add_argument("--a", type=float, default=0.004)
    ap.add_argument("--k-max", type=int, default=6)
    args = ap.parse_args()

    phi = np.linspace(0, 2 * np.pi, 720, endpoint=False)[None, :]
    params = FringeParams(width=720, height=1)
    print(f"{'method':>6} {'K':>2} {'predicted':>11} {'simulated':>11} {'dc_sim':>9} {'dc_pred':>9}")
    for method in ("pbsc3", "pbsc4", "ibsc"):
        for K in range(args.k_max + 1):
            L = window_length(method, K)
            motion = MotionTrajectory.kinematic(args.v0, args.a, max(L, 4), (L - 1) / 2)
            frames = simulate_capture(ScenePhase(phi), params, motion).frames[:L]
            pm = compensate(frames, method, K)
            ripple, dc = ripple_error(pm.phase, phi, pm.valid)
            pred = predict_residual(method, motion.x, K)
            # amplitude of a pure 2*phi sinusoid is sqrt(2) times its RMS
            sim_amp = np.sqrt(2 * np.mean(ripple**2))
            dc_pred = "n/a" if pred.dc is None else f"{pred.dc:9.2e}"
            print(f"{method:>6} {K:>2} {pred.amplitude:11.3e} {sim_amp:11.3e} {dc:9.2e} {dc_pred:>9}")


if __name__ == "__main__":
    main()
