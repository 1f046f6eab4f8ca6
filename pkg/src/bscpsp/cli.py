"""``bscpsp`` command line: one subcommand per experiment.

Every run echoes its resolved configuration to ``<out>/config.txt``; passing
that file back with ``--config`` reproduces the run.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import bench, noise, unwrap
from .bsc import METHODS, batch_windows, sliding_stream, window_length
from .config import ConfigError, ExperimentConfig, dump_config, load_config
from .imaging import (
    CaptureConfig,
    FringeParams,
    MotionTrajectory,
    add_noise,
    apply_gamma,
    make_ramp_scene,
    synthesize_frame,
)
from .io import write_csv, write_phase_pgm
from .oracle import rmse_curve

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class NumericalError(ArithmeticError):
    pass


def _check_finite(values, what: str):
    if not np.all(np.isfinite(np.asarray(values, dtype=float))):
        raise NumericalError(f"non-finite {what}")


def _parse_size(text: str) -> tuple[int, int]:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise ConfigError("--size", f"expected WxH, got {text!r}") from None
    if w < 1 or h < 1:
        raise ConfigError("--size", "dimensions must be positive")
    return w, h


def _summary(out: Path, lines: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    (out / "summary.txt").write_text(text)
    sys.stdout.write(text)


# -- subcommands -----------------------------------------------------------


def cmd_decay(cfg: ExperimentConfig, out: Path) -> list[Path]:
    """Ripple RMSE against K for each method, linear and gamma sensors."""
    f = cfg.fringe
    params = FringeParams(A=f.A, B=f.B, N=4, wavelength=f.wavelength, width=f.width, height=f.height)
    scene = make_ramp_scene(params)
    Ks = range(cfg.run.k_min, cfg.run.k_max + 1)
    methods = [cfg.run.method] if cfg.run.method else list(METHODS)
    motion = MotionTrajectory.kinematic(cfg.motion.v0, cfg.motion.a, cfg.run.k_max + 4, cfg.motion.datum)
    c = cfg.capture
    variants = {
        "linear": CaptureConfig(1.0, c.gain, c.dark_signal, c.dark_variance, cfg.run.seed),
        "gamma": CaptureConfig(c.gamma, c.gain, c.dark_signal, c.dark_variance, cfg.run.seed),
    }
    written = []
    lines = [f"noise: {'none' if variants['linear'].noiseless else 'gain=%r' % c.gain}", f"gamma variant: {c.gamma!r}"]
    for family in ("pbsc", "ibsc"):
        members = [m for m in methods if m.startswith(family)]
        if not members:
            continue
        for label, capture in variants.items():
            rows = []
            for m in members:
                for K, rmse, dc in rmse_curve(scene, params, motion, capture, m, Ks):
                    rows.append((K, m, rmse, dc))
            _check_finite([r[2] for r in rows], "RMSE")
            written.append(write_csv(out / f"decay_{family}_{label}.csv", ("K", "method", "rmse_rad", "dc_rad"), rows))
            for m in members:
                curve = ", ".join(f"{r[2]:.3e}" for r in rows if r[1] == m)
                lines.append(f"{label} {m}: {curve}")
    _summary(out, lines)
    return written


def cmd_unwrap_sr(cfg: ExperimentConfig, out: Path) -> list[Path]:
    u = cfg.unwrap
    scene = unwrap.DeploymentScene(width=u.width, height=u.height)
    rows = []
    for method in unwrap.UNWRAP_METHODS:
        for variant in ("pbsc", "ibsc"):
            rows += unwrap.deployment_study(method, variant, range(u.k_max + 1), u.v0, u.a, scene)
    path = write_csv(out / "unwrap_sr.csv", ("method", "bsc", "K", "success_rate"), rows)
    _summary(out, [f"{m} {b} K={K}: {sr * 100:.2f}%" for m, b, K, sr in rows])
    return [path]


def cmd_noise(cfg: ExperimentConfig, out: Path) -> list[Path]:
    n = cfg.noise
    ncfg = noise.NoiseStudyConfig(gain=n.gain, A=n.A, B=n.B, trials=n.trials, seed=cfg.run.seed, phases=n.phases, workers=n.workers)
    est = noise.noise_study(ncfg, n.n_values)
    _check_finite([e.sigma2 for e in est], "variance")
    rows = [(e.N, e.method, e.sigma2, e.sigma2_predicted) for e in est]
    path = write_csv(out / "noise.csv", ("N", "method", "sigma2_measured", "sigma2_predicted"), rows)
    lines = []
    for method in ("psp", "pbsc", "ibsc"):
        samples = [(e.N, e.sigma2) for e in est if e.method == method]
        if len(samples) >= 4 and all(s > 0 for _, s in samples):
            c, p = noise.fit_noise_law(samples)
            lines.append(f"fit {method}: sigma2 = {c:.4g} * N^{p:.3f}")
        else:
            lines.append(f"fit {method}: skipped (needs >= 4 positive samples)")
    _summary(out, lines)
    return [path]


def cmd_bench(cfg: ExperimentConfig, out: Path) -> list[Path]:
    b = cfg.bench
    results = bench.run_bench(range(b.k_max + 1), b.width, b.height, b.repetitions, b.warmup, b.workers)
    for r in results:
        if r.ops != bench.table_counts(r.method, r.K):
            raise NumericalError(f"op counts for {r.method} K={r.K} disagree with the closed-form table")
    path = write_csv(out / "bench.csv", ("method", "K", *bench.OP_NAMES, "fps"), (r.row() for r in results))
    lines = [f"size {b.width}x{b.height}, {b.repetitions} repetitions, workers={b.workers}"]
    by = {(r.method, r.K): r.fps for r in results}
    for K in range(b.k_max + 1):
        lines.append(f"K={K}: pbsc {by[('pbsc', K)]:.1f} fps, ibsc {by[('ibsc', K)]:.1f} fps, speedup {by[('ibsc', K)] / by[('pbsc', K)]:.2f}")
    if b.k_max >= 1:
        lines.append(f"speedup slope per K: {bench.speedup_slope(results):.3f}")
    _summary(out, lines)
    return [path]


def cmd_stream_demo(cfg: ExperimentConfig, out: Path) -> list[Path]:
    s = cfg.stream
    method = cfg.run.method or "ibsc"
    f = cfg.fringe
    params = FringeParams(A=f.A, B=f.B, N=4, wavelength=f.wavelength, width=s.width, height=s.height)
    scene = make_ramp_scene(params)
    motion = MotionTrajectory.kinematic(s.v0, s.a, s.frames)
    c = cfg.capture
    capture = CaptureConfig(1.0, c.gain, c.dark_signal, c.dark_variance, cfg.run.seed)
    frames = [add_noise(apply_gamma(synthesize_frame(scene, params, i, motion.x[i]), 1.0), capture, i) for i in range(s.frames)]

    arrivals: list[float] = []

    def source():
        for fr in frames:
            arrivals.append(time.perf_counter())
            yield fr

    dump_dir = out / "phase"
    dump_dir.mkdir(exist_ok=True)
    L = window_length(method, s.K)
    latencies = []
    outputs = []
    for k, pm in enumerate(sliding_stream(source(), method, s.K)):
        latencies.append((k, L - 1 + k, (time.perf_counter() - arrivals[-1]) * 1e3))
        outputs.append(pm)
        if s.dump_every and k % s.dump_every == 0:
            write_phase_pgm(dump_dir / f"phase_{k:05d}.pgm", pm)
    batch = batch_windows(frames, method, s.K)
    probe = sorted({0, len(batch) // 2, len(batch) - 1}) if batch else []
    identical = len(batch) == len(outputs) and all(
        np.array_equal(batch[i].phase, outputs[i].phase, equal_nan=True) for i in probe
    )
    lat_path = write_csv(out / "stream_latency.csv", ("output", "frame", "latency_ms"), latencies)
    ms = np.array([r[2] for r in latencies]) if latencies else np.zeros(1)
    _summary(
        out,
        [
            f"method {method} K={s.K}: {s.frames} frames in, {len(outputs)} phase maps out (warm-up {L - 1})",
            f"latency ms: median {np.median(ms):.3f}, p95 {np.percentile(ms, 95):.3f}, max {ms.max():.3f}",
            f"batch/stream spot check: {'identical' if identical else 'MISMATCH'}",
        ],
    )
    if not identical:
        raise NumericalError("stream output differs from batch output")
    return [lat_path]


COMMANDS = {
    "decay": cmd_decay,
    "unwrap-sr": cmd_unwrap_sr,
    "noise": cmd_noise,
    "bench": cmd_bench,
    "stream-demo": cmd_stream_demo,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bscpsp", description="Motion-error compensation experiments for phase-shifting profilometry.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=(fn.__doc__ or name).strip().splitlines()[0])
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--seed", type=int, help="master RNG seed")
        p.add_argument("--out", default=f"out/{name}", help="output directory")
        p.add_argument("--k-max", type=int, dest="k_max", help="largest binomial order")
        p.add_argument("--size", help="image size WxH")
        p.add_argument("--method", choices=METHODS, help="compensation method")
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Config file plus command-line overrides, validated."""
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.run.seed = args.seed
    if args.method is not None:
        cfg.run.method = args.method
    if args.k_max is not None and args.command == "noise":
        # BSC order K pairs with N = K + 4 patterns
        cfg.noise.n_values = tuple(range(4, args.k_max + 5))
    elif args.k_max is not None:
        target ={"unwrap-sr": cfg.unwrap, "bench": cfg.bench, "stream-demo": cfg.stream}.get(args.command, cfg.run)
        setattr(target, "K" if target is cfg.stream else "k_max", args.k_max)
    if args.size is not None:
        w, h = _parse_size(args.size)
        target = {"bench": cfg.bench, "stream-demo": cfg.stream, "unwrap-sr": cfg.unwrap}.get(args.command, cfg.fringe)
        target.width, target.height = w, h
    return cfg.validate()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.txt").write_text(dump_config(cfg))
        COMMANDS[args.command](cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        # invalid parameter combinations rejected by the library
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
