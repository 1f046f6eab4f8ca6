"""I-BSC over P-BSC speedup against K, with the closed-form op-count ratio for reference."""

import argparse

from bscpsp.bench import bench_frames, table_counts, throughput


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", default="640x480")
    ap.add_argument("--k-max", type=int, default=15)
    ap.add_argument("--reps", type=int, default=10)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    w, h = (int(v) for v in args.size.split("x"))
    print(f"{'K':>2} {'pbsc fps':>9} {'ibsc fps':>9} {'speedup':>8} {'op ratio':>8}")
    for K in range(args.k_max + 1):
        frames = bench_frames(K, w, h)
        fp = throughput("pbsc", K, w, h, args.reps, workers=args.workers, frames=frames)
        fi = throughput("ibsc", K, w, h, args.reps, workers=args.workers, frames=frames)
        ops = sum(table_counts("pbsc", K).as_tuple()) / sum(table_counts("ibsc", K).as_tuple())
        print(f"{K:>2} {fp:9.1f} {fi:9.1f} {fi / fp:8.2f} {ops:8.2f}")


if __name__ == "__main__":
    main()
