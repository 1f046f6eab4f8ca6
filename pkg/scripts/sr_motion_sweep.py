"""Success rate of each unwrapping method as motion speed grows.

Writes ``method,bsc,K,v0,success_rate`` rows; useful to see where each raw
method starts failing and how many BSC orders bring it back to 100%.
"""

import argparse

import numpy as np

from bscpsp.io import write_csv
from bscpsp.unwrap import UNWRAP_METHODS, deployment_trial


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="sr_sweep.csv")
    ap.add_argument("--k-max", type=int, default=4)
    ap.add_argument("--a", type=float, default=0.005)
    args = ap.parse_args()
    rows = []
    for v0 in np.round(np.arange(0.05, 0.31, 0.05), 2):
        for method in UNWRAP_METHODS:
            for bsc in ("pbsc", "ibsc"):
                for K in range(args.k_max + 1):
                    rows.append((method, bsc, K, float(v0), deployment_trial(method, bsc, K, float(v0), args.a)))
    write_csv(args.out, ("method", "bsc", "K", "v0", "success_rate"), rows)
    for method in UNWRAP_METHODS:
        for bsc in ("pbsc", "ibsc"):
            worst = min(r[4] for r in rows if r[0] == method and r[1] == bsc and r[2] == args.k_max)
            print(f"{method:>13} {bsc}: min SR at K={args.k_max} over sweep = {worst:.2%}")


if __name__ == "__main__":
    main()
