"""Run every experiment subcommand into one output tree.

    python scripts/reproduce_all.py --out results --quick
"""

import argparse
import sys
from pathlib import Path

from bscpsp.cli import main as cli_main


def run(argv: list[str]) -> None:
    print("$ bscpsp " + " ".join(argv), flush=True)
    code = cli_main(argv)
    if code:
        sys.exit(code)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--quick", action="store_true", help="fewer noise trials and bench repetitions")
    args = ap.parse_args()
    out = Path(args.out)
    common = ["--seed", str(args.seed)]
    extra = []
    if args.quick:
        out.mkdir(parents=True, exist_ok=True)
        quick = out / "quick.txt"
        quick.write_text("noise.trials=200000\nbench.repetitions=5\n")
        extra = ["--config", str(quick)]
    run(["decay", "--out", str(out / "decay"), *common, *extra])
    run(["unwrap-sr", "--out", str(out / "unwrap"), *common, *extra])
    run(["noise", "--out", str(out / "noise"), *common, *extra])
    run(["bench", "--out", str(out / "bench"), *common, *extra])
    run(["stream-demo", "--out", str(out / "stream"), *common, *extra])


if __name__ == "__main__":
    main()
