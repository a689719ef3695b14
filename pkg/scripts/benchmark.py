"""Time the CLI on a synthetic 328,464 x 20 table and report wall time and peak RSS.

    python scripts/benchmark.py [--rows N] [--features M] [--threads T] [--keep DIR]
"""

from __future__ import annotations

import argparse
import resource
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pandas as pd


def write_table(path: Path, rows: int, features: int, seed: int) -> None:
    rng = np.random.default_rng(seed)
    truth = rng.random(rows) < 27_764 / 328_464
    X = rng.normal(size=(rows, features)).astype(np.float32)
    informative = min(5, features)
    X[:, :informative] += truth[:, None] * rng.uniform(0.3, 1.5, informative).astype(np.float32)
    df = pd.DataFrame(X, columns=[f"f{i}" for i in range(features)])
    df["truth"] = truth.astype(int)
    df["prediction"] = 1
    df.to_csv(path, index=False, float_format="%.6g")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=328_464, help="row count (default 328464)")
    ap.add_argument("--features", type=int, default=20, help="feature count (default 20)")
    ap.add_argument("--threads", type=int, default=1, help="search threads (default 1)")
    ap.add_argument("--seed", type=int, default=6, help="generator seed (default 6)")
    ap.add_argument("--keep", type=Path, default=None, help="directory to keep csv/json in (default: temp)")
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        work = args.keep or Path(tmp)
        work.mkdir(parents=True, exist_ok=True)
        csv, out = work / "bench.csv", work / "bench.json"
        write_table(csv, args.rows, args.features, args.seed)
        start = time.perf_counter()
        res = subprocess.run([sys.executable, "-m", "discpath.cli", "mine", str(csv), "--delta-max", "0.03",
                              "--threads", str(args.threads), "-o", str(out)],
                             capture_output=True, text=True)
        wall = time.perf_counter() - start
    peak = resource.getrusage(resource.RUSAGE_CHILDREN).ru_maxrss / 1024.0
    sys.stderr.write(res.stderr)
    print(f"rows={args.rows} features={args.features} threads={args.threads} "
          f"exit={res.returncode} wall={wall:.1f}s peak_rss={peak:.0f}MB")
    return res.returncode


if __name__ == "__main__":
    sys.exit(main())
