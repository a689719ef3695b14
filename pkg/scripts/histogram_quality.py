"""Compare reduced-histogram threshold scores with the brute-force optimum across grid sizes.

    python scripts/histogram_quality.py [--cases 200] [--bins 16 32 64 128 256]
"""

from __future__ import annotations

import argparse

import numpy as np

from discpath import HistogramConfig, Mode, ObjectiveConfig, best_threshold_for_feature, build_reduced_histogram
from discpath.oracle import brute_force_threshold


def random_feature(rng: np.random.Generator):
    n = int(rng.integers(200, 5_000))
    classes = rng.random(n) < rng.uniform(0.2, 0.8)
    shift = rng.uniform(0.0, 2.0)
    values = rng.normal(size=n) + shift * classes
    if rng.random() < 0.3:
        values = np.round(values, 1)
    return values, classes


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cases", type=int, default=200, help="random features per grid size (default 200)")
    ap.add_argument("--bins", type=int, nargs="+", default=[16, 32, 64, 128, 256],
                    help="fine grid sizes to try (default 16 32 64 128 256)")
    ap.add_argument("--p-pure", type=float, default=0.99, help="purity for merging (default 0.99)")
    ap.add_argument("--seed", type=int, default=0, help="generator seed (default 0)")
    args = ap.parse_args()

    cfg = ObjectiveConfig(mode=Mode.REDUCE_FP, constraint=0.05)
    rng = np.random.default_rng(args.seed)
    cases = [random_feature(rng) for _ in range(args.cases)]
    oracle = [brute_force_threshold(v, c, cfg, depth=0) for v, c in cases]

    print(f"{'bins':>6} {'>=95% of optimum':>18} {'mean ratio':>11} {'mean bins':>10}")
    for bins in args.bins:
        hc = HistogramConfig(fine_bins=bins, p_pure=args.p_pure)
        ratios, sizes = [], []
        for (v, c), best in zip(cases, oracle):
            h = build_reduced_histogram(v, c, hc)
            got = best_threshold_for_feature(h, cfg, depth=0)
            sizes.append(h.n_bins)
            if best is None or best.score <= 0:
                ratios.append(1.0)
            else:
                ratios.append((got.score if got else 0.0) / best.score)
        r = np.array(ratios)
        print(f"{bins:>6} {np.mean(r >= 0.95):>17.1%} {r.mean():>11.4f} {np.mean(sizes):>10.1f}")


if __name__ == "__main__":
    main()
