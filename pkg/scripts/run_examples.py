"""Mine the two worked examples (alarm clean-up and missed-positive rescue) and print their tables.

    python scripts/run_examples.py
"""

from __future__ import annotations

import numpy as np

from discpath import HistogramConfig, LabeledDataset, Mode, ObjectiveConfig, mine
from discpath.report import format_table

FP_SALARY = [0.20, 0.26, 0.31, 0.38, 0.55, 0.61, 0.68, 0.74, 0.80, 0.86, 0.95]
TP_SALARY = [0.50, 0.871266, 0.88, 0.89, 0.90, 0.91, 0.92, 0.93, 0.94, 0.96,
             0.965, 0.97, 0.975, 0.98, 0.985, 0.99, 0.992, 0.995, 0.998, 1.0]


def alarms() -> LabeledDataset:
    salary = np.array(FP_SALARY + TP_SALARY)
    rng = np.random.default_rng(5)
    X = np.column_stack([salary, rng.random(31), rng.random(31)])
    truth = np.array([False] * 11 + [True] * 20)
    return LabeledDataset(X, ["salary", "age", "height"], truth, np.ones(31, bool))


def negatives() -> LabeledDataset:
    score = np.concatenate([np.linspace(0.0, 0.39, 19), np.linspace(0.70, 1.0, 27),
                            np.linspace(0.40, 0.69, 34), [0.755, 0.855, 0.955]])
    rng = np.random.default_rng(6)
    X = np.column_stack([score, rng.random(83), rng.random(83)])
    truth = np.array([True] * 46 + [False] * 37)
    return LabeledDataset(X, ["score", "age", "height"], truth, np.zeros(83, bool))


def main() -> None:
    runs = [
        ("31 alarms, clear false ones", alarms(), Mode.REDUCE_FP, 0.06),
        ("83 negatives, rescue missed positives", negatives(), Mode.IMPROVE_TP, 0.10),
    ]
    for title, ds, mode, budget in runs:
        cfg = ObjectiveConfig(mode=mode, constraint=budget)
        report = mine(ds, cfg, HistogramConfig(), alpha_ladder=(0.25, 0.5, 1.0, 2.0, 4.0))
        print(f"== {title} (budget {budget:.0%}, alpha' {report.alpha_tuning['chosen']})")
        print(format_table(report, top=5))
        print()


if __name__ == "__main__":
    main()
