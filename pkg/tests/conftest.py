import numpy as np
import pytest

from discpath import LabeledDataset


def make_dataset(X, truth, pred, names=None):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    names = names or [f"f{i}" for i in range(X.shape[1])]
    return LabeledDataset(X, names, truth, pred)


def random_dataset(rng, n=400, m=5, signal=1.0, pos_rate=0.4, pred_rate=0.6, round_to=None):
    truth = rng.random(n) < pos_rate
    pred = rng.random(n) < pred_rate
    X = rng.normal(size=(n, m))
    wrong = truth != pred
    X[:, 0] += signal * wrong
    if m > 1:
        X[:, 1] -= 0.5 * signal * wrong
    if round_to is not None:
        X = np.round(X, round_to)
    return make_dataset(X, truth, pred)


# Alarm fixture: 20 TP and 11 FP, one salary column that separates
# 10 of the FP from all but one TP, plus two uninformative columns.
EX1_FP_SALARY = [0.20, 0.26, 0.31, 0.38, 0.55, 0.61, 0.68, 0.74, 0.80, 0.86, 0.95]
EX1_TP_SALARY = [0.50, 0.871266, 0.88, 0.89, 0.90, 0.91, 0.92, 0.93, 0.94, 0.96,
                 0.965, 0.97, 0.975, 0.98, 0.985, 0.99, 0.992, 0.995, 0.998, 1.0]


def example1_dataset():
    salary = np.array(EX1_FP_SALARY + EX1_TP_SALARY)
    truth = np.array([False] * 11 + [True] * 20)
    rng = np.random.default_rng(5)
    X = np.column_stack([salary, rng.random(31), rng.random(31)])
    return make_dataset(X, truth, np.ones(31, bool), ["salary", "age", "height"])


def example2_dataset():
    """83 base negatives: 46 FN and 37 TN; ``score >= 0.7`` catches 27 FN and 3 TN."""
    lo_fn = np.linspace(0.0, 0.39, 19)
    lo_tn = np.linspace(0.40, 0.69, 34)
    hi_fn = np.linspace(0.70, 1.0, 27)
    hi_tn = np.array([0.755, 0.855, 0.955])
    score = np.concatenate([lo_fn, hi_fn, lo_tn, hi_tn])
    truth = np.array([True] * 46 + [False] * 37)
    rng = np.random.default_rng(6)
    X = np.column_stack([score, rng.random(83), rng.random(83)])
    return make_dataset(X, truth, np.zeros(83, bool), ["score", "age", "height"])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def ex1():
    return example1_dataset()


@pytest.fixture
def ex2():
    return example2_dataset()


ACCEPTANCE_LINES = []


def record_criterion(label: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
