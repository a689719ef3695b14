"""Scoring of flip outcomes, the depth-dependent constraint schedule and alpha tuning."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

from .data import Mode

DEFAULT_ALPHA_LADDER = (0.25, 0.5, 1.0, 2.0, 4.0)


@dataclass(frozen=True)
class ObjectiveConfig:
    mode: Mode
    constraint: float
    alpha_prime: float = 1.0
    target: float = 1.0
    delta_max: Optional[float] = None
    total_depth: int = 3
    beam_width: int = 3

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.delta_max is None:
            object.__setattr__(self, "delta_max", self.constraint)
        if not self.alpha_prime > 0:
            raise ValueError("alpha_prime must be positive")
        if not 0 < self.constraint <= 1:
            raise ValueError("constraint must be in (0, 1]")
        if not 0 < self.delta_max <= 1:
            raise ValueError("delta_max must be in (0, 1]")
        if not 0 < self.target <= 1:
            raise ValueError("target must be in (0, 1]")
        if self.total_depth < 1:
            raise ValueError("total_depth must be >= 1")
        if self.beam_width < 1:
            raise ValueError("beam_width must be >= 1")

    def with_alpha(self, alpha_prime: float) -> "ObjectiveConfig":
        return replace(self, alpha_prime=alpha_prime)


@dataclass(frozen=True)
class DeltaMetrics:
    """Flip counts for one rule conjunction.

    Primary is the metric being maximised (FP cleared, or FN rescued), secondary
    the one held under budget (TP lost, or TN flipped to FP). Totals are the
    base quadrant sizes, so percentages are relative to the unrefined classifier.
    """

    primary_count: int
    secondary_count: int
    primary_total: int
    secondary_total: int

    def __post_init__(self):
        if not 0 <= self.primary_count <= self.primary_total:
            raise ValueError("primary_count out of range")
        if not 0 <= self.secondary_count <= self.secondary_total:
            raise ValueError("secondary_count out of range")

    @property
    def primary_pct(self) -> float:
        return self.primary_count / self.primary_total if self.primary_total else 0.0

    @property
    def secondary_pct(self) -> float:
        return self.secondary_count / self.secondary_total if self.secondary_total else 0.0

    @property
    def flips(self) -> int:
        return self.primary_count + self.secondary_count


def score_value(primary_pct, secondary_pct, alpha_prime):
    # Works on floats and numpy arrays alike; both paths must round identically.
    return alpha_prime * primary_pct - secondary_pct


def objective_score(dm: DeltaMetrics, cfg: ObjectiveConfig) -> float:
    return score_value(dm.primary_pct, dm.secondary_pct, cfg.alpha_prime)


def cost_function(delta_tp: float, delta_fp: float, alpha: float, target: float,
                  constraint: float) -> float:
    """Unreduced cost alpha*dTP/t - dFP/c; its argmax equals that of the alpha' form."""
    return alpha * delta_tp / target - delta_fp / constraint


def constraint_threshold(d: int, cfg: ObjectiveConfig) -> float:
    D = cfg.total_depth
    if not 0 <= d <= D:
        raise ValueError(f"depth {d} outside [0, {D}]")
    return cfg.delta_max * (D / (d + 1)) ** 2


def satisfies_constraint(dm: DeltaMetrics, d: int, cfg: ObjectiveConfig) -> bool:
    return dm.secondary_pct < constraint_threshold(d, cfg)


def final_budget(cfg: ObjectiveConfig) -> float:
    return constraint_threshold(cfg.total_depth - 1, cfg)


@dataclass(frozen=True)
class AlphaChoice:
    alpha_prime: float
    report: object
    satisfied: bool


def tune_alpha(runner: Callable[[ObjectiveConfig], object], cfg: ObjectiveConfig,
               schedule: Sequence[float] = DEFAULT_ALPHA_LADDER) -> AlphaChoice:
    """Run the search once per alpha' and keep the best.

    ``runner`` maps a config to a report exposing ``selected`` (a path with
    ``satisfied`` and ``metrics``). Among satisfied optima the largest primary
    delta wins, earlier candidates winning ties; without any, the candidate
    with the smallest budget overrun is returned unsatisfied.
    """
    if not schedule:
        raise ValueError("alpha schedule must be nonempty")
    budget = final_budget(cfg)
    runs = []
    for alpha in schedule:
        report = runner(cfg.with_alpha(alpha))
        runs.append((alpha, report, report.selected))

    best = None
    for alpha, report, path in runs:
        if path is None or not path.satisfied:
            continue
        if best is None or path.metrics.primary_count > best[2].metrics.primary_count:
            best = (alpha, report, path)
    if best is not None:
        return AlphaChoice(best[0], best[1], True)

    fallback = None
    for alpha, report, path in runs:
        overrun = float("inf") if path is None else path.metrics.secondary_pct - budget
        if fallback is None or overrun < fallback[2]:
            fallback = (alpha, report, overrun)
    return AlphaChoice(fallback[0], fallback[1], False)


def gini_score(proportions: Sequence[float]) -> float:
    """1 - sum_i [p_i^2 + (1 - p_i)^2], evaluated verbatim.

    Note this is not the textbook impurity: with more than one split direction
    it goes negative (two pure directions give -1). Kept as a comparison baseline.
    """
    total = 0.0
    for p in proportions:
        if not 0.0 <= p <= 1.0:
            raise ValueError("proportions must lie in [0, 1]")
        total += p * p + (1.0 - p) * (1.0 - p)
    return 1.0 - total
