"""Slow reference implementations used to check the histogram search.

Nothing here is on the search's hot path; loops are explicit on purpose so the
code shares no counting logic with the vectorised implementations.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .data import LabeledDataset, Mode
from .histogram import ConstantFeatureError
from .objective import DeltaMetrics, ObjectiveConfig, constraint_threshold, objective_score
from .search import GE, LT, Candidate, Rule


def _midpoint(lo, hi):
    mid = lo + (hi - lo) / 2.0
    return hi if mid <= lo else mid


def brute_force_threshold(values: Sequence[float], classes: Sequence[bool], cfg: ObjectiveConfig,
                          depth: int, primary_total: Optional[int] = None,
                          secondary_total: Optional[int] = None,
                          feature_index: int = 0) -> Candidate:
    """Exact optimum over every midpoint between consecutive distinct values."""
    pairs = sorted(zip((float(v) for v in values), (bool(c) for c in classes)))
    if not pairs:
        raise ValueError("values must be nonempty")
    if pairs[0][0] == pairs[-1][0]:
        raise ConstantFeatureError(f"feature {feature_index} is constant")
    p_all = sum(1 for _, c in pairs if c)
    s_all = len(pairs) - p_all
    tp = p_all if primary_total is None else primary_total
    ts = s_all if secondary_total is None else secondary_total
    limit = constraint_threshold(depth, cfg)

    if p_all == 0 or s_all == 0:
        dm = DeltaMetrics(p_all, s_all, tp, ts)
        return Candidate(feature_index, Rule(feature_index, GE, pairs[0][0]), dm,
                         objective_score(dm, cfg), dm.secondary_pct < limit)

    best = None  # (satisfied, score, Candidate)
    below_p = below_s = 0
    for i in range(len(pairs) - 1):
        v, c = pairs[i]
        if c:
            below_p += 1
        else:
            below_s += 1
        nxt = pairs[i + 1][0]
        if nxt == v:
            continue
        t = _midpoint(v, nxt)
        for comp, pc, sc in ((LT, below_p, below_s), (GE, p_all - below_p, s_all - below_s)):
            dm = DeltaMetrics(pc, sc, tp, ts)
            score = objective_score(dm, cfg)
            ok = dm.secondary_pct < limit
            if best is None or (ok, score) > (best[0], best[1]):
                best = (ok, score, Candidate(feature_index, Rule(feature_index, comp, t), dm, score, ok))
    return best[2]


def naive_apply(rules: Sequence[Rule], ds: LabeledDataset, mode: Mode) -> DeltaMetrics:
    """Per-object tally of the flips a rule conjunction causes in the working subset."""
    mode = Mode(mode)
    in_scope = True if mode is Mode.REDUCE_FP else False
    primary = secondary = primary_total = secondary_total = 0
    for i in range(ds.n_rows):
        if bool(ds.base_pred[i]) != in_scope:
            continue
        wrong = bool(ds.truth[i]) != bool(ds.base_pred[i])
        if wrong:
            primary_total += 1
        else:
            secondary_total += 1
        if not rules:
            continue
        hit = True
        for r in rules:
            x = float(ds.features[i, r.feature_index])
            hit = x < r.threshold if r.comparator == LT else x >= r.threshold
            if not hit:
                break
        if hit:
            if wrong:
                primary += 1
            else:
                secondary += 1
    return DeltaMetrics(primary, secondary, primary_total, secondary_total)
