"""Beam-limited graph search over conjunctions of feature-threshold rules.

Every node ranks all unused features by their best single-threshold score on
the objects that pass its ancestors' rules and spawns the top ``beam_width`` as
children. The graph is grown level by level (ids follow parent id, then rank),
which visits exactly the nodes a depth-first walk would.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .data import LabeledDataset, Mode, working_subset
from .histogram import ConstantFeatureError, HistogramConfig, ReducedHistogram, histogram_from_sorted
from .objective import (DeltaMetrics, ObjectiveConfig, constraint_threshold, final_budget,
                        objective_score, score_value)

log = logging.getLogger(__name__)

LT = "<"
GE = ">="


@dataclass(frozen=True)
class Rule:
    feature_index: int
    comparator: str
    threshold: float

    def __post_init__(self):
        if self.comparator not in (LT, GE):
            raise ValueError(f"comparator must be '<' or '>=', got {self.comparator!r}")
        if not np.isfinite(self.threshold):
            raise ValueError("threshold must be finite")

    def matches(self, values) -> np.ndarray:
        values = np.asarray(values)
        return values < self.threshold if self.comparator == LT else values >= self.threshold

    def describe(self, feature_names: Optional[Sequence[str]] = None) -> str:
        name = feature_names[self.feature_index] if feature_names else f"x{self.feature_index}"
        return f"{name} {self.comparator} {self.threshold:.6g}"


@dataclass(frozen=True)
class Candidate:
    feature_index: int
    rule: Rule
    metrics: DeltaMetrics
    score: float
    satisfied: bool


@dataclass
class SearchNode:
    node_id: int
    depth: int
    parent_id: Optional[int] = None
    rule: Optional[Rule] = None
    metrics: Optional[DeltaMetrics] = None
    score: Optional[float] = None
    satisfied: bool = True
    pruned: bool = False
    children: List[int] = field(default_factory=list)

    @property
    def is_root(self) -> bool:
        return self.parent_id is None


@dataclass(frozen=True)
class DiscriminationPath:
    node_id: int
    depth: int
    rules: Tuple[Rule, ...]
    metrics: DeltaMetrics
    score: float
    satisfied: bool


@dataclass
class SearchGraph:
    nodes: List[SearchNode]
    cfg: ObjectiveConfig
    hist_cfg: HistogramConfig
    feature_names: Tuple[str, ...]
    primary_total: int
    secondary_total: int

    def __len__(self) -> int:
        return len(self.nodes)

    def ancestry(self, node_id: int) -> List[SearchNode]:
        """Nodes from the first rule level down to ``node_id`` (root excluded)."""
        by_id = {n.node_id: n for n in self.nodes}
        chain = []
        node = by_id[node_id]
        while not node.is_root:
            chain.append(node)
            node = by_id[node.parent_id]
        return chain[::-1]

    def rules_to(self, node_id: int) -> Tuple[Rule, ...]:
        return tuple(n.rule for n in self.ancestry(node_id))


def best_threshold_for_feature(h: ReducedHistogram, cfg: ObjectiveConfig, depth: int,
                               primary_total: Optional[int] = None,
                               secondary_total: Optional[int] = None) -> Optional[Candidate]:
    """Best (comparator, threshold) over the histogram's interior edges.

    Pairs within the depth budget win over those outside it; among equals the
    lower threshold, then ``<``, is preferred. A single-bin histogram has no
    interior edge: a one-class subset then yields the all-flip rule ``>= min``,
    a mixed one yields None (nothing to discriminate at this resolution).
    """
    P = np.cumsum(h.primary_counts)
    S = np.cumsum(h.secondary_counts)
    p_all, s_all = int(P[-1]), int(S[-1])
    tp = p_all if primary_total is None else primary_total
    ts = s_all if secondary_total is None else secondary_total
    limit = constraint_threshold(depth, cfg)

    if h.n_bins == 1:
        if p_all and s_all:
            return None
        dm = DeltaMetrics(p_all, s_all, tp, ts)
        rule = Rule(h.feature_index, GE, float(h.edges[0]))
        return Candidate(h.feature_index, rule, dm, objective_score(dm, cfg),
                         dm.secondary_pct < limit)

    lt_p, lt_s = P[:-1], S[:-1]
    # Interleave so index 2j is "< edge j+1" and 2j+1 is ">= edge j+1".
    pc = np.column_stack((lt_p, p_all - lt_p)).ravel()
    sc = np.column_stack((lt_s, s_all - lt_s)).ravel()
    pp = pc / tp if tp else np.zeros(len(pc))
    sp = sc / ts if ts else np.zeros(len(sc))
    scores = score_value(pp, sp, cfg.alpha_prime)
    ok = sp < limit
    satisfied = bool(ok.any())
    pick = int(np.argmax(np.where(ok, scores, -np.inf))) if satisfied else int(np.argmax(scores))

    threshold = float(h.edges[1 + pick // 2])
    rule = Rule(h.feature_index, LT if pick % 2 == 0 else GE, threshold)
    dm = DeltaMetrics(int(pc[pick]), int(sc[pick]), tp, ts)
    return Candidate(h.feature_index, rule, dm, float(scores[pick]), satisfied)


def candidate_key(c: Candidate):
    return (not c.satisfied, -c.score, c.feature_index, c.rule.threshold, c.rule.comparator != LT)


class SearchContext:
    """Working-subset columns pre-sorted once, so per-node histograms cost O(n)."""

    def __init__(self, ds: LabeledDataset, mode: Mode, hist_cfg: HistogramConfig, threads: int = 1):
        sub = working_subset(ds, mode)
        self.mode = sub.mode
        self.hist_cfg = hist_cfg
        self.threads = max(1, int(threads))
        self.feature_names = ds.feature_names
        self.columns = np.asfortranarray(ds.features[sub.indices])
        self.is_primary = sub.is_primary
        self.primary_total = sub.primary_total
        self.secondary_total = sub.secondary_total
        self.n = len(sub)
        m = self.columns.shape[1]
        self.order = np.empty((m, self.n), dtype=np.int32)
        self.sorted_values = np.empty((m, self.n), dtype=np.float64)
        for f in range(m):
            o = np.argsort(self.columns[:, f], kind="stable")
            self.order[f] = o
            self.sorted_values[f] = self.columns[o, f]
        self.sorted_primary = self.is_primary[self.order]

    def histogram(self, feature: int, mask: Optional[np.ndarray]) -> ReducedHistogram:
        values = self.sorted_values[feature]
        primary = self.sorted_primary[feature]
        if mask is not None:
            keep = mask[self.order[feature]]
            values, primary = values[keep], primary[keep]
        return histogram_from_sorted(values, primary, self.hist_cfg, feature)

    def best_for(self, feature: int, mask, cfg: ObjectiveConfig, depth: int) -> Optional[Candidate]:
        try:
            h = self.histogram(feature, mask)
        except ConstantFeatureError:
            return None
        return best_threshold_for_feature(h, cfg, depth, self.primary_total, self.secondary_total)


def rank_features(ctx: SearchContext, mask: Optional[np.ndarray], cfg: ObjectiveConfig,
                  depth: int, exclude: Sequence[int] = ()) -> List[Candidate]:
    """Top ``beam_width`` features for the objects selected by ``mask`` (None = all)."""
    features = [f for f in range(ctx.columns.shape[1]) if f not in set(exclude)]
    if ctx.threads > 1 and len(features) > 1:
        with ThreadPoolExecutor(max_workers=ctx.threads) as pool:
            found = list(pool.map(lambda f: ctx.best_for(f, mask, cfg, depth), features))
    else:
        found = [ctx.best_for(f, mask, cfg, depth) for f in features]
    found = sorted((c for c in found if c is not None), key=candidate_key)
    return found[:cfg.beam_width]


def dfs_search(ds: LabeledDataset, cfg: ObjectiveConfig,
               hist_cfg: HistogramConfig = HistogramConfig(), threads: int = 1,
               ctx: Optional[SearchContext] = None) -> SearchGraph:
    if ctx is None:
        ctx = SearchContext(ds, cfg.mode, hist_cfg, threads)
    nodes = [SearchNode(node_id=0, depth=-1)]
    frontier = [(nodes[0], None, ())]
    for depth in range(cfg.total_depth):
        upcoming = []
        for parent, mask, used in frontier:
            for cand in rank_features(ctx, mask, cfg, depth, exclude=used):
                child = SearchNode(
                    node_id=len(nodes), depth=depth, parent_id=parent.node_id, rule=cand.rule,
                    metrics=cand.metrics, score=cand.score, satisfied=cand.satisfied,
                )
                nodes.append(child)
                parent.children.append(child.node_id)
                if depth == cfg.total_depth - 1:
                    continue
                if not cand.satisfied:
                    child.pruned = True
                    continue
                if cand.metrics.primary_count == 0 or cand.metrics.secondary_count == 0:
                    continue
                hit = cand.rule.matches(ctx.columns[:, cand.feature_index])
                upcoming.append((child, hit if mask is None else mask & hit,
                                 used + (cand.feature_index,)))
        frontier = upcoming
        if not frontier:
            break
    log.debug("search grew %d nodes", len(nodes))
    return SearchGraph(nodes, cfg, ctx.hist_cfg, ctx.feature_names,
                       ctx.primary_total, ctx.secondary_total)


def path_key(p: DiscriminationPath):
    last = p.rules[-1]
    return (-p.score, last.feature_index, last.threshold, last.comparator != LT, p.node_id)


def enumerate_paths(graph: SearchGraph) -> List[DiscriminationPath]:
    budget = final_budget(graph.cfg)
    paths = [
        DiscriminationPath(
            node_id=node.node_id, depth=node.depth, rules=graph.rules_to(node.node_id),
            metrics=node.metrics, score=node.score,
            satisfied=node.metrics.secondary_pct < budget,
        )
        for node in graph.nodes if not node.is_root
    ]
    return sorted(paths, key=path_key)


def select_optimal_path(paths: Sequence[DiscriminationPath]) -> DiscriminationPath:
    if not paths:
        raise ValueError("no paths to select from")
    ranked = sorted(paths, key=path_key)
    for p in ranked:
        if p.satisfied:
            return p
    return ranked[0]
