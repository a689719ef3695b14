"""Variable-width ("reduced") histograms for threshold search.

A fine equal-count grid is laid over the feature values, then every run of adjacent bins
that is class-pure (purity >= ``p_pure``, same majority class) collapses into
one coarse bin. Mixed bins keep their fine width, so candidate thresholds
concentrate where the two classes overlap. The two outermost coarse bins keep
their extreme fine bin as a separate seam.

Grid edges sit midway between consecutive distinct values. When a feature has
no more distinct values than ``fine_bins`` every such midpoint is an edge,
which makes the search exact at that resolution.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


class ConstantFeatureError(ValueError):
    """All values of the feature are identical, nothing to split."""


@dataclass(frozen=True)
class HistogramConfig:
    fine_bins: int = 256
    p_pure: float = 0.99
    min_bin_count: int = 1

    def __post_init__(self):
        if self.fine_bins < 2:
            raise ValueError("fine_bins must be >= 2")
        if not 0.5 < self.p_pure <= 1.0:
            raise ValueError("p_pure must be in (0.5, 1]")
        if self.min_bin_count < 1:
            raise ValueError("min_bin_count must be >= 1")


@dataclass(frozen=True, eq=False)
class ReducedHistogram:
    feature_index: int
    edges: np.ndarray
    primary_counts: np.ndarray
    secondary_counts: np.ndarray

    @property
    def n_bins(self) -> int:
        return len(self.edges) - 1

    @property
    def total(self) -> int:
        return int(self.primary_counts.sum() + self.secondary_counts.sum())

    def bin_of(self, values) -> np.ndarray:
        return np.searchsorted(self.edges, values, side="right") - 1

    def to_dict(self) -> dict:
        return {
            "feature_index": self.feature_index,
            "edges": [float(e) for e in self.edges],
            "primary_counts": [int(c) for c in self.primary_counts],
            "secondary_counts": [int(c) for c in self.secondary_counts],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def midpoint(lo: float, hi: float) -> float:
    mid = lo + (hi - lo) / 2.0
    # Adjacent doubles: the midpoint may round onto lo, which would misplace lo.
    return hi if mid <= lo else mid


def _fine_edges(sorted_values: np.ndarray, fine_bins: int) -> np.ndarray:
    lo, hi = sorted_values[0], sorted_values[-1]
    top = np.nextafter(hi, np.inf)
    change = np.flatnonzero(np.diff(sorted_values) > 0)
    if len(change) + 1 <= fine_bins:
        a, b = sorted_values[change], sorted_values[change + 1]
    else:
        # equal-count cells; integer positions keep the grid for 2B a refinement of B
        n = len(sorted_values)
        pos = (np.arange(1, fine_bins, dtype=np.int64) * n) // fine_bins
        a, b = sorted_values[pos - 1], sorted_values[pos]
        keep = a < b
        a, b = a[keep], b[keep]
    mids = a + (b - a) / 2.0
    mids = np.where(mids <= a, b, mids)
    return np.unique(np.concatenate(([lo], mids, [top])))


def _bin_counts(sorted_values, cum_primary, edges):
    # cum_primary[i] = number of primary objects among the i smallest values
    pos = np.searchsorted(sorted_values, edges, side="left")
    pos[-1] = len(sorted_values)
    total = np.diff(pos)
    primary = np.diff(cum_primary[pos])
    return primary, total - primary


def _merge_pure_runs(edges, primary, secondary, cfg: HistogramConfig) -> np.ndarray:
    """Edges left after collapsing runs of same-class pure (or empty) bins."""
    total = primary + secondary
    # label: 0 empty, 1 pure primary, 2 pure secondary, 3 mixed
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = primary / total
    label = np.full(len(total), 3, dtype=np.int8)
    label[total == 0] = 0
    pure_p = (total > 0) & (frac >= cfg.p_pure)
    pure_s = (total > 0) & (1.0 - frac >= cfg.p_pure)
    # Too few objects to judge mixing: treat as pure of its majority class.
    sparse = (total > 0) & (total < cfg.min_bin_count)
    label[pure_p | (sparse & (frac >= 0.5))] = 1
    label[pure_s | (sparse & (frac < 0.5))] = 2

    keep = [0]
    cur = label[0]
    for i in range(1, len(label)):
        lab = label[i]
        if lab == 0:
            continue
        if cur == 0 or (lab == cur and lab != 3):
            cur = lab
            continue
        keep.append(i)
        cur = lab
    keep.append(len(label))
    if len(keep) > 2:
        keep.extend(_outer_seams(total, keep))
    return edges[np.unique(keep)]


def _outer_seams(total, keep) -> list:
    """Fine edges that split the extreme fine bin off each merged outer bin.

    The best rule may flip everything except the objects at one end of the
    range, or only those objects; neither is reachable through interior edges
    of a merged outer run, so its extreme fine bin stays separate.
    """
    nonempty = np.flatnonzero(total)
    seams = []
    a, b = keep[0], keep[1]
    inner = nonempty[(nonempty > a) & (nonempty < b)]
    if len(inner):
        seams.append(int(inner[0]))
    a, b = keep[-2], keep[-1]
    inner = nonempty[(nonempty >= a) & (nonempty < b)]
    if len(inner) > 1:
        seams.append(int(inner[-1]))
    return seams


def histogram_from_sorted(sorted_values, sorted_primary, cfg: HistogramConfig,
                          feature_index: int = 0, cum_primary=None) -> ReducedHistogram:
    """Build from values already in ascending order (the search's hot path)."""
    if len(sorted_values) == 0:
        raise ValueError("values must be nonempty")
    if sorted_values[0] == sorted_values[-1]:
        raise ConstantFeatureError(f"feature {feature_index} is constant")
    if cum_primary is None:
        cum_primary = np.concatenate(([0], np.cumsum(sorted_primary, dtype=np.int64)))
    edges = _fine_edges(sorted_values, cfg.fine_bins)
    primary, secondary = _bin_counts(sorted_values, cum_primary, edges)
    edges = _merge_pure_runs(edges, primary, secondary, cfg)
    primary, secondary = _bin_counts(sorted_values, cum_primary, edges)
    for arr in (edges, primary, secondary):
        arr.setflags(write=False)
    return ReducedHistogram(feature_index, edges, primary, secondary)


def build_reduced_histogram(values, classes, cfg: HistogramConfig = HistogramConfig(),
                            feature_index: int = 0) -> ReducedHistogram:
    """``classes`` is True for primary (flip-target) objects."""
    values = np.asarray(values, dtype=np.float64)
    classes = np.asarray(classes, dtype=bool)
    if values.shape != classes.shape:
        raise ValueError("values and classes must have the same length")
    order = np.argsort(values, kind="stable")
    return histogram_from_sorted(values[order], classes[order], cfg, feature_index)


def candidate_thresholds(h: ReducedHistogram) -> np.ndarray:
    return h.edges[1:-1].copy()


def cumulative_counts(h: ReducedHistogram):
    return np.cumsum(h.primary_counts), np.cumsum(h.secondary_counts)
