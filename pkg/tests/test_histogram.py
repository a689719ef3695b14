import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from discpath import (ConstantFeatureError, HistogramConfig, ReducedHistogram,
                      build_reduced_histogram, candidate_thresholds, cumulative_counts)


def recount(values, classes, edges):
    """Per-object assignment straight from the definition of a bin."""
    p = np.zeros(len(edges) - 1, int)
    s = np.zeros(len(edges) - 1, int)
    for v, c in zip(values, classes):
        hits = [i for i in range(len(edges) - 1) if edges[i] <= v < edges[i + 1]]
        assert len(hits) == 1
        (p if c else s)[hits[0]] += 1
    return p, s


def test_separable_gives_two_zones():
    values = np.concatenate([np.linspace(0, 1, 200), np.linspace(1.5, 3, 300)])
    classes = np.arange(500) < 200
    h = build_reduced_histogram(values, classes)
    # two coarse pure zones, at most one fine cell straddling the class boundary,
    # and a one-cell seam at each end of the range
    assert h.n_bins <= 5
    mixed = (h.primary_counts > 0) & (h.secondary_counts > 0)
    assert mixed.sum() <= 1
    assert h.primary_counts.max() > 190 and h.secondary_counts.max() > 290
    assert h.primary_counts.sum() == 200 and h.secondary_counts.sum() == 300


def test_overlapping_gaussians_reduce_and_stay_pure(rng):
    classes = rng.random(10_000) < 0.5
    values = rng.normal(size=10_000) + 2.0 * classes
    cfg = HistogramConfig()
    h = build_reduced_histogram(values, classes, cfg)
    assert h.n_bins < cfg.fine_bins < 10_000
    p, s = recount(values, classes, h.edges)
    assert np.array_equal(p, h.primary_counts) and np.array_equal(s, h.secondary_counts)
    # a bin holding more than two grid cells' worth of objects is a merged run
    cell = len(values) / cfg.fine_bins
    merged = (p + s) > 2 * cell
    assert merged.any()
    for a, b in zip(p[merged], s[merged]):
        assert max(a, b) / (a + b) >= cfg.p_pure


def test_constant_feature():
    with pytest.raises(ConstantFeatureError):
        build_reduced_histogram(np.full(10, 3.7), np.arange(10) % 2 == 0)


def test_length_mismatch():
    with pytest.raises(ValueError):
        build_reduced_histogram([1.0, 2.0], [True])


def test_config_validation():
    with pytest.raises(ValueError):
        HistogramConfig(fine_bins=1)
    with pytest.raises(ValueError):
        HistogramConfig(p_pure=0.5)


def _hist(edges, p, s):
    return ReducedHistogram(0, np.asarray(edges, float), np.asarray(p), np.asarray(s))


def test_candidate_thresholds():
    edges = np.arange(13.0)
    assert len(candidate_thresholds(_hist(edges, [1] * 12, [1] * 12))) == 11
    assert candidate_thresholds(_hist([0.0, 1.0], [3], [0])).tolist() == []
    assert candidate_thresholds(_hist([0.0, 0.5, 2.0, 9.0], [1, 1, 1], [0, 0, 0])).tolist() == [0.5, 2.0]


def test_cumulative_counts():
    p, s = cumulative_counts(_hist([0, 1, 2, 3], [2, 0, 5], [0, 0, 0]))
    assert p.tolist() == [2, 2, 7] and s.tolist() == [0, 0, 0]


def test_cumulative_counts_naive_loop(rng):
    a, b = rng.integers(0, 9, 50), rng.integers(0, 9, 50)
    p, s = cumulative_counts(_hist(np.arange(51.0), a, b))
    run_a = run_b = 0
    for i in range(50):
        run_a += int(a[i])
        run_b += int(b[i])
        assert (p[i], s[i]) == (run_a, run_b)


def test_json_dump_roundtrip(rng):
    h = build_reduced_histogram(rng.normal(size=100), rng.random(100) < 0.5)
    d = json.loads(h.to_json())
    assert d["edges"] == h.edges.tolist()
    assert sum(d["primary_counts"]) + sum(d["secondary_counts"]) == 100


def test_exact_resolution_exposes_every_value_boundary(rng):
    values = rng.integers(0, 40, 300).astype(float)
    classes = rng.random(300) < 0.5
    h = build_reduced_histogram(values, classes, HistogramConfig(fine_bins=64, p_pure=1.0))
    # every bin holds a single distinct value or a pure run of values
    for lo, hi in zip(h.edges[:-1], h.edges[1:]):
        inside = (values >= lo) & (values < hi)
        if len(np.unique(values[inside])) > 1:
            assert classes[inside].all() or not classes[inside].any()


finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@settings(max_examples=200)
@given(st.lists(st.tuples(finite, st.booleans()), min_size=2, max_size=200),
       st.integers(2, 300), st.sampled_from([0.6, 0.9, 0.99, 1.0]))
def test_histogram_invariants(pairs, fine_bins, p_pure):
    values = np.array([v for v, _ in pairs])
    classes = np.array([c for _, c in pairs])
    cfg = HistogramConfig(fine_bins=fine_bins, p_pure=p_pure)
    if values.min() == values.max():
        with pytest.raises(ConstantFeatureError):
            build_reduced_histogram(values, classes, cfg)
        return
    h = build_reduced_histogram(values, classes, cfg)
    assert np.all(np.diff(h.edges) > 0)
    assert h.edges[0] == values.min() and h.edges[-1] > values.max()
    assert h.total == len(values)
    assert h.n_bins <= fine_bins
    p, s = recount(values, classes, h.edges)
    assert np.array_equal(p, h.primary_counts) and np.array_equal(s, h.secondary_counts)
    # adjacent pure bins never share a majority class: those runs were merged,
    # except the seam that isolates an extreme value in a primary-free outer bin
    tot = p + s
    label = np.where(p >= p_pure * tot, 1, np.where(s >= p_pure * tot, 2, 3))
    assert np.all(tot > 0)
    last = len(label) - 2
    for i, (a, b) in enumerate(zip(label[:-1], label[1:])):
        if a == b and a != 3:
            assert i == 0 or i == last
