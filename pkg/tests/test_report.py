import json

import numpy as np
import pytest

from discpath import (ConfusionCounts, DeltaMetrics, HistogramConfig, Mode, ObjectiveConfig, Rule,
                      apply_path, confusion_counts, depth_trace, emit_report, mine, parse_report)
from discpath.oracle import naive_apply
from discpath.report import (build_report, fmt_pct, format_table, path_metrics, predictions_csv,
                             report_to_dict, write_atomic)
from discpath.search import SearchGraph, SearchNode, dfs_search
from conftest import make_dataset, random_dataset


def cfg(**kw):
    base = dict(mode=Mode.REDUCE_FP, constraint=0.03, total_depth=3)
    base.update(kw)
    return ObjectiveConfig(**base)


def anchor_graph(tp_total=1824):
    """Nodes 2 -> 7 -> 28 carrying the published per-depth counts."""
    rows = [(2, 0, 820, 259), (7, 1, 607, 178), (28, 2, 330, 51)]
    nodes = [SearchNode(0, -1, children=[2])]
    parent = 0
    for node_id, depth, p, s in rows:
        dm = DeltaMetrics(p, s, 1884, tp_total)
        nodes.append(SearchNode(node_id, depth, parent, Rule(depth, "<", 0.5), dm,
                                2 * dm.primary_pct - dm.secondary_pct, dm.secondary_pct < 0.03))
        parent = node_id
    return SearchGraph(nodes, cfg(alpha_prime=2.0), HistogramConfig(), ("a", "b", "c"), 1884, tp_total)


def test_apply_path_example2(ex2):
    rule = Rule(0, ">=", 0.695)
    revised = apply_path([rule], ex2, Mode.IMPROVE_TP)
    flipped = revised != ex2.base_pred
    assert flipped.sum() == 30
    assert (flipped & ex2.truth).sum() == 27 and (flipped & ~ex2.truth).sum() == 3
    c = confusion_counts(make_dataset(ex2.features, ex2.truth, revised))
    assert (c.tp, c.fp, c.tn, c.fn) == (27, 3, 34, 19)


def test_apply_path_empty_is_identity(ex1):
    assert np.array_equal(apply_path([], ex1, Mode.REDUCE_FP), ex1.base_pred)


def test_apply_path_adjusts_counts_by_metrics(rng):
    ds = random_dataset(rng, n=800, m=5)
    for mode in Mode:
        base = confusion_counts(ds)
        for p in mine(ds, cfg(mode=mode, constraint=0.1)).paths:
            dm = naive_apply(p.rules, ds, mode)
            revised = apply_path(p, ds, mode)
            assert (revised != ds.base_pred).sum() == dm.primary_count + dm.secondary_count
            c = confusion_counts(make_dataset(ds.features, ds.truth, revised))
            if mode is Mode.REDUCE_FP:
                expect = (base.tp - dm.secondary_count, base.fp - dm.primary_count,
                          base.tn + dm.primary_count, base.fn + dm.secondary_count)
            else:
                expect = (base.tp + dm.primary_count, base.fp + dm.secondary_count,
                          base.tn - dm.secondary_count, base.fn - dm.primary_count)
            assert (c.tp, c.fp, c.tn, c.fn) == expect


def test_anchor_tp_total_back_solve():
    # every integer base-TP total consistent with all three printed percentages
    fits = [n for n in range(259, 20_000)
            if fmt_pct(259 / n) == "14.20%" and fmt_pct(178 / n) == "9.76%" and fmt_pct(51 / n) == "2.80%"]
    assert 1824 in fits
    assert all(abs(n - 1824) <= 2 for n in fits)


def test_depth_trace_anchor():
    g = anchor_graph()
    rows = depth_trace(g, 28)
    assert [(r.node_id, r.level) for r in rows] == [(2, 1), (7, 2), (28, 3)]
    assert [fmt_pct(r.primary_pct) for r in rows] == ["43.52%", "32.22%", "17.52%"]
    assert [fmt_pct(r.secondary_pct) for r in rows] == ["14.20%", "9.76%", "2.80%"]
    assert [r.primary_count for r in rows] == [820, 607, 330]


def test_depth_trace_single_row():
    assert len(depth_trace(anchor_graph(), 2)) == 1


def _report(rng, **kw):
    ds = random_dataset(rng, n=1500, m=6, signal=0.6)
    return mine(ds, cfg(constraint=0.05, **kw))


def test_json_report_shape_and_roundtrip(rng):
    r = _report(rng)
    text = emit_report(r, "json")
    doc = json.loads(text)
    assert list(doc) == ["schema_version", "config", "features", "base", "primary_label",
                         "secondary_label", "primary_total", "secondary_total", "n_nodes",
                         "selected_node", "paths", "trace"]
    assert len(doc["paths"]) == 39 and [p["rank"] for p in doc["paths"]] == list(range(1, 40))
    back = parse_report(text)
    assert back.paths == r.paths and back.selected == r.selected and back.trace == r.trace
    assert back.base == r.base and back.config == r.config
    assert emit_report(back, "json") == text


def test_json_report_deterministic(rng):
    ds = random_dataset(rng, n=1500, m=6)
    a = emit_report(mine(ds, cfg(), threads=1, alpha_ladder=[0.5, 1, 2]))
    b = emit_report(mine(ds, cfg(), threads=3, alpha_ladder=[0.5, 1, 2]))
    assert a == b


def test_empty_report_is_valid_json():
    g = SearchGraph([SearchNode(0, -1)], cfg(), HistogramConfig(), ("a",), 3, 4)
    r = build_report(g, ConfusionCounts(4, 3, 0, 0))
    doc = json.loads(emit_report(r))
    assert doc["paths"] == [] and doc["selected_node"] is None
    assert format_table(parse_report(emit_report(r))).strip().splitlines()[0].split()[0] == "node"
    assert len(format_table(r).strip().splitlines()) == 1


def test_report_percentages_consistent(rng):
    r = _report(rng)
    for p in report_to_dict(r)["paths"]:
        assert p["primary_pct"] == p["primary_count"] / r.primary_total
        assert p["secondary_pct"] == p["secondary_count"] / r.secondary_total


def test_text_table_layout():
    g = anchor_graph()
    r = build_report(g, ConfusionCounts(1824, 1884, 0, 0))
    text = format_table(r)
    for s in ("43.52%", "32.22%", "17.52%", "14.20%", "9.76%", "2.80%", "% FP reduction", "% TP loss"):
        assert s in text


def test_unknown_format(rng):
    with pytest.raises(ValueError):
        emit_report(_report(rng), "xml")


def test_write_atomic_leaves_nothing_on_error(tmp_path):
    target = tmp_path / "missing_dir" / "out.json"
    with pytest.raises(OSError):
        write_atomic(target, "{}")
    assert not target.exists()
    ok = tmp_path / "out.json"
    write_atomic(ok, "{}")
    assert ok.read_text() == "{}" and [p.name for p in tmp_path.iterdir()] == ["out.json"]


def test_predictions_csv(ex1):
    revised = apply_path([Rule(0, "<", 0.865633)], ex1, Mode.REDUCE_FP)
    lines = predictions_csv(ex1, revised).splitlines()
    assert lines[0] == "object_id,old_prediction,new_prediction"
    assert len(lines) == 32
    assert sum(line.endswith(",1,0") for line in lines) == 11
