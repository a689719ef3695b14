"""Applying paths to data, per-level traces, and the JSON / text report."""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from .data import ConfusionCounts, LabeledDataset, Mode
from .histogram import HistogramConfig
from .objective import DeltaMetrics, ObjectiveConfig
from .search import DiscriminationPath, Rule, SearchGraph, enumerate_paths, select_optimal_path

SCHEMA_VERSION = 1

_HEADERS = {
    Mode.REDUCE_FP: ("dFP", "% FP reduction", "dTP", "% TP loss"),
    Mode.IMPROVE_TP: ("dTP", "% TP gain", "dFP", "% FP gain"),
}


def fmt_pct(fraction: float) -> str:
    return f"{100.0 * fraction:.2f}%"


@dataclass(frozen=True)
class TraceRow:
    node_id: int
    level: int
    primary_count: int
    primary_pct: float
    secondary_count: int
    secondary_pct: float


@dataclass
class SearchReport:
    config: dict
    feature_names: List[str]
    base: ConfusionCounts
    primary_total: int
    secondary_total: int
    paths: List[DiscriminationPath]
    selected: Optional[DiscriminationPath]
    trace: List[TraceRow]
    n_nodes: int = 0
    alpha_tuning: Optional[dict] = None
    timing: Optional[dict] = field(default=None, compare=False)

    @property
    def mode(self) -> Mode:
        return Mode(self.config["mode"])


def path_mask(rules: Sequence[Rule], features: np.ndarray) -> np.ndarray:
    hit = np.ones(features.shape[0], dtype=bool)
    for r in rules:
        hit &= r.matches(features[:, r.feature_index])
    return hit


def _rules_of(path) -> Sequence[Rule]:
    return path.rules if isinstance(path, DiscriminationPath) else tuple(path)


def apply_path(path, ds: LabeledDataset, mode: Mode) -> np.ndarray:
    """Revised predictions: matching objects in the mode's scope get flipped."""
    mode = Mode(mode)
    rules = _rules_of(path)
    pred = ds.base_pred.copy()
    if not rules:
        return pred
    scope = ds.base_pred if mode is Mode.REDUCE_FP else ~ds.base_pred
    flip = scope & path_mask(rules, ds.features)
    pred[flip] = ~pred[flip]
    return pred


def path_metrics(path, ds: LabeledDataset, mode: Mode) -> DeltaMetrics:
    mode = Mode(mode)
    rules = _rules_of(path)
    scope = ds.base_pred if mode is Mode.REDUCE_FP else ~ds.base_pred
    wrong = ds.truth != ds.base_pred
    hit = scope & path_mask(rules, ds.features) if rules else np.zeros(ds.n_rows, dtype=bool)
    return DeltaMetrics(
        primary_count=int(np.count_nonzero(hit & wrong)),
        secondary_count=int(np.count_nonzero(hit & ~wrong)),
        primary_total=int(np.count_nonzero(scope & wrong)),
        secondary_total=int(np.count_nonzero(scope & ~wrong)),
    )


def depth_trace(graph: SearchGraph, path) -> List[TraceRow]:
    node_id = path.node_id if isinstance(path, DiscriminationPath) else int(path)
    return [
        TraceRow(n.node_id, n.depth + 1, n.metrics.primary_count, n.metrics.primary_pct,
                 n.metrics.secondary_count, n.metrics.secondary_pct)
        for n in graph.ancestry(node_id)
    ]


def config_echo(cfg: ObjectiveConfig, hist_cfg: HistogramConfig) -> dict:
    return {
        "mode": cfg.mode.value,
        "alpha_prime": cfg.alpha_prime,
        "target": cfg.target,
        "constraint": cfg.constraint,
        "delta_max": cfg.delta_max,
        "total_depth": cfg.total_depth,
        "beam_width": cfg.beam_width,
        "fine_bins": hist_cfg.fine_bins,
        "p_pure": hist_cfg.p_pure,
        "min_bin_count": hist_cfg.min_bin_count,
    }


def build_report(graph: SearchGraph, base: ConfusionCounts) -> SearchReport:
    paths = enumerate_paths(graph)
    selected = select_optimal_path(paths) if paths else None
    return SearchReport(
        config=config_echo(graph.cfg, graph.hist_cfg),
        feature_names=list(graph.feature_names),
        base=base,
        primary_total=graph.primary_total,
        secondary_total=graph.secondary_total,
        paths=paths,
        selected=selected,
        trace=depth_trace(graph, selected) if selected else [],
        n_nodes=len(graph),
    )


# -- serialisation -----------------------------------------------------------

def _rule_to_dict(r: Rule, names) -> dict:
    return {"feature": names[r.feature_index], "feature_index": r.feature_index,
            "op": r.comparator, "threshold": r.threshold}


def _path_to_dict(p: DiscriminationPath, rank: int, names) -> dict:
    return {
        "rank": rank,
        "node_id": p.node_id,
        "depth": p.depth,
        "rules": [_rule_to_dict(r, names) for r in p.rules],
        "primary_count": p.metrics.primary_count,
        "secondary_count": p.metrics.secondary_count,
        "primary_pct": p.metrics.primary_pct,
        "secondary_pct": p.metrics.secondary_pct,
        "score": p.score,
        "satisfied": p.satisfied,
    }


def report_to_dict(report: SearchReport) -> dict:
    names = report.feature_names
    out = {
        "schema_version": SCHEMA_VERSION,
        "config": dict(report.config),
        "features": list(names),
        "base": asdict(report.base),
        "primary_label": report.mode.primary_name,
        "secondary_label": report.mode.secondary_name,
        "primary_total": report.primary_total,
        "secondary_total": report.secondary_total,
        "n_nodes": report.n_nodes,
        "selected_node": report.selected.node_id if report.selected else None,
        "paths": [_path_to_dict(p, i + 1, names) for i, p in enumerate(report.paths)],
        "trace": [asdict(r) for r in report.trace],
    }
    if report.alpha_tuning is not None:
        out["alpha_tuning"] = dict(report.alpha_tuning)
    if report.timing is not None:
        out["timing"] = dict(report.timing)
    return out


def _path_from_dict(d: dict, totals) -> DiscriminationPath:
    rules = tuple(Rule(r["feature_index"], r["op"], r["threshold"]) for r in d["rules"])
    dm = DeltaMetrics(d["primary_count"], d["secondary_count"], *totals)
    return DiscriminationPath(d["node_id"], d["depth"], rules, dm, d["score"], d["satisfied"])


def report_from_dict(d: dict) -> SearchReport:
    totals = (d["primary_total"], d["secondary_total"])
    paths = [_path_from_dict(p, totals) for p in d["paths"]]
    selected = next((p for p in paths if p.node_id == d["selected_node"]), None)
    return SearchReport(
        config=dict(d["config"]),
        feature_names=list(d["features"]),
        base=ConfusionCounts(**d["base"]),
        primary_total=d["primary_total"],
        secondary_total=d["secondary_total"],
        paths=paths,
        selected=selected,
        trace=[TraceRow(**r) for r in d["trace"]],
        n_nodes=d["n_nodes"],
        alpha_tuning=d.get("alpha_tuning"),
        timing=d.get("timing"),
    )


def parse_report(text: str) -> SearchReport:
    try:
        return report_from_dict(json.loads(text))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed report: {exc}") from exc


def format_table(report: SearchReport, top: Optional[int] = None) -> str:
    h1, h2, h3, h4 = _HEADERS[report.mode]
    lines = [f"{'node':>6}  {'level':>5}  {h1:>7}  {h2:>15}  {h3:>7}  {h4:>12}"]
    for r in report.trace:
        lines.append(f"{r.node_id:>6}  {r.level:>5}  {r.primary_count:>7}  {fmt_pct(r.primary_pct):>15}"
                     f"  {r.secondary_count:>7}  {fmt_pct(r.secondary_pct):>12}")
    if report.paths:
        lines.append("")
        lines.append(f"{'rank':>4}  {'score':>9}  {'ok':>2}  {h2:>15}  {h4:>12}  rules")
        shown = report.paths if top is None else report.paths[:top]
        for i, p in enumerate(shown, 1):
            rules = " & ".join(r.describe(report.feature_names) for r in p.rules)
            lines.append(f"{i:>4}  {p.score:>9.4f}  {'y' if p.satisfied else 'n':>2}"
                         f"  {fmt_pct(p.metrics.primary_pct):>15}  {fmt_pct(p.metrics.secondary_pct):>12}  {rules}")
    return "\n".join(lines) + "\n"


def emit_report(report: SearchReport, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(report_to_dict(report), indent=2) + "\n"
    if fmt == "text":
        return format_table(report)
    raise ValueError(f"unknown report format {fmt!r}")


def write_atomic(path, text: str) -> None:
    """Write via a temp file in the destination directory so failures leave nothing behind."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def predictions_csv(ds: LabeledDataset, revised: np.ndarray) -> str:
    lines = ["object_id,old_prediction,new_prediction"]
    for rid, old, new in zip(ds.row_ids, ds.base_pred, revised):
        lines.append(f"{int(rid)},{int(old)},{int(new)}")
    return "\n".join(lines) + "\n"
