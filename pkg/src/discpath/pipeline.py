"""load -> partition -> search -> report, shared by the CLI and the scripts."""

from __future__ import annotations

from typing import Optional, Sequence

from .data import LabeledDataset, confusion_counts
from .histogram import ConstantFeatureError, HistogramConfig
from .objective import ObjectiveConfig, tune_alpha
from .report import SearchReport, build_report
from .search import SearchContext, dfs_search


def mine(ds: LabeledDataset, cfg: ObjectiveConfig, hist_cfg: HistogramConfig = HistogramConfig(),
         threads: int = 1, alpha_ladder: Optional[Sequence[float]] = None) -> SearchReport:
    """Mine ranked paths; with ``alpha_ladder`` the alpha' is tuned over the ladder."""
    base = confusion_counts(ds)
    ctx = SearchContext(ds, cfg.mode, hist_cfg, threads)

    def run(c: ObjectiveConfig) -> SearchReport:
        return build_report(dfs_search(ds, c, hist_cfg, ctx=ctx), base)

    if alpha_ladder is None:
        return run(cfg)
    choice = tune_alpha(run, cfg, alpha_ladder)
    report = choice.report
    report.alpha_tuning = {
        "ladder": [float(a) for a in alpha_ladder],
        "chosen": choice.alpha_prime,
        "satisfied": choice.satisfied,
    }
    return report


def root_histograms(ds: LabeledDataset, cfg: ObjectiveConfig, hist_cfg: HistogramConfig) -> list:
    ctx = SearchContext(ds, cfg.mode, hist_cfg)
    out = []
    for f, name in enumerate(ds.feature_names):
        try:
            h = ctx.histogram(f, None)
        except ConstantFeatureError:
            continue
        out.append({"feature": name, **h.to_dict()})
    return out
