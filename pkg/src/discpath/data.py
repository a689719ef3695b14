"""Labeled datasets, confusion quadrants and the per-mode working subset."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd

log = logging.getLogger(__name__)

_LABELS = {"0": False, "1": True, "negative": False, "positive": True}


class SchemaError(ValueError):
    """Input columns or labels do not match the requested schema."""


class EmptySubsetError(ValueError):
    """Nothing left to refine: no usable rows or no objects in the working subset."""


class Mode(str, enum.Enum):
    REDUCE_FP = "reduce-fp"
    IMPROVE_TP = "improve-tp"

    @property
    def primary_name(self) -> str:
        return "fp_cleared" if self is Mode.REDUCE_FP else "fn_rescued"

    @property
    def secondary_name(self) -> str:
        return "tp_lost" if self is Mode.REDUCE_FP else "tn_flipped"


@dataclass(frozen=True)
class Schema:
    truth: str
    prediction: str
    # None means every remaining column is a feature.
    features: Optional[Sequence[str]] = None
    exclude: Sequence[str] = ()


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    features: np.ndarray
    feature_names: tuple
    truth: np.ndarray
    base_pred: np.ndarray
    row_ids: np.ndarray = None
    dropped_rows: int = 0

    def __post_init__(self):
        X = np.ascontiguousarray(self.features, dtype=np.float64)
        if X.ndim != 2:
            raise ValueError("features must be a 2-d matrix")
        n, m = X.shape
        if m != len(self.feature_names):
            raise ValueError(f"{m} feature columns but {len(self.feature_names)} names")
        truth = np.asarray(self.truth, dtype=bool)
        pred = np.asarray(self.base_pred, dtype=bool)
        if truth.shape != (n,) or pred.shape != (n,):
            raise ValueError("truth and base_pred must have one entry per row")
        if np.isnan(X).any():
            raise ValueError("features contain NaN")
        row_ids = np.arange(n) if self.row_ids is None else np.asarray(self.row_ids, dtype=np.int64)
        for arr in (X, truth, pred, row_ids):
            arr.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "truth", truth)
        object.__setattr__(self, "base_pred", pred)
        object.__setattr__(self, "row_ids", row_ids)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def feature_index(self, name: str) -> int:
        try:
            return self.feature_names.index(name)
        except ValueError:
            raise SchemaError(f"unknown feature {name!r}") from None


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True, eq=False)
class WorkingSubset:
    """Rows a mode may flip.

    ``is_primary`` marks, per subset row, the objects whose flip is the goal
    (FP under reduce-fp, FN under improve-tp); the rest are the objects whose
    flip costs the secondary metric (TP, TN respectively).
    """

    mode: Mode
    indices: np.ndarray
    is_primary: np.ndarray
    roles: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.indices)

    @property
    def primary_total(self) -> int:
        return int(np.count_nonzero(self.is_primary))

    @property
    def secondary_total(self) -> int:
        return len(self.indices) - self.primary_total


def _parse_labels(col: pd.Series, name: str) -> np.ndarray:
    raw = col.astype(str).str.strip().str.lower()
    bad = ~raw.isin(list(_LABELS))
    if bad.any():
        example = col[bad].iloc[0]
        raise SchemaError(f"column {name!r}: label {example!r} is not one of 0/1/negative/positive")
    return raw.map(_LABELS).to_numpy(dtype=bool)


def load_dataset(path, schema: Schema) -> LabeledDataset:
    """Read a headered CSV and drop rows whose features are missing or non-numeric."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    try:
        header = pd.read_csv(path, nrows=0, encoding="utf-8").columns
    except pd.errors.EmptyDataError:
        raise EmptySubsetError("zero usable rows") from None
    labels = {c: str for c in (schema.truth, schema.prediction) if c in header}
    df = pd.read_csv(path, dtype=labels, encoding="utf-8")

    for col in (schema.truth, schema.prediction):
        if col not in df.columns:
            raise SchemaError(f"column {col!r} not found in {path}")
    if schema.features is None:
        names = [c for c in df.columns if c not in (schema.truth, schema.prediction)]
    else:
        names = list(schema.features)
        missing = [c for c in names if c not in df.columns]
        if missing:
            raise SchemaError(f"feature columns not found: {', '.join(missing)}")
    names = [c for c in names if c not in set(schema.exclude)]
    if not names:
        raise SchemaError("schema selects no feature columns")

    X = np.empty((len(df), len(names)), dtype=np.float64)
    for j, name in enumerate(names):
        col = df[name]
        if col.dtype == object:
            col = pd.to_numeric(col.str.strip(), errors="coerce")
        X[:, j] = col.to_numpy(dtype=np.float64, na_value=np.nan)
    keep = np.isfinite(X).all(axis=1)
    dropped = int((~keep).sum())
    if dropped:
        log.info("dropped %d rows with missing or non-numeric features", dropped)
    if not keep.any():
        raise EmptySubsetError("zero usable rows")

    kept = df.loc[keep]
    return LabeledDataset(
        features=X[keep],
        feature_names=tuple(names),
        truth=_parse_labels(kept[schema.truth], schema.truth),
        base_pred=_parse_labels(kept[schema.prediction], schema.prediction),
        row_ids=np.flatnonzero(keep),
        dropped_rows=dropped,
    )


def confusion_counts(ds: LabeledDataset) -> ConfusionCounts:
    t, p = ds.truth, ds.base_pred
    return ConfusionCounts(
        tp=int(np.count_nonzero(t & p)),
        fp=int(np.count_nonzero(~t & p)),
        tn=int(np.count_nonzero(~t & ~p)),
        fn=int(np.count_nonzero(t & ~p)),
    )


def working_subset(ds: LabeledDataset, mode: Mode) -> WorkingSubset:
    mode = Mode(mode)
    if mode is Mode.REDUCE_FP:
        indices = np.flatnonzero(ds.base_pred)
        roles = {"primary": "fp", "secondary": "tp"}
    else:
        indices = np.flatnonzero(~ds.base_pred)
        roles = {"primary": "fn", "secondary": "tn"}
    if len(indices) == 0:
        kind = "positives" if mode is Mode.REDUCE_FP else "negatives"
        raise EmptySubsetError(f"no base-predicted {kind}; nothing to refine")
    # Misclassified objects are the flip targets in both modes.
    is_primary = ds.truth[indices] != ds.base_pred[indices]
    return WorkingSubset(mode=mode, indices=indices, is_primary=is_primary, roles=roles)
