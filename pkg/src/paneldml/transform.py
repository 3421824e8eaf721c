"""Panel data approaches and covariate pre-processing.

``apply_approach`` turns a :class:`PanelDataset` into the learning task for
one of four approaches:

* ``"cre"`` -- outcome and treatment untouched; predictors are the raw
  covariates plus their subject means and the subject mean of the
  treatment (correlated random effects device).
* ``"wg-approx"`` -- outcome, treatment and covariates demeaned within
  subject.
* ``"fd-exact"`` -- outcome and treatment first-differenced; predictors
  are the current and one-period-lagged covariates; each subject loses its
  first row.
* ``"pooled"`` -- identity (repeated cross-sections).

``apply_covariate_transform`` then optionally rescales or expands the
predictor set; approaches apply first, transforms second.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import combinations_with_replacement

import numpy as np

from .errors import NonFiniteInput, TimeGapError
from .panel_data import PanelDataset

__all__ = [
    "APPROACHES",
    "X_TRANSFORMS",
    "DEFAULT_APPROACH",
    "TransformedTask",
    "apply_approach",
    "apply_covariate_transform",
    "poly_feature_count",
]

APPROACHES = ("fd-exact", "wg-approx", "cre", "pooled")
X_TRANSFORMS = ("no", "poly", "minmax")
DEFAULT_APPROACH = "fd-exact"


@dataclass(frozen=True)
class TransformedTask:
    """Approach-specific learning task over the retained rows.

    ``row_map`` maps each retained row back to its row in the sorted
    source dataset. ``expandable`` flags the feature columns that a
    polynomial expansion operates on; the subject-mean treatment column
    of the CRE approach is carried through untouched. ``treatment_only``
    flags columns that belong in the treatment nuisance's predictor set
    but not the outcome side's (again the CRE subject-mean treatment,
    which exists to soak up the treatment-side random effect).
    """

    y_t: np.ndarray
    d_t: np.ndarray
    features: np.ndarray
    feature_names: tuple[str, ...]
    row_map: np.ndarray
    panel_id: np.ndarray
    cluster_id: np.ndarray
    approach: str
    expandable: np.ndarray
    treatment_only: np.ndarray

    @property
    def n_rows(self) -> int:
        return self.y_t.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def outcome_features(self) -> np.ndarray:
        """Predictor matrix for the outcome-side nuisances."""
        if self.treatment_only.any():
            return self.features[:, ~self.treatment_only]
        return self.features

    def treatment_features(self) -> np.ndarray:
        """Predictor matrix for the treatment nuisance (the full set)."""
        return self.features


def _subject_means(values: np.ndarray, starts: np.ndarray) -> np.ndarray:
    """Per-subject means of a vector or matrix, one row per subject."""
    counts = np.diff(starts)
    sums = np.add.reduceat(values, starts[:-1], axis=0)
    if values.ndim == 1:
        return sums / counts
    return sums / counts[:, None]


def apply_approach(
    data: PanelDataset, approach: str = DEFAULT_APPROACH, strict_gaps: bool = False
) -> TransformedTask:
    """Apply the selected panel data approach.

    ``strict_gaps`` only affects first-differencing: when True, a subject
    whose consecutive observed time ids do not increase by exactly 1
    raises :class:`TimeGapError`; when False (default), differencing runs
    over consecutive observed rows regardless of calendar gaps.
    """
    if approach not in APPROACHES:
        raise ValueError(f"approach must be one of {APPROACHES}, got {approach!r}")
    starts = data.subject_starts
    n = data.n_obs
    x_names = data.names.x

    if approach == "pooled":
        return TransformedTask(
            y_t=data.y.copy(),
            d_t=data.d.copy(),
            features=data.x.copy(),
            feature_names=tuple(x_names),
            row_map=np.arange(n),
            panel_id=data.panel_id.copy(),
            cluster_id=data.cluster_id.copy(),
            approach=approach,
            expandable=np.ones(data.p, dtype=bool),
            treatment_only=np.zeros(data.p, dtype=bool),
        )

    if approach == "cre":
        counts = np.diff(starts)
        x_bar = np.repeat(_subject_means(data.x, starts), counts, axis=0)
        d_bar = np.repeat(_subject_means(data.d, starts), counts)
        features = np.hstack([data.x, x_bar, d_bar[:, None]])
        names = (
            tuple(x_names)
            + tuple(f"m_{c}" for c in x_names)
            + (f"m_{data.names.d}",)
        )
        expandable = np.ones(features.shape[1], dtype=bool)
        expandable[-1] = False
        treatment_only = np.zeros(features.shape[1], dtype=bool)
        treatment_only[-1] = True
        return TransformedTask(
            y_t=data.y.copy(),
            d_t=data.d.copy(),
            features=features,
            feature_names=names,
            row_map=np.arange(n),
            panel_id=data.panel_id.copy(),
            cluster_id=data.cluster_id.copy(),
            approach=approach,
            expandable=expandable,
            treatment_only=treatment_only,
        )

    if approach == "wg-approx":
        counts = np.diff(starts)
        y_t = data.y - np.repeat(_subject_means(data.y, starts), counts)
        d_t = data.d - np.repeat(_subject_means(data.d, starts), counts)
        features = data.x - np.repeat(_subject_means(data.x, starts), counts, axis=0)
        return TransformedTask(
            y_t=y_t,
            d_t=d_t,
            features=features,
            feature_names=tuple(x_names),
            row_map=np.arange(n),
            panel_id=data.panel_id.copy(),
            cluster_id=data.cluster_id.copy(),
            approach=approach,
            expandable=np.ones(data.p, dtype=bool),
            treatment_only=np.zeros(data.p, dtype=bool),
        )

    # fd-exact: drop each subject's first row, difference against the
    # previous observed row (rows are contiguous per subject).
    keep = np.ones(n, dtype=bool)
    keep[starts[:-1]] = False
    ret = np.flatnonzero(keep)
    prev = ret - 1
    if strict_gaps:
        gaps = np.flatnonzero(data.time_id[ret] - data.time_id[prev] != 1.0)
        if gaps.size:
            i = int(gaps[0])
            raise TimeGapError(
                str(data.panel_id[ret[i]]),
                _as_scalar(data.time_id[prev[i]]),
                _as_scalar(data.time_id[ret[i]]),
            )
    features = np.hstack([data.x[ret], data.x[prev]])
    names = tuple(x_names) + tuple(f"{c}_lag1" for c in x_names)
    return TransformedTask(
        y_t=data.y[ret] - data.y[prev],
        d_t=data.d[ret] - data.d[prev],
        features=features,
        feature_names=names,
        row_map=ret,
        panel_id=data.panel_id[ret].copy(),
        cluster_id=data.cluster_id[ret].copy(),
        approach=approach,
        expandable=np.ones(features.shape[1], dtype=bool),
        treatment_only=np.zeros(features.shape[1], dtype=bool),
    )


def poly_feature_count(q: int) -> int:
    """Number of monomials of degree 1..3 over q columns."""
    return q + q * (q + 1) // 2 + q * (q + 1) * (q + 2) // 6


def apply_covariate_transform(task: TransformedTask, kind: str = "no") -> TransformedTask:
    """Apply the selected covariate pre-processing to the task features.

    * ``"no"``: identity.
    * ``"poly"``: every monomial of degree 1, 2 and 3 over the expandable
      columns, ordered by degree and then lexicographically by column
      index tuple; non-expandable columns are appended unchanged.
    * ``"minmax"``: each column rescaled to (x - min) / (max - min) with
      min/max taken over the retained rows; constant columns map to 0.
    """
    if kind not in X_TRANSFORMS:
        raise ValueError(f"transform must be one of {X_TRANSFORMS}, got {kind!r}")
    if not np.all(np.isfinite(task.features)):
        raise NonFiniteInput("feature matrix")
    if kind == "no":
        return task

    if kind == "minmax":
        lo = task.features.min(axis=0)
        hi = task.features.max(axis=0)
        span = hi - lo
        safe = np.where(span > 0, span, 1.0)
        scaled = (task.features - lo) / safe
        scaled[:, span == 0] = 0.0
        return replace(task, features=scaled)

    base_idx = np.flatnonzero(task.expandable)
    passthrough = np.flatnonzero(~task.expandable)
    cols = [task.features[:, j] for j in base_idx]
    base_names = [task.feature_names[j] for j in base_idx]
    out_cols: list[np.ndarray] = []
    out_names: list[str] = []
    for degree in (1, 2, 3):
        for combo in combinations_with_replacement(range(len(cols)), degree):
            col = cols[combo[0]].copy()
            for j in combo[1:]:
                col = col * cols[j]
            out_cols.append(col)
            out_names.append("*".join(base_names[j] for j in combo))
    n_monomials = len(out_cols)
    for j in passthrough:
        out_cols.append(task.features[:, j])
        out_names.append(task.feature_names[j])
    features = np.column_stack(out_cols)
    treatment_only = np.zeros(features.shape[1], dtype=bool)
    treatment_only[n_monomials:] = task.treatment_only[passthrough]
    return replace(
        task,
        features=features,
        feature_names=tuple(out_names),
        expandable=np.ones(features.shape[1], dtype=bool),
        treatment_only=treatment_only,
    )


def _as_scalar(t: float):
    return int(t) if float(t).is_integer() else float(t)
