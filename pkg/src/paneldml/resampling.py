"""Block-k-fold assignment of subjects to folds and the cross-fitting schedule.

A subject's entire time series always lands in a single fold, so nuisance
learners never see an estimation subject's history during training.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TooManyFolds
from .panel_data import PanelDataset

__all__ = ["FoldAssignment", "draw_block_folds", "cross_fit_schedule"]


@dataclass(frozen=True)
class FoldAssignment:
    """Subject-level fold map plus its per-row expansion.

    Fold subject-counts differ by at most one; every row of a subject
    carries that subject's fold.
    """

    n_folds: int
    seed: int
    subjects: tuple[str, ...]
    subject_fold: dict[str, int]
    row_fold: np.ndarray

    def fold_sizes(self) -> np.ndarray:
        """Subjects per fold."""
        return np.bincount(
            np.array([self.subject_fold[s] for s in self.subjects]),
            minlength=self.n_folds,
        )


def draw_block_folds(data: PanelDataset, n_folds: int, seed: int) -> FoldAssignment:
    """Randomly allocate each subject, with its full series, to one fold.

    Subjects are permuted with a seeded generator and dealt round-robin
    into ``n_folds`` folds, so the assignment is deterministic given the
    seed and balanced to within one subject.
    """
    if n_folds < 2:
        raise ValueError("n_folds must be >= 2")
    n_subjects = data.n_subjects
    if n_folds > n_subjects:
        raise TooManyFolds(n_folds, n_subjects)
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n_subjects)
    subject_fold = {
        str(data.subjects[perm[i]]): i % n_folds for i in range(n_subjects)
    }
    counts = np.diff(data.subject_starts)
    per_subject = np.array([subject_fold[str(s)] for s in data.subjects])
    row_fold = np.repeat(per_subject, counts)
    return FoldAssignment(
        n_folds=n_folds,
        seed=seed,
        subjects=tuple(str(s) for s in data.subjects),
        subject_fold=subject_fold,
        row_fold=row_fold,
    )


def cross_fit_schedule(
    fa: FoldAssignment, apply_cross_fitting: bool = True
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Training/estimation row pairs realized by the fold assignment.

    With cross-fitting, pair ``j`` trains on every fold except ``j`` and
    estimates on fold ``j``; estimation rows across pairs partition the
    row set. Without cross-fitting only the first pair is returned.
    """
    pairs = []
    k = fa.n_folds if apply_cross_fitting else 1
    for j in range(k):
        est = np.flatnonzero(fa.row_fold == j)
        train = np.flatnonzero(fa.row_fold != j)
        pairs.append((train, est))
    return pairs
