"""Ingestion, validation and indexing of long-format panel data.

A :class:`PanelDataset` stores one row per subject-period observation,
sorted by (panel id, time id), and guarantees the invariants every
downstream module relies on: unique (subject, time) keys, at least two
observations per subject, finite numeric values, and a cluster id that is
constant within each subject. Subjects occupy contiguous row blocks, which
lets transformations run as vectorized segment operations.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ClusterSplitsSubject,
    DataError,
    DuplicateKey,
    MissingColumn,
    NonNumericCell,
    SingletonSubject,
)

__all__ = [
    "ColumnSpec",
    "PanelDataset",
    "PanelInfo",
    "load_long_table",
    "panel_info",
    "write_long_table",
]


@dataclass(frozen=True)
class ColumnSpec:
    """Column names identifying the roles in a long-format table.

    ``cluster`` may be None, in which case the panel identifier doubles as
    the clustering variable.
    """

    y: str
    d: str
    x: tuple[str, ...]
    panel: str
    time: str
    cluster: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(self.x))
        if len(self.x) == 0:
            raise ValueError("at least one covariate column is required")
        flat = [self.y, self.d, self.panel, self.time, *self.x]
        if self.cluster is not None:
            flat.append(self.cluster)
        if len(set(flat)) != len(flat):
            raise ValueError(f"column roles overlap: {flat}")


@dataclass(frozen=True)
class PanelInfo:
    """Counts describing a panel: rows, subjects, distinct clusters."""

    n_obs: int
    n_subjects: int
    n_groups: int


@dataclass(frozen=True)
class PanelDataset:
    """Validated long-format panel, immutable after construction.

    Rows are sorted by (panel_id, time_id); ``subject_starts`` holds the
    first row of each subject block plus the terminal ``n_obs``, so block
    ``i`` is ``rows[subject_starts[i]:subject_starts[i + 1]]``.
    """

    y: np.ndarray
    d: np.ndarray
    x: np.ndarray
    panel_id: np.ndarray
    time_id: np.ndarray
    cluster_id: np.ndarray
    names: ColumnSpec
    subjects: np.ndarray = field(repr=False)
    subject_starts: np.ndarray = field(repr=False)

    @property
    def n_obs(self) -> int:
        return self.y.shape[0]

    @property
    def n_subjects(self) -> int:
        return self.subjects.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    @property
    def subject_counts(self) -> np.ndarray:
        """Observations per subject, in subject order."""
        return np.diff(self.subject_starts)

    def subject_index(self) -> dict[str, tuple[int, int]]:
        """Map panel_id -> contiguous (start, stop) row range."""
        starts = self.subject_starts
        return {
            str(s): (int(starts[i]), int(starts[i + 1]))
            for i, s in enumerate(self.subjects)
        }

    @classmethod
    def from_arrays(
        cls,
        y,
        d,
        x,
        panel_id,
        time_id,
        cluster_id=None,
        names: ColumnSpec | None = None,
    ) -> "PanelDataset":
        """Build and validate a dataset from in-memory arrays.

        Rows may arrive in any order; they are sorted internally. Raises a
        :class:`DataError` subclass on any invariant violation.
        """
        y = np.asarray(y, dtype=np.float64)
        d = np.asarray(d, dtype=np.float64)
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[0] != y.shape[0] and x.shape[1] == y.shape[0]:
            x = x.T
        panel = np.asarray(panel_id).astype(str)
        time = np.asarray(time_id, dtype=np.float64)
        n = y.shape[0]
        if not (d.shape[0] == x.shape[0] == panel.shape[0] == time.shape[0] == n):
            raise ValueError("y, d, x, panel_id, time_id must have equal length")
        if cluster_id is None:
            cluster = panel.copy()
        else:
            cluster = np.asarray(cluster_id).astype(str)
            if cluster.shape[0] != n:
                raise ValueError("cluster_id length mismatch")
        if names is None:
            names = ColumnSpec(
                y="y",
                d="d",
                x=tuple(f"X{j + 1}" for j in range(x.shape[1])),
                panel="id",
                time="time",
                cluster=None,
            )
        if len(names.x) != x.shape[1]:
            raise ValueError("names.x length does not match covariate count")

        for label, arr in (("y", y), ("d", d), ("time", time)):
            bad = np.flatnonzero(~np.isfinite(arr))
            if bad.size:
                raise NonNumericCell(int(bad[0]) + 1, label)
        bad_rows, bad_cols = np.nonzero(~np.isfinite(x))
        if bad_rows.size:
            raise NonNumericCell(int(bad_rows[0]) + 1, names.x[int(bad_cols[0])])

        order = np.lexsort((time, panel))
        y, d, x = y[order], d[order], x[order]
        panel, time, cluster = panel[order], time[order], cluster[order]

        changes = np.flatnonzero(panel[1:] != panel[:-1]) + 1
        starts = np.concatenate(([0], changes, [n])).astype(np.int64)
        subjects = panel[starts[:-1]]

        same_key = (panel[1:] == panel[:-1]) & (time[1:] == time[:-1])
        dup = np.flatnonzero(same_key)
        if dup.size:
            i = int(dup[0])
            raise DuplicateKey(str(panel[i]), _fmt_time(time[i]))

        counts = np.diff(starts)
        small = np.flatnonzero(counts < 2)
        if small.size:
            raise SingletonSubject(str(subjects[int(small[0])]))

        within = panel[1:] == panel[:-1]
        split = np.flatnonzero(within & (cluster[1:] != cluster[:-1]))
        if split.size:
            raise ClusterSplitsSubject(str(panel[int(split[0])]))

        x = np.ascontiguousarray(x)
        for arr in (y, d, x, panel, time, cluster, subjects, starts):
            arr.setflags(write=False)
        return cls(
            y=y,
            d=d,
            x=x,
            panel_id=panel,
            time_id=time,
            cluster_id=cluster,
            names=names,
            subjects=subjects,
            subject_starts=starts,
        )


def _fmt_time(t: float):
    return int(t) if float(t).is_integer() else float(t)


def load_long_table(source, columns: ColumnSpec, delimiter: str = ",") -> PanelDataset:
    """Read a delimited long-format text file into a :class:`PanelDataset`.

    Parameters
    ----------
    source : path or readable text file
        UTF-8 delimited text with one header row, one row per
        subject-period. Numeric cells accept decimal or scientific
        notation.
    columns : ColumnSpec
        Which columns play which role.
    delimiter : str
        Field separator; comma by default, pass ``"\\t"`` for tab.

    Raises
    ------
    MissingColumn, NonNumericCell, DuplicateKey, SingletonSubject,
    ClusterSplitsSubject
        On the first violated invariant. Rows are never dropped or
        imputed.
    """
    if hasattr(source, "read"):
        return _parse(source, columns, delimiter)
    with open(os.fspath(source), "r", encoding="utf-8", newline="") as fh:
        return _parse(fh, columns, delimiter)


def _parse(fh: io.TextIOBase, columns: ColumnSpec, delimiter: str) -> PanelDataset:
    reader = csv.reader(fh, delimiter=delimiter)
    try:
        header = next(reader)
    except StopIteration:
        raise MissingColumn(columns.y) from None
    header = [h.strip().lstrip("﻿") for h in header]
    pos = {name: i for i, name in enumerate(header)}

    wanted = [columns.y, columns.d, columns.panel, columns.time, *columns.x]
    if columns.cluster is not None:
        wanted.append(columns.cluster)
    for name in wanted:
        if name not in pos:
            raise MissingColumn(name)

    iy, id_, ip, it = (pos[columns.y], pos[columns.d], pos[columns.panel], pos[columns.time])
    ix = [pos[c] for c in columns.x]
    ic = pos[columns.cluster] if columns.cluster is not None else None

    def cell(row, col_idx, col_name, rownum):
        if col_idx >= len(row):
            raise NonNumericCell(rownum, col_name)
        return row[col_idx]

    def num(row, col_idx, col_name, rownum):
        raw = cell(row, col_idx, col_name, rownum).strip()
        try:
            v = float(raw)
        except ValueError:
            raise NonNumericCell(rownum, col_name) from None
        if not np.isfinite(v):
            raise NonNumericCell(rownum, col_name)
        return v

    ys, ds, xs, panels, times, clusters = [], [], [], [], [], []
    rownum = 0
    for row in reader:
        if not row:
            continue
        rownum += 1
        ys.append(num(row, iy, columns.y, rownum))
        ds.append(num(row, id_, columns.d, rownum))
        times.append(num(row, it, columns.time, rownum))
        xs.append([num(row, j, columns.x[k], rownum) for k, j in enumerate(ix)])
        panels.append(cell(row, ip, columns.panel, rownum).strip())
        if ic is not None:
            clusters.append(cell(row, ic, columns.cluster, rownum).strip())

    if rownum == 0:
        raise DataError("file contains a header but no data rows")

    return PanelDataset.from_arrays(
        y=np.array(ys),
        d=np.array(ds),
        x=np.array(xs),
        panel_id=np.array(panels),
        time_id=np.array(times),
        cluster_id=np.array(clusters) if ic is not None else None,
        names=columns,
    )


def panel_info(data: PanelDataset) -> PanelInfo:
    """Counts of observations, subjects, and distinct clusters."""
    return PanelInfo(
        n_obs=data.n_obs,
        n_subjects=data.n_subjects,
        n_groups=int(np.unique(data.cluster_id).size),
    )


def write_long_table(data: PanelDataset, target, delimiter: str = ",") -> None:
    """Write a dataset back to delimited text, one row per observation.

    Column order: panel id, time id, outcome, treatment, covariates
    (cluster id appended when it has its own column). Floats use
    round-trip precision; integral time ids are written without a
    decimal point.
    """
    if hasattr(target, "write"):
        _write(target, data, delimiter)
        return
    with open(os.fspath(target), "w", encoding="utf-8", newline="") as fh:
        _write(fh, data, delimiter)


def _write(fh, data: PanelDataset, delimiter: str) -> None:
    names = data.names
    header = [names.panel, names.time, names.y, names.d, *names.x]
    if names.cluster is not None:
        header.append(names.cluster)
    writer = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
    writer.writerow(header)

    def fmt(v: float) -> str:
        return repr(float(v))

    for i in range(data.n_obs):
        row = [
            str(data.panel_id[i]),
            str(_fmt_time(data.time_id[i])),
            fmt(data.y[i]),
            fmt(data.d[i]),
            *(fmt(v) for v in data.x[i]),
        ]
        if names.cluster is not None:
            row.append(str(data.cluster_id[i]))
        writer.writerow(row)
