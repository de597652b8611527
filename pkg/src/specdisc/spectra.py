"""Loading, validation and partitioning of log-periodogram datasets.

A sample is one log-power spectrum with a class label and a train/test
split tag.  The reference phoneme dataset (4509 spectra of the phonemes
aa, ao, dcl, iy, sh; 256 points each) ships as a CSV with a row-id
column, feature columns ``x.1`` ... ``x.256``, a label column ``g`` and
a ``speaker`` column whose value starts with ``train`` or ``test``.
That header layout is the default; column roles can be overridden.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

__all__ = [
    "Split",
    "Spectrum",
    "Dataset",
    "PairTask",
    "load_dataset",
    "save_dataset",
    "select_pair",
    "shift_loudness",
]


class Split(Enum):
    TRAIN = "train"
    TEST = "test"


@dataclass(frozen=True)
class Spectrum:
    """One labeled log-power spectrum (1-based logical indexing s1..sN)."""

    values: np.ndarray
    label: str
    split: Split
    sample_id: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("spectrum values must be a non-empty 1-D vector")
        if not np.all(np.isfinite(v)):
            raise ValueError(f"spectrum {self.sample_id!r} contains non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n_points(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class PairTask:
    """An ordered pair of class labels; the first maps to sign +1."""

    class_pos: str
    class_neg: str

    def __post_init__(self):
        if self.class_pos == self.class_neg:
            raise ValueError(f"pair task needs two distinct classes, got {self.class_pos!r} twice")

    @property
    def name(self) -> str:
        return f"{self.class_pos}-{self.class_neg}"


@dataclass(frozen=True)
class Dataset:
    """Immutable collection of equal-length spectra."""

    samples: tuple[Spectrum, ...]
    n_points: int
    class_counts: dict = field(compare=False)

    @classmethod
    def from_samples(cls, samples) -> "Dataset":
        samples = tuple(samples)
        if not samples:
            raise ValueError("dataset is empty")
        n = samples[0].n_points
        for s in samples:
            if s.n_points != n:
                raise ValueError(
                    f"sample {s.sample_id!r} has {s.n_points} points, expected {n}"
                )
        counts: dict = {}
        for s in samples:
            per_split = counts.setdefault(s.label, {})
            per_split[s.split] = per_split.get(s.split, 0) + 1
        return cls(samples=samples, n_points=n, class_counts=counts)

    @property
    def labels(self) -> list[str]:
        return sorted(self.class_counts)


def _parse_split(tag: str, row_no: int) -> Split:
    low = tag.strip().lower()
    if low.startswith("train"):
        return Split.TRAIN
    if low.startswith("test"):
        return Split.TEST
    raise ValueError(f"row {row_no}: unknown split tag {tag!r} (must start with train/test)")


def load_dataset(
    path,
    label_col: str = "g",
    split_col: str = "speaker",
    id_col: str | None = None,
) -> Dataset:
    """Read a CSV of spectra (one sample per row, header row required).

    Feature columns are every column that is not the label, split or id
    column, taken in file order, which must be ascending frequency order.
    An unnamed or ``row.names`` first column is treated as the row id
    when ``id_col`` is not given.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if label_col not in header:
            raise ValueError(f"{path}: no label column {label_col!r} in header")
        if split_col not in header:
            raise ValueError(f"{path}: no split column {split_col!r} in header")
        role_cols = {header.index(label_col), header.index(split_col)}
        if id_col is not None:
            if id_col not in header:
                raise ValueError(f"{path}: no id column {id_col!r} in header")
            id_idx = header.index(id_col)
            role_cols.add(id_idx)
        elif header[0] in ("", "row.names") and 0 not in role_cols:
            id_idx = 0
            role_cols.add(0)
        else:
            id_idx = None
        feat_idx = [i for i in range(len(header)) if i not in role_cols]
        if not feat_idx:
            raise ValueError(f"{path}: no feature columns")

        samples = []
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(
                    f"{path}: row {row_no} has {len(row)} columns, expected {len(header)}"
                )
            vals = np.empty(len(feat_idx))
            for j, i in enumerate(feat_idx):
                try:
                    vals[j] = float(row[i])
                except ValueError:
                    raise ValueError(
                        f"{path}: row {row_no}: non-numeric feature {row[i]!r} "
                        f"in column {header[i]!r}"
                    ) from None
                if not math.isfinite(vals[j]):
                    raise ValueError(
                        f"{path}: row {row_no}: non-finite feature {row[i]!r} "
                        f"in column {header[i]!r}"
                    )
            split = _parse_split(row[header.index(split_col)], row_no)
            sid = row[id_idx] if id_idx is not None else str(row_no - 1)
            samples.append(
                Spectrum(values=vals, label=row[header.index(label_col)].strip(),
                         split=split, sample_id=sid)
            )
    return Dataset.from_samples(samples)


def save_dataset(d: Dataset, path, label_col: str = "g", split_col: str = "speaker"):
    """Write a dataset in the same CSV dialect load_dataset reads (round-trips)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row.names"] + [f"x.{i}" for i in range(1, d.n_points + 1)]
                        + [label_col, split_col])
        for s in d.samples:
            writer.writerow([s.sample_id] + [repr(float(v)) for v in s.values]
                            + [s.label, s.split.value])


def select_pair(d: Dataset, task: PairTask, split: Split):
    """Samples of the two task classes in dataset order, as (Spectrum, sign) pairs."""
    out = []
    for s in d.samples:
        if s.split is not split:
            continue
        if s.label == task.class_pos:
            out.append((s, +1))
        elif s.label == task.class_neg:
            out.append((s, -1))
    signs = {sg for _, sg in out}
    for cls, sg in ((task.class_pos, +1), (task.class_neg, -1)):
        if sg not in signs:
            raise ValueError(f"no {split.value} samples of class {cls!r} in dataset")
    return out


def shift_loudness(s: Spectrum, d: float) -> Spectrum:
    """Copy of the spectrum with every value raised by d (a loudness change in dB)."""
    return replace(s, values=s.values + d)
