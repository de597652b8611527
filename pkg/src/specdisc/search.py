"""Exhaustive search over the quantile-pair classifier family.

The family is every ordered pair of quantile neurons whose ranges have
width at most L; with N spectrum points this is a polynomially growing
set (about N^2 L^4 / 4 candidates) that can be scanned outright.  For
each maximum width w = 1..L the search reports the best classifier
using only ranges of width <= w under a two-level objective: training
error count first, then a Fisher score as tie-break (F_Z for
zero-threshold classifiers, F_B for fitted-threshold ones).  Remaining
ties break lexicographically on the neuron coordinates, so results are
fully deterministic regardless of thread count.  Test data never
participates in selection; test metrics are computed for winners only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .classifier import (
    PairClassifier,
    QuantileNeuron,
    SpectralRange,
    class_stats,
    error_rate,
    evaluations,
    fisher_b,
    fisher_z,
    fit_threshold,
)
from .spectra import Dataset, PairTask, Split, select_pair

__all__ = [
    "SearchConfig",
    "WidthResult",
    "SearchReport",
    "enumerate_neurons",
    "neuron_count",
    "search_best",
    "pairwise_sweep",
    "report_rows",
    "REPORT_COLUMNS",
]

REPORT_COLUMNS = [
    "pair", "kind", "width",
    "pos_start", "pos_end", "pos_k",
    "neg_start", "neg_end", "neg_k",
    "theta", "train_err", "test_err", "fisher_train", "fisher_test",
]


@dataclass(frozen=True)
class SearchConfig:
    max_width: int
    kind: str = "Z"
    threads: int = 0  # 0 = numba default

    def __post_init__(self):
        if self.kind not in ("Z", "B"):
            raise ValueError(f"kind must be 'Z' or 'B', got {self.kind!r}")
        if self.max_width < 1:
            raise ValueError("max_width must be >= 1")


@dataclass(frozen=True)
class WidthResult:
    best: PairClassifier
    train_error: float
    test_error: float
    fisher_train: float
    fisher_test: float


@dataclass(frozen=True)
class SearchReport:
    kind: str
    max_width: int
    per_width: dict = field(compare=False)
    candidates_evaluated: int = 0


def enumerate_neurons(n_points: int, max_width: int):
    """Every quantile neuron with range width <= max_width, in lexicographic
    (start, end, order_index) order."""
    if max_width > n_points:
        raise ValueError(f"max_width {max_width} exceeds n_points {n_points}")
    for start in range(1, n_points + 1):
        for end in range(start, min(start + max_width, n_points + 1)):
            for k in range(1, end - start + 2):
                yield QuantileNeuron(SpectralRange(start, end), k)


def neuron_count(n_points: int, max_width: int) -> int:
    """Closed form: sum over widths w of (N-w+1)*w neurons."""
    return sum((n_points - w + 1) * w for w in range(1, max_width + 1))


def _neuron_table(n_points: int, max_width: int):
    starts, ends, ks = [], [], []
    for start in range(1, n_points + 1):
        for end in range(start, min(start + max_width, n_points + 1)):
            for k in range(1, end - start + 2):
                starts.append(start)
                ends.append(end)
                ks.append(k)
    starts = np.array(starts, dtype=np.int64)
    ends = np.array(ends, dtype=np.int64)
    ks = np.array(ks, dtype=np.int64)
    return starts, ends, ks, ends - starts + 1


def _quantile_matrix(X: np.ndarray, n_points: int, max_width: int) -> np.ndarray:
    """Q[neuron, sample] = neuron response, neurons in lexicographic order."""
    n_neurons = neuron_count(n_points, max_width)
    Q = np.empty((n_neurons, X.shape[0]))
    base = 0
    for start in range(1, n_points + 1):
        hi = min(start + max_width, n_points + 1)
        widest = np.sort(X[:, start - 1 : hi - 1], axis=1)
        for end in range(start, hi):
            w = end - start + 1
            # the ascending sort of a prefix range is not a prefix of the
            # widest sort, so sort per width; L is small so this is cheap
            if w == hi - start:
                S = widest
            else:
                S = np.sort(X[:, start - 1 : end], axis=1)
            Q[base : base + w, :] = S[:, :w].T
            base += w
    assert base == n_neurons
    return Q


def _interleave_order(signs: np.ndarray) -> np.ndarray:
    """Alternate positive and negative samples so bad candidates fail fast."""
    pos = np.flatnonzero(signs > 0)
    neg = np.flatnonzero(signs < 0)
    order = np.empty(len(signs), dtype=np.int64)
    m = min(len(pos), len(neg))
    order[0 : 2 * m : 2] = pos[:m]
    order[1 : 2 * m : 2] = neg[:m]
    rest = pos[m:] if len(pos) > m else neg[m:]
    order[2 * m :] = rest
    return order


def _merge_slots(local_err, local_fis, local_b, n_widths):
    """Canonical-order reduction of per-neuron slots.

    Returns, per exact width bucket, the best (err, fisher, a, b) with
    ties broken toward smaller lexicographic neuron index.
    """
    best = [None] * n_widths
    for wi in range(n_widths):
        errs = local_err[:, wi]
        valid = np.flatnonzero(errs < _kernels.BIG)
        if valid.size == 0:
            continue
        min_err = errs[valid].min()
        cand = valid[errs[valid] == min_err]
        fis = local_fis[cand, wi]
        max_fis = fis.max()
        # np.flatnonzero returns ascending indices, so the first hit is
        # the smallest neuron index a; its slot already holds smallest b
        a = int(cand[np.flatnonzero(fis == max_fis)[0]])
        best[wi] = (int(min_err), float(max_fis), a, int(local_b[a, wi]))
    return best


def search_best(pairs_train, pairs_test, cfg: SearchConfig, n_points: int | None = None) -> SearchReport:
    """Optimal classifier per maximum range width over the train split."""
    if not pairs_train:
        raise ValueError("empty training set")
    if n_points is None:
        n_points = pairs_train[0][0].n_points
    L = cfg.max_width
    if L > n_points:
        raise ValueError(f"max_width {L} exceeds n_points {n_points}")

    X = np.array([s.values for s, _ in pairs_train])
    signs = np.array([sg for _, sg in pairs_train], dtype=np.int64)
    if not ((signs > 0).any() and (signs < 0).any()):
        raise ValueError("both classes must be present in the training set")

    if cfg.threads:
        from numba import set_num_threads

        set_num_threads(cfg.threads)

    order = _interleave_order(signs)
    starts, ends, ks, widths = _neuron_table(n_points, L)
    Q = _quantile_matrix(X[order], n_points, L)
    signs_perm = np.ascontiguousarray(signs[order], dtype=np.int64)

    kernel = _kernels.z_search_kernel if cfg.kind == "Z" else _kernels.b_search_kernel
    local_err, local_fis, local_b = kernel(Q, widths, signs_perm, L)
    bucket_best = _merge_slots(local_err, local_fis, local_b, L)

    n_train = len(pairs_train)
    per_width = {}
    running = None  # (err, fisher, a, b) best over buckets <= w
    for w in range(1, L + 1):
        cand = bucket_best[w - 1]
        if cand is not None and (
            running is None
            or cand[0] < running[0]
            or (cand[0] == running[0] and cand[1] > running[1])
        ):
            running = cand
        if running is None:
            continue
        err, fis, a, b = running
        pos = QuantileNeuron(SpectralRange(int(starts[a]), int(ends[a])), int(ks[a]))
        neg = QuantileNeuron(SpectralRange(int(starts[b]), int(ends[b])), int(ks[b]))
        if cfg.kind == "Z":
            clf = PairClassifier(pos, neg, 0.0, "Z")
        else:
            probe = PairClassifier(pos, neg, 0.0, "B")
            f_train, sg_train = evaluations(probe, pairs_train)
            theta, err_fit = fit_threshold(list(zip(f_train, sg_train)))
            if err_fit != err:
                raise AssertionError(
                    f"threshold refit disagrees with search kernel ({err_fit} vs {err})"
                )
            clf = PairClassifier(pos, neg, theta, "B")
        fisher_fn = fisher_z if cfg.kind == "Z" else fisher_b
        if pairs_test:
            test_err = error_rate(clf, pairs_test)
            fis_test = fisher_fn(class_stats(clf, pairs_test))
        else:
            test_err = float("nan")
            fis_test = float("nan")
        per_width[w] = WidthResult(
            best=clf,
            train_error=err / n_train,
            test_error=test_err,
            fisher_train=fis,
            fisher_test=fis_test,
        )
    n_neurons = len(starts)
    return SearchReport(
        kind=cfg.kind,
        max_width=L,
        per_width=per_width,
        candidates_evaluated=n_neurons * n_neurons,
    )


def pairwise_sweep(d: Dataset, kind: str, max_width: int, threads: int = 0) -> dict:
    """search_best for every unordered class pair, alphabetically ordered."""
    labels = d.labels
    if len(labels) < 2:
        raise ValueError("need at least two classes for a pairwise sweep")
    cfg = SearchConfig(max_width=max_width, kind=kind, threads=threads)
    reports = {}
    for a, b in itertools.combinations(labels, 2):
        task = PairTask(a, b)
        train = select_pair(d, task, Split.TRAIN)
        test = select_pair(d, task, Split.TEST)
        reports[task.name] = search_best(train, test, cfg, n_points=d.n_points)
    return reports


def _fmt(x: float) -> str:
    return repr(float(x))


def report_rows(pair_name: str, report: SearchReport):
    """TSV-ready rows (one per width) for a search report."""
    rows = []
    for w in sorted(report.per_width):
        r = report.per_width[w]
        c = r.best
        rows.append([
            pair_name, report.kind, str(w),
            str(c.pos_neuron.range.start), str(c.pos_neuron.range.end), str(c.pos_neuron.order_index),
            str(c.neg_neuron.range.start), str(c.neg_neuron.range.end), str(c.neg_neuron.order_index),
            _fmt(c.theta), _fmt(r.train_error), _fmt(r.test_error),
            _fmt(r.fisher_train), _fmt(r.fisher_test),
        ])
    return rows
