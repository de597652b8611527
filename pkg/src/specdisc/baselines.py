"""Continuous relaxations of the quantile-pair classifier.

On a fixed pair of spectral ranges the quantile discriminant is a
one-hot dot product against the ascending-sorted range values.  Relaxing
the one-hot weight vectors gives a ladder of linear models:

* monotone OWA: nonnegative, non-decreasing weights summing to one,
* OWA: nonnegative weights summing to one,
* ordered LDA: arbitrary real weights on sorted values,
* LDA / balanced LDA: arbitrary weights on the raw (unsorted) values,
  balanced meaning all coefficients sum to zero (loudness invariant).

Constrained classes are optimized for the Fisher ratio with a
derivative-free simplex method over a reparameterized unconstrained
space, so every iterate is feasible by construction.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .classifier import SpectralRange, fisher_b, fit_threshold, ClassStats, threshold_errors
from .spectra import Spectrum

__all__ = [
    "ConstraintClass",
    "LinearOrderedModel",
    "feature_vector",
    "feature_matrix",
    "model_scores",
    "lda_closed_form",
    "optimize_constrained",
    "table2_run",
    "TABLE2_METHODS",
]

FEAS_TOL = 1e-9


class ConstraintClass(enum.Enum):
    MONOTONE_OWA = "monotone_owa"
    OWA = "owa"
    ORDERED_LDA = "ordered_lda"
    LDA = "lda"
    BALANCED_LDA = "balanced_lda"

    @property
    def uses_sorted_features(self) -> bool:
        return self in (ConstraintClass.MONOTONE_OWA, ConstraintClass.OWA,
                        ConstraintClass.ORDERED_LDA)


@dataclass(frozen=True)
class LinearOrderedModel:
    """Linear discriminant w1 . phi(r1) - w2 . phi(r2) with threshold theta."""

    range1: SpectralRange
    range2: SpectralRange
    w1: np.ndarray
    w2: np.ndarray
    sorted: bool
    theta: float = 0.0

    def __post_init__(self):
        w1 = np.asarray(self.w1, dtype=np.float64)
        w2 = np.asarray(self.w2, dtype=np.float64)
        if w1.shape != (self.range1.width,) or w2.shape != (self.range2.width,):
            raise ValueError("weight vector lengths must match range widths")
        object.__setattr__(self, "w1", w1)
        object.__setattr__(self, "w2", w2)

    @property
    def weights(self) -> np.ndarray:
        return np.concatenate([self.w1, self.w2])


def _phi(values: np.ndarray, use_sorted: bool) -> np.ndarray:
    return np.sort(values) if use_sorted else values


def feature_vector(s: Spectrum | np.ndarray, m: LinearOrderedModel) -> np.ndarray:
    """[phi(range1 values), -phi(range2 values)]; the model score is
    dot(weights, feature_vector)."""
    values = s.values if isinstance(s, Spectrum) else np.asarray(s, dtype=np.float64)
    return np.concatenate([
        _phi(m.range1.slice_of(values), m.sorted),
        -_phi(m.range2.slice_of(values), m.sorted),
    ])


def feature_matrix(pairs, range1, range2, use_sorted):
    """Stack feature vectors for (Spectrum, sign) pairs; returns (X, signs)."""
    probe = LinearOrderedModel(range1, range2,
                               np.zeros(range1.width), np.zeros(range2.width),
                               sorted=use_sorted)
    X = np.array([feature_vector(s, probe) for s, _ in pairs])
    signs = np.array([sg for _, sg in pairs], dtype=np.int64)
    return X, signs


def model_scores(m: LinearOrderedModel, pairs) -> np.ndarray:
    return np.array([float(np.dot(m.weights, feature_vector(s, m))) for s, _ in pairs])


def _fisher_of_scores(scores: np.ndarray, signs: np.ndarray) -> float:
    pos = scores[signs > 0]
    neg = scores[signs < 0]
    st = ClassStats(float(pos.mean()), float(pos.var()),
                    float(neg.mean()), float(neg.var()))
    return fisher_b(st)


def lda_closed_form(X: np.ndarray, signs: np.ndarray) -> np.ndarray:
    """Fisher direction for two classes: w proportional to S_w^-1 (m+ - m-).

    S_w is the sum of per-class population covariances, so the returned
    direction exactly maximizes (mu1-mu2)^2 / (var1+var2) over all
    linear weights.  Regularized by eps*trace/dim on the diagonal.
    """
    pos = X[signs > 0]
    neg = X[signs < 0]
    if len(pos) < 2 or len(neg) < 2:
        raise ValueError("need at least 2 samples per class for LDA")
    delta = pos.mean(axis=0) - neg.mean(axis=0)
    sw = np.cov(pos, rowvar=False, bias=True) + np.cov(neg, rowvar=False, bias=True)
    sw = np.atleast_2d(sw)
    dim = sw.shape[0]
    sw_reg = sw + 1e-8 * np.trace(sw) / dim * np.eye(dim)
    try:
        w = np.linalg.solve(sw_reg, delta)
    except np.linalg.LinAlgError as exc:
        raise ValueError("within-class covariance is singular even after "
                         "regularization") from exc
    norm = np.linalg.norm(w)
    if norm == 0.0:
        raise ValueError("degenerate LDA direction (identical class means)")
    w = w / norm
    if np.dot(w, delta) < 0:
        w = -w
    return w


def _balanced_lda(X: np.ndarray, signs: np.ndarray, k1: int, k2: int) -> np.ndarray:
    """LDA restricted to weights whose raw-spectrum coefficients sum to zero.

    Features carry range2 negated, so the raw coefficient sum is
    sum(w1) - sum(w2) = c . w with c = (1,...,1 | -1,...,-1).
    """
    c = np.concatenate([np.ones(k1), -np.ones(k2)])
    c = c / np.linalg.norm(c)
    dim = k1 + k2
    # orthonormal basis of the hyperplane c . w = 0
    basis = np.linalg.qr(np.eye(dim) - np.outer(c, c))[0][:, : dim - 1]
    w_sub = lda_closed_form(X @ basis, signs)
    w = basis @ w_sub
    return w / np.linalg.norm(w)


def _owa_map(z: np.ndarray) -> np.ndarray:
    e = z * z
    total = e.sum()
    if total == 0.0:
        return np.full(len(z), 1.0 / len(z))
    return e / total


def _monotone_map(z: np.ndarray) -> np.ndarray:
    w = np.cumsum(z * z)
    total = w.sum()
    if total == 0.0:
        return np.full(len(z), 1.0 / len(z))
    return w / total


def _check_feasible(w1: np.ndarray, w2: np.ndarray, cls: ConstraintClass):
    for w in (w1, w2):
        if cls in (ConstraintClass.OWA, ConstraintClass.MONOTONE_OWA):
            if (w < -FEAS_TOL).any() or abs(w.sum() - 1.0) > FEAS_TOL:
                raise ValueError(f"infeasible init for {cls.value}: "
                                 "weights must be nonnegative and sum to 1")
        if cls is ConstraintClass.MONOTONE_OWA and (np.diff(w) < -FEAS_TOL).any():
            raise ValueError("infeasible init for monotone OWA: weights must be "
                             "non-decreasing")


def _invert_map(w: np.ndarray, cls: ConstraintClass) -> np.ndarray:
    if cls is ConstraintClass.OWA:
        return np.sqrt(np.clip(w, 0.0, None))
    inc = np.diff(np.concatenate([[0.0], w]))
    return np.sqrt(np.clip(inc, 0.0, None))


def optimize_constrained(
    X: np.ndarray,
    signs: np.ndarray,
    cls: ConstraintClass,
    init_w1: np.ndarray,
    init_w2: np.ndarray,
    range1: SpectralRange,
    range2: SpectralRange,
    restarts: int = 10,
) -> LinearOrderedModel:
    """Maximize the Fisher ratio of X @ w within a constraint class.

    LDA-type classes use the closed form.  OWA classes run a Nelder-Mead
    simplex ascent over squared (OWA) or cumulative-squared (monotone)
    reparameterizations, restarted from perturbed copies of the init;
    the result never scores below the init.  Theta is refit on the
    final scores.
    """
    init_w1 = np.asarray(init_w1, dtype=np.float64)
    init_w2 = np.asarray(init_w2, dtype=np.float64)
    k1, k2 = len(init_w1), len(init_w2)
    use_sorted = cls.uses_sorted_features

    if cls is ConstraintClass.LDA or cls is ConstraintClass.ORDERED_LDA:
        w = lda_closed_form(X, signs)
        w1, w2 = w[:k1], w[k1:]
    elif cls is ConstraintClass.BALANCED_LDA:
        w = _balanced_lda(X, signs, k1, k2)
        w1, w2 = w[:k1], w[k1:]
    else:
        _check_feasible(init_w1, init_w2, cls)
        weight_map = _owa_map if cls is ConstraintClass.OWA else _monotone_map

        def unpack(z):
            return weight_map(z[:k1]), weight_map(z[k1:])

        def neg_fisher(z):
            a, b = unpack(z)
            scores = X @ np.concatenate([a, b])
            f = _fisher_of_scores(scores, signs)
            return -f if np.isfinite(f) else -1e30

        z0 = np.concatenate([_invert_map(init_w1, cls), _invert_map(init_w2, cls)])
        dim = k1 + k2
        best_z, best_f = z0, -neg_fisher(z0)
        for seed in range(restarts):
            rng = np.random.default_rng(seed)
            start = z0 if seed == 0 else z0 + rng.normal(scale=0.1, size=dim)
            res = minimize(
                neg_fisher, start, method="Nelder-Mead",
                options={"fatol": 1e-10, "xatol": 1e-10,
                         "maxfev": 5000 * dim, "maxiter": 5000 * dim},
            )
            if -res.fun > best_f:
                best_f, best_z = -res.fun, res.x
        w1, w2 = unpack(best_z)
        init_f = _fisher_of_scores(X @ np.concatenate([init_w1, init_w2]), signs)
        if best_f < init_f - 1e-9:
            w1, w2 = init_w1, init_w2  # never return worse than the warm start

    model = LinearOrderedModel(range1, range2, w1, w2, sorted=use_sorted)
    scores = X @ model.weights
    theta, _ = fit_threshold(list(zip(scores, signs)))
    return LinearOrderedModel(range1, range2, w1, w2, sorted=use_sorted, theta=theta)


TABLE2_METHODS = ["quantiles", "monotone_owa", "owa", "ordered_lda", "balanced_lda", "lda"]


def table2_run(
    d,
    class_pos: str = "dcl",
    class_neg: str = "iy",
    range1: SpectralRange = SpectralRange(1, 1),
    range2: SpectralRange = SpectralRange(62, 72),
):
    """Six-way method comparison on one fixed pair of spectral ranges.

    Returns a list of dicts (method, train_err, test_err, fisher_train,
    fisher_test).  The quantile row is the plain order-statistic
    classifier (min of range1 minus max of range2 with fitted theta);
    OWA rows are warm-start chained from it.
    """
    from .spectra import PairTask, Split, select_pair

    task = PairTask(class_pos, class_neg)
    train = select_pair(d, task, Split.TRAIN)
    test = select_pair(d, task, Split.TEST)

    rows = []

    def add_row(method, model):
        s_train = model_scores(model, train)
        s_test = model_scores(model, test)
        sg_train = np.array([sg for _, sg in train], dtype=np.int64)
        sg_test = np.array([sg for _, sg in test], dtype=np.int64)
        rows.append({
            "method": method,
            "train_err": threshold_errors(s_train, sg_train, model.theta) / len(train),
            "test_err": threshold_errors(s_test, sg_test, model.theta) / len(test),
            "fisher_train": _fisher_of_scores(s_train, sg_train),
            "fisher_test": _fisher_of_scores(s_test, sg_test),
        })
        return model

    # quantile row: one-hot weights, min of range1 vs max of range2
    q_w1 = np.zeros(range1.width)
    q_w1[0] = 1.0
    q_w2 = np.zeros(range2.width)
    q_w2[-1] = 1.0
    Xs_train, sg_train = feature_matrix(train, range1, range2, use_sorted=True)
    theta_q, _ = fit_threshold(list(zip(Xs_train @ np.concatenate([q_w1, q_w2]), sg_train)))
    quant = LinearOrderedModel(range1, range2, q_w1, q_w2, sorted=True, theta=theta_q)
    add_row("quantiles", quant)

    mono = add_row("monotone_owa", optimize_constrained(
        Xs_train, sg_train, ConstraintClass.MONOTONE_OWA, q_w1, q_w2, range1, range2))
    owa = add_row("owa", optimize_constrained(
        Xs_train, sg_train, ConstraintClass.OWA, mono.w1, mono.w2, range1, range2))
    add_row("ordered_lda", optimize_constrained(
        Xs_train, sg_train, ConstraintClass.ORDERED_LDA, owa.w1, owa.w2, range1, range2))

    Xr_train, _ = feature_matrix(train, range1, range2, use_sorted=False)
    raw_init1 = np.zeros(range1.width)
    raw_init2 = np.zeros(range2.width)
    add_row("balanced_lda", optimize_constrained(
        Xr_train, sg_train, ConstraintClass.BALANCED_LDA, raw_init1, raw_init2, range1, range2))
    add_row("lda", optimize_constrained(
        Xr_train, sg_train, ConstraintClass.LDA, raw_init1, raw_init2, range1, range2))

    # order rows as in the reported comparison
    order = {m: i for i, m in enumerate(TABLE2_METHODS)}
    rows.sort(key=lambda r: order[r["method"]])
    return rows
