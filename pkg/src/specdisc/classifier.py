"""Quantile-pair discriminants and their scoring.

A classifier is built from two quantile neurons.  Each neuron reads a
contiguous spectral range and outputs the k-th smallest value of that
range (k = 1 is the minimum, k = width the maximum).  The discriminant
is the difference of the two neuron outputs; the decision compares it
with a threshold theta.  A Z-classifier is the special case theta = 0.

Because both neurons respond additively to a constant shift of the
whole spectrum, the discriminant is invariant to loudness changes; and
because order statistics ignore ordering, it is invariant to permuting
values inside either range.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .spectra import Spectrum

__all__ = [
    "SpectralRange",
    "QuantileNeuron",
    "PairClassifier",
    "ClassStats",
    "quantile",
    "discriminant",
    "classify",
    "class_stats",
    "fisher_b",
    "fisher_z",
    "fit_threshold",
    "error_rate",
    "classifier_to_json",
    "classifier_from_json",
]


@dataclass(frozen=True)
class SpectralRange:
    """Contiguous run of spectrum indices, 1-based and inclusive."""

    start: int
    end: int

    def __post_init__(self):
        if not (1 <= self.start <= self.end):
            raise ValueError(f"invalid spectral range {self.start}..{self.end}")

    @property
    def width(self) -> int:
        return self.end - self.start + 1

    def slice_of(self, values: np.ndarray) -> np.ndarray:
        if self.end > len(values):
            raise IndexError(
                f"range {self.start}..{self.end} exceeds spectrum length {len(values)}"
            )
        return values[self.start - 1 : self.end]


@dataclass(frozen=True)
class QuantileNeuron:
    """Outputs the order_index-th smallest value of its spectral range."""

    range: SpectralRange
    order_index: int

    def __post_init__(self):
        if not (1 <= self.order_index <= self.range.width):
            raise ValueError(
                f"order index {self.order_index} out of 1..{self.range.width}"
            )

    def respond(self, values: np.ndarray) -> float:
        return quantile(self.range.slice_of(values), self.order_index)


@dataclass(frozen=True)
class PairClassifier:
    """Two quantile neurons plus a decision threshold.

    kind "Z" forces theta == 0; kind "B" allows any real threshold.
    """

    pos_neuron: QuantileNeuron
    neg_neuron: QuantileNeuron
    theta: float
    kind: str

    def __post_init__(self):
        if self.kind not in ("Z", "B"):
            raise ValueError(f"classifier kind must be 'Z' or 'B', got {self.kind!r}")
        if self.kind == "Z" and self.theta != 0.0:
            raise ValueError("Z-classifiers must have theta == 0")


@dataclass(frozen=True)
class ClassStats:
    """Per-class mean and population variance of discriminant evaluations."""

    mu1: float
    var1: float
    mu2: float
    var2: float


def quantile(values, k: int) -> float:
    """k-th smallest element of values (k = 1 min, k = len max)."""
    values = np.asarray(values, dtype=np.float64)
    if not (1 <= k <= values.size):
        raise ValueError(f"order index {k} out of 1..{values.size}")
    # partition is O(n); equivalent to sort_ascending(values)[k-1]
    return float(np.partition(values, k - 1)[k - 1])


def discriminant(c: PairClassifier, s: Spectrum | np.ndarray) -> float:
    """f(s): positive neuron response minus negative neuron response."""
    values = s.values if isinstance(s, Spectrum) else np.asarray(s, dtype=np.float64)
    return c.pos_neuron.respond(values) - c.neg_neuron.respond(values)


def classify(c: PairClassifier, s: Spectrum | np.ndarray) -> int:
    """+1 if the discriminant exceeds theta, else -1 (ties go to -1)."""
    return +1 if discriminant(c, s) > c.theta else -1


def evaluations(c: PairClassifier, pairs):
    """Discriminant values and signs for a list of (Spectrum, sign) pairs."""
    f = np.array([discriminant(c, s) for s, _ in pairs])
    signs = np.array([sg for _, sg in pairs], dtype=np.int64)
    return f, signs


def class_stats(c: PairClassifier, pairs) -> ClassStats:
    """Mean/variance of discriminant evaluations per class (population variance)."""
    f, signs = evaluations(c, pairs)
    return stats_of_evaluations(f, signs)


def stats_of_evaluations(f: np.ndarray, signs: np.ndarray) -> ClassStats:
    pos = f[signs > 0]
    neg = f[signs < 0]
    if pos.size == 0 or neg.size == 0:
        raise ValueError("both classes must be present to compute class stats")
    return ClassStats(
        mu1=float(pos.mean()), var1=float(pos.var()),
        mu2=float(neg.mean()), var2=float(neg.var()),
    )


def fisher_b(st: ClassStats) -> float:
    """Fisher ratio (mu1-mu2)^2 / (var1+var2); +inf when separated with zero spread."""
    num = (st.mu1 - st.mu2) ** 2
    den = st.var1 + st.var2
    if den == 0.0:
        return math.inf if num > 0.0 else 0.0
    return num / den


def fisher_z(st: ClassStats) -> float:
    """Zero-threshold tie-break score min(mu1^2/var1, mu2^2/var2).

    Only classifiers whose class means straddle zero qualify; otherwise 0.
    A zero variance with nonzero mean contributes an infinite ratio.
    """
    if st.mu1 == 0.0 or st.mu2 == 0.0 or (st.mu1 > 0.0) == (st.mu2 > 0.0):
        return 0.0
    r1 = math.inf if st.var1 == 0.0 else st.mu1**2 / st.var1
    r2 = math.inf if st.var2 == 0.0 else st.mu2**2 / st.var2
    return min(r1, r2)


def threshold_errors(f: np.ndarray, signs: np.ndarray, theta: float) -> int:
    """Misclassification count at a given threshold (ties classify as -1)."""
    pred = np.where(f > theta, 1, -1)
    return int(np.count_nonzero(pred != signs))


def fit_threshold(evals) -> tuple[float, int]:
    """Error-minimizing threshold over a list of (value, sign) pairs.

    Scans every gap of the sorted evaluation values.  Among gaps that
    reach the minimum error the widest one wins and theta is its
    midpoint; if the optimum lies below all values theta is min-1, above
    all values max+1.  Deterministic.
    """
    evals = list(evals)
    if not evals:
        raise ValueError("no evaluations to fit a threshold on")
    f = np.array([v for v, _ in evals], dtype=np.float64)
    signs = np.array([sg for _, sg in evals], dtype=np.int64)
    if not ((signs > 0).any() and (signs < 0).any()):
        raise ValueError("both classes must be present to fit a threshold")

    order = np.argsort(f, kind="stable")
    fs = f[order]
    ss = signs[order]
    n_neg = int(np.count_nonzero(signs < 0))

    # Candidate positions: theta below every value, then theta equal to
    # each distinct value (ties classify as -1, so theta = v includes v).
    best_err = n_neg              # theta below all: every negative errs
    best_gap = math.inf
    best_theta = fs[0] - 1.0
    pos_le = 0
    neg_le = 0
    i = 0
    n = len(fs)
    while i < n:
        j = i
        while j < n and fs[j] == fs[i]:
            if ss[j] > 0:
                pos_le += 1
            else:
                neg_le += 1
            j += 1
        err = pos_le + (n_neg - neg_le)
        if j < n:
            gap = fs[j] - fs[i]
            theta = 0.5 * (fs[i] + fs[j])
        else:
            gap = math.inf
            theta = fs[i] + 1.0
        if err < best_err or (err == best_err and gap > best_gap):
            best_err, best_gap, best_theta = err, gap, theta
        i = j
    return float(best_theta), int(best_err)


def error_rate(c: PairClassifier, pairs) -> float:
    """Fraction of (Spectrum, sign) pairs misclassified by c."""
    if not pairs:
        raise ValueError("no samples to evaluate")
    f, signs = evaluations(c, pairs)
    return threshold_errors(f, signs, c.theta) / len(pairs)


def classifier_to_json(c: PairClassifier, pair: tuple[str, str] | None = None) -> str:
    obj = {
        "pos": {"start": c.pos_neuron.range.start, "end": c.pos_neuron.range.end,
                "k": c.pos_neuron.order_index},
        "neg": {"start": c.neg_neuron.range.start, "end": c.neg_neuron.range.end,
                "k": c.neg_neuron.order_index},
        "theta": c.theta,
        "kind": c.kind,
    }
    if pair is not None:
        obj["pair"] = list(pair)
    return json.dumps(obj, indent=2)


def classifier_from_json(text: str) -> PairClassifier:
    obj = json.loads(text)
    def neuron(d):
        return QuantileNeuron(SpectralRange(int(d["start"]), int(d["end"])), int(d["k"]))
    return PairClassifier(
        pos_neuron=neuron(obj["pos"]),
        neg_neuron=neuron(obj["neg"]),
        theta=float(obj["theta"]),
        kind=obj["kind"],
    )
