"""Independent brute-force reference implementations.

These deliberately avoid the fast paths (numba kernels, incremental
scans): thresholds are tried one candidate at a time and the classifier
family is enumerated with plain nested loops over classifier objects.
They exist to cross-check the optimized search on small instances, both
in the test suite and via the selftest CLI command.
"""

from __future__ import annotations

import numpy as np

from .classifier import fisher_b, fisher_z, stats_of_evaluations
from .search import enumerate_neurons

__all__ = ["brute_force_threshold", "brute_force_search"]


def brute_force_threshold(evals):
    """Minimum misclassification count over every candidate threshold.

    Tries theta at each evaluation value plus one position below the
    minimum (classification rule: +1 iff value > theta, ties -1).
    """
    values = np.array([v for v, _ in evals], dtype=np.float64)
    signs = np.array([sg for _, sg in evals], dtype=np.int64)
    thetas = np.concatenate([[values.min() - 1.0], np.unique(values)])
    preds = np.where(values[None, :] > thetas[:, None], 1, -1)
    return int((preds != signs[None, :]).sum(axis=1).min())


def brute_force_search(pairs_train, max_width: int, kind: str):
    """Per-width optimal (error count, fisher score) by naive enumeration.

    Evaluates every ordered neuron pair with both range widths <= w via
    the classifier-object API, one sample at a time.  Returns a dict
    width -> (best error count, best fisher among minimal-error pairs).
    """
    n_points = pairs_train[0][0].n_points
    neurons = list(enumerate_neurons(n_points, max_width))
    # cache responses per neuron
    resp = [np.array([nu.respond(s.values) for s, _ in pairs_train]) for nu in neurons]
    signs = np.array([sg for _, sg in pairs_train])
    fisher_fn = fisher_z if kind == "Z" else fisher_b

    best = {}
    for ia, na in enumerate(neurons):
        for ib, nb in enumerate(neurons):
            w = max(na.range.width, nb.range.width)
            f = resp[ia] - resp[ib]
            if kind == "Z":
                pred = np.where(f > 0.0, 1, -1)
                err = int(np.count_nonzero(pred != signs))
            else:
                err = brute_force_threshold(list(zip(f, signs)))
            fis = fisher_fn(stats_of_evaluations(f, signs))
            cur = best.get(w)
            if cur is None or err < cur[0] or (err == cur[0] and fis > cur[1]):
                best[w] = (err, fis)
    # widen: best at width w includes all pairs with max width <= w
    out = {}
    running = None
    for w in range(1, max_width + 1):
        cand = best.get(w)
        if cand is not None and (
            running is None
            or cand[0] < running[0]
            or (cand[0] == running[0] and cand[1] > running[1])
        ):
            running = cand
        if running is not None:
            out[w] = running
    return out
