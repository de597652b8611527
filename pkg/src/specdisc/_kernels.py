"""Numba kernels for the exhaustive classifier search.

Both kernels scan every ordered pair of quantile neurons (rows of a
precomputed neuron-response matrix Q) and keep, per neuron ``a`` and per
exact pair width ``w = max(width_a, width_b)``, the best partner ``b``
under (error count ascending, Fisher tie-break descending, b ascending).
The caller merges these local slots in canonical neuron order, which
makes the result independent of the parallel schedule.

A shared array of best-error-so-far per width bucket is updated without
synchronization.  Every value written there is an achieved error count,
hence a valid upper bound on the bucket minimum, so candidates whose
running error exceeds it can never win and may be abandoned early; lost
updates only cost speed, never correctness.
"""

import numpy as np
from numba import njit, prange

BIG = np.int64(np.iinfo(np.int64).max // 2)


@njit(cache=True)
def _fisher_z_from_sums(s1, q1, n1, s2, q2, n2):
    mu1 = s1 / n1
    mu2 = s2 / n2
    if mu1 == 0.0 or mu2 == 0.0 or (mu1 > 0.0) == (mu2 > 0.0):
        return 0.0
    v1 = max(q1 / n1 - mu1 * mu1, 0.0)
    v2 = max(q2 / n2 - mu2 * mu2, 0.0)
    r1 = np.inf if v1 == 0.0 else mu1 * mu1 / v1
    r2 = np.inf if v2 == 0.0 else mu2 * mu2 / v2
    return min(r1, r2)


@njit(cache=True)
def _fisher_b_from_sums(s1, q1, n1, s2, q2, n2):
    mu1 = s1 / n1
    mu2 = s2 / n2
    v1 = max(q1 / n1 - mu1 * mu1, 0.0)
    v2 = max(q2 / n2 - mu2 * mu2, 0.0)
    num = (mu1 - mu2) ** 2
    den = v1 + v2
    if den == 0.0:
        return np.inf if num > 0.0 else 0.0
    return num / den


@njit(parallel=True, cache=True)
def z_search_kernel(Q, widths, signs, n_widths):
    """Best theta=0 partner per (neuron, exact width bucket)."""
    n_neurons, n_samples = Q.shape
    local_err = np.full((n_neurons, n_widths), BIG, np.int64)
    local_fis = np.full((n_neurons, n_widths), -1.0, np.float64)
    local_b = np.full((n_neurons, n_widths), -1, np.int64)
    shared = np.full(n_widths, BIG, np.int64)
    n1 = 0
    n2 = 0
    for s in range(n_samples):
        if signs[s] > 0:
            n1 += 1
        else:
            n2 += 1

    for a in prange(n_neurons):
        wa = widths[a]
        for b in range(n_neurons):
            w = wa if wa >= widths[b] else widths[b]
            wi = w - 1
            thr = local_err[a, wi]
            for t in range(w):
                if shared[t] < thr:
                    thr = shared[t]
            err = 0
            s1 = 0.0
            q1 = 0.0
            s2 = 0.0
            q2 = 0.0
            pruned = False
            for s in range(n_samples):
                d = Q[a, s] - Q[b, s]
                if signs[s] > 0:
                    s1 += d
                    q1 += d * d
                    if d <= 0.0:
                        err += 1
                        if err > thr:
                            pruned = True
                            break
                else:
                    s2 += d
                    q2 += d * d
                    if d > 0.0:
                        err += 1
                        if err > thr:
                            pruned = True
                            break
            if pruned:
                continue
            fis = _fisher_z_from_sums(s1, q1, n1, s2, q2, n2)
            if err < local_err[a, wi] or (err == local_err[a, wi] and fis > local_fis[a, wi]):
                local_err[a, wi] = err
                local_fis[a, wi] = fis
                local_b[a, wi] = b
                if err < shared[wi]:
                    shared[wi] = err  # racy but monotone-valid upper bound
    return local_err, local_fis, local_b


@njit(parallel=True, cache=True)
def b_search_kernel(Q, widths, signs, n_widths):
    """Best fitted-threshold partner per (neuron, exact width bucket)."""
    n_neurons, n_samples = Q.shape
    local_err = np.full((n_neurons, n_widths), BIG, np.int64)
    local_fis = np.full((n_neurons, n_widths), -1.0, np.float64)
    local_b = np.full((n_neurons, n_widths), -1, np.int64)
    shared = np.full(n_widths, BIG, np.int64)
    n2 = 0
    n1 = 0
    for s in range(n_samples):
        if signs[s] > 0:
            n1 += 1
        else:
            n2 += 1
    p1 = n_samples // 4
    p2 = n_samples // 2
    p3 = (3 * n_samples) // 4

    for a in prange(n_neurons):
        wa = widths[a]
        d = np.empty(n_samples, np.float64)
        for b in range(n_neurons):
            w = wa if wa >= widths[b] else widths[b]
            wi = w - 1
            thr = local_err[a, wi]
            for t in range(w):
                if shared[t] < thr:
                    thr = shared[t]

            s1 = 0.0
            q1 = 0.0
            s2 = 0.0
            q2 = 0.0
            min_pos = np.inf
            max_neg = -np.inf
            for s in range(n_samples):
                v = Q[a, s] - Q[b, s]
                d[s] = v
                if signs[s] > 0:
                    s1 += v
                    q1 += v * v
                    if v < min_pos:
                        min_pos = v
                else:
                    s2 += v
                    q2 += v * v
                    if v > max_neg:
                        max_neg = v

            if min_pos > max_neg:
                err = 0
            else:
                # lower bound: for any probe v, every threshold errs on at
                # least min(#pos <= v, #neg >= v) samples
                v1p = d[p1]
                v2p = d[p2]
                v3p = d[p3]
                pl1 = 0
                ng1 = 0
                pl2 = 0
                ng2 = 0
                pl3 = 0
                ng3 = 0
                for s in range(n_samples):
                    v = d[s]
                    if signs[s] > 0:
                        if v <= v1p:
                            pl1 += 1
                        if v <= v2p:
                            pl2 += 1
                        if v <= v3p:
                            pl3 += 1
                    else:
                        if v >= v1p:
                            ng1 += 1
                        if v >= v2p:
                            ng2 += 1
                        if v >= v3p:
                            ng3 += 1
                lb = min(pl1, ng1)
                lb2 = min(pl2, ng2)
                if lb2 > lb:
                    lb = lb2
                lb3 = min(pl3, ng3)
                if lb3 > lb:
                    lb = lb3
                if lb > thr:
                    continue
                order = np.argsort(d)
                err = n2
                pos_le = 0
                neg_le = 0
                i = 0
                while i < n_samples:
                    v = d[order[i]]
                    while i < n_samples and d[order[i]] == v:
                        if signs[order[i]] > 0:
                            pos_le += 1
                        else:
                            neg_le += 1
                        i += 1
                    e = pos_le + (n2 - neg_le)
                    if e < err:
                        err = e
                if err > thr:
                    continue
            fis = _fisher_b_from_sums(s1, q1, n1, s2, q2, n2)
            if err < local_err[a, wi] or (err == local_err[a, wi] and fis > local_fis[a, wi]):
                local_err[a, wi] = err
                local_fis[a, wi] = fis
                local_b[a, wi] = b
                if err < shared[wi]:
                    shared[wi] = err
    return local_err, local_fis, local_b
