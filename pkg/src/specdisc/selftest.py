"""Built-in oracle-equivalence and invariant checks (CLI `selftest`)."""

from __future__ import annotations

import numpy as np

from .classifier import (
    PairClassifier,
    QuantileNeuron,
    SpectralRange,
    classify,
    discriminant,
    fit_threshold,
    quantile,
)
from .netlist import simulate_netlist, to_netlist
from .oracles import brute_force_search, brute_force_threshold
from .search import SearchConfig, search_best
from .spectra import Spectrum, Split


def _random_classifier(rng, n_points, max_width=6):
    def neuron():
        w = int(rng.integers(1, max_width + 1))
        start = int(rng.integers(1, n_points - w + 2))
        k = int(rng.integers(1, w + 1))
        return QuantileNeuron(SpectralRange(start, start + w - 1), k)
    return PairClassifier(neuron(), neuron(), 0.0, "Z")


def _random_pairs(rng, n_points, n_samples):
    pairs = []
    for i in range(n_samples):
        sg = 1 if i % 2 == 0 else -1
        shiftv = rng.normal() * sg
        values = rng.normal(size=n_points) + shiftv
        pairs.append((Spectrum(values, "p" if sg > 0 else "n", Split.TRAIN, str(i)), sg))
    return pairs


def run(verbose: bool = False, instances: int = 10) -> int:
    """Run all suites; returns the number of failed checks."""
    failures = 0

    def check(name, ok):
        nonlocal failures
        if not ok:
            failures += 1
        if verbose:
            print(f"{'PASS' if ok else 'FAIL'}  {name}")

    rng = np.random.default_rng(12345)

    # threshold fitting vs exhaustive scan
    ok = True
    for _ in range(200):
        n = int(rng.integers(2, 50))
        vals = rng.normal(size=n)
        signs = rng.choice([-1, 1], size=n)
        if not ((signs > 0).any() and (signs < 0).any()):
            continue
        evals = list(zip(vals, signs))
        _, err = fit_threshold(evals)
        if err != brute_force_threshold(evals):
            ok = False
    check("fit_threshold matches brute-force threshold scan", ok)

    # quantile vs full sort
    ok = True
    for _ in range(500):
        v = rng.normal(size=int(rng.integers(1, 20)))
        k = int(rng.integers(1, len(v) + 1))
        if quantile(v, k) != np.sort(v)[k - 1]:
            ok = False
    check("quantile matches full-sort oracle", ok)

    # exhaustive search vs naive quadruple loop on small instances
    ok = True
    for i in range(instances):
        irng = np.random.default_rng(1000 + i)
        n_points = int(irng.integers(4, 10))
        n_samples = int(irng.integers(6, 20))
        L = int(irng.integers(1, min(4, n_points) + 1))
        pairs = _random_pairs(irng, n_points, n_samples)
        kind = "Z" if i % 2 == 0 else "B"
        rep = search_best(pairs, [], SearchConfig(max_width=L, kind=kind))
        oracle = brute_force_search(pairs, L, kind)
        for w, (err, fis) in oracle.items():
            got = rep.per_width[w]
            if round(got.train_error * n_samples) != err:
                ok = False
            elif np.isfinite(fis) and not np.isclose(got.fisher_train, fis, rtol=1e-9):
                ok = False
            elif not np.isfinite(fis) and got.fisher_train != fis:
                ok = False
    check("search_best matches naive brute force", ok)

    # loudness-shift invariance
    ok = True
    for _ in range(200):
        c = _random_classifier(rng, 16)
        v = rng.normal(size=16) * 5
        d = float(rng.uniform(-60, 60))
        if abs(discriminant(c, v + d) - discriminant(c, v)) > 1e-9:
            ok = False
    check("loudness-shift invariance of the discriminant", ok)

    # in-range permutation invariance (exact); permuting values inside one
    # neuron's range must not touch the other neuron, so ranges are disjoint
    ok = True
    for _ in range(200):
        c = _random_classifier(rng, 16)
        while not (c.pos_neuron.range.end < c.neg_neuron.range.start
                   or c.neg_neuron.range.end < c.pos_neuron.range.start):
            c = _random_classifier(rng, 16)
        v = rng.normal(size=16) * 5
        vp = v.copy()
        r = c.pos_neuron.range
        vp[r.start - 1 : r.end] = rng.permutation(vp[r.start - 1 : r.end])
        if discriminant(c, vp) != discriminant(c, v):
            ok = False
    check("in-range permutation invariance (exact)", ok)

    # netlist simulation equals direct classification
    ok = True
    for _ in range(100):
        c = _random_classifier(rng, 16)
        net = to_netlist(c)
        v = rng.normal(size=16) * 5
        if simulate_netlist(net, v) != classify(c, v):
            ok = False
    check("netlist simulation equals classify", ok)

    if verbose:
        print(f"{failures} failure(s)")
    return failures
