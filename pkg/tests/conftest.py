import os
from pathlib import Path

import numpy as np
import pytest

from specdisc.spectra import Dataset, Spectrum, Split, load_dataset

REFERENCE_ENV = "SPECDISC_PHONEME_CSV"
REFERENCE_DEFAULT = Path(__file__).resolve().parent.parent / "data" / "phoneme.csv"
REFERENCE_HINT = (
    "reference phoneme dataset not found: set the SPECDISC_PHONEME_CSV "
    "environment variable or place the ElemStatLearn phoneme CSV at "
    f"{REFERENCE_DEFAULT} (4509 rows, columns x.1..x.256, g, speaker)"
)

# class templates: (bump center, bump width); loosely phoneme-like, with
# dcl/iy made hard to separate so threshold fitting stays interesting
SYNTH_CLASSES = {
    "aa": (10, 6),
    "ao": (22, 6),
    "dcl": (40, 8),
    "iy": (46, 8),
    "sh": (64, 6),
}
SYNTH_N_POINTS = 80


def make_synth_dataset(n_train=40, n_test=20, n_points=SYNTH_N_POINTS, seed=7):
    """Five-class synthetic log-spectrum dataset with per-sample loudness."""
    rng = np.random.default_rng(seed)
    samples = []
    for label, (center, width) in SYNTH_CLASSES.items():
        for i in range(n_train + n_test):
            split = Split.TRAIN if i < n_train else Split.TEST
            base = rng.normal(scale=0.6, size=n_points)
            amp = rng.uniform(2.0, 4.0)
            idx = np.arange(n_points)
            base += amp * np.exp(-0.5 * ((idx - center) / (width / 2.0)) ** 2)
            base += rng.uniform(-3.0, 3.0)  # loudness offset
            samples.append(Spectrum(base, label, split, f"{label}{i}"))
    return Dataset.from_samples(samples)


@pytest.fixture(scope="session")
def synth_dataset():
    return make_synth_dataset()


def reference_dataset_path():
    env = os.environ.get(REFERENCE_ENV)
    if env:
        return Path(env)
    return REFERENCE_DEFAULT


@pytest.fixture(scope="session")
def phoneme_dataset():
    """The real ElemStatLearn phoneme dataset; fails loudly when absent."""
    path = reference_dataset_path()
    if not path.exists():
        pytest.fail(REFERENCE_HINT)
    return load_dataset(path)


def random_classifier(rng, n_points, max_width=6, kind="Z", theta=0.0, disjoint=False):
    from specdisc.classifier import PairClassifier, QuantileNeuron, SpectralRange

    def neuron():
        w = int(rng.integers(1, max_width + 1))
        start = int(rng.integers(1, n_points - w + 2))
        k = int(rng.integers(1, w + 1))
        return QuantileNeuron(SpectralRange(start, start + w - 1), k)

    while True:
        pos, neg = neuron(), neuron()
        if disjoint and not (pos.range.end < neg.range.start or neg.range.end < pos.range.start):
            continue
        return PairClassifier(pos, neg, theta, kind)


def random_pairs(rng, n_points, n_samples, spread=1.0):
    """Two interleaved classes of random spectra as (Spectrum, sign) pairs."""
    pairs = []
    for i in range(n_samples):
        sg = 1 if i % 2 == 0 else -1
        values = rng.normal(size=n_points) + sg * spread * rng.uniform(0, 1)
        label = "p" if sg > 0 else "n"
        pairs.append((Spectrum(values, label, Split.TRAIN, str(i)), sg))
    return pairs
