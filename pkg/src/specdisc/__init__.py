"""Quantile-pair spectral discriminants for pairwise phoneme classification.

A library for training and evaluating two-neuron min/max networks over
log-periodogram features: each neuron outputs an order statistic of a
contiguous spectral range, and the classifier thresholds the difference
of the two neuron outputs.  Includes exhaustive discrete search, linear
and ordered-weighted baselines, audio scanning, and hardware netlist
export.
"""

from .spectra import Spectrum, Dataset, PairTask, load_dataset, save_dataset, select_pair, shift_loudness
from .classifier import (
    SpectralRange,
    QuantileNeuron,
    PairClassifier,
    ClassStats,
    quantile,
    discriminant,
    classify,
    class_stats,
    fisher_b,
    fisher_z,
    fit_threshold,
    error_rate,
)
from .netlist import Netlist, to_netlist, simulate_netlist
from .search import SearchConfig, SearchReport, enumerate_neurons, search_best, pairwise_sweep
from .baselines import ConstraintClass, LinearOrderedModel, feature_vector, lda_closed_form, optimize_constrained, table2_run
from .stream import AudioClip, FrameSpec, Trace, read_pcm, write_pcm, frame_log_periodogram, scan

__version__ = "0.1.0"
