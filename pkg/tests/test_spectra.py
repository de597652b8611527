import numpy as np
import pytest

from specdisc.spectra import (
    Dataset,
    PairTask,
    Spectrum,
    Split,
    load_dataset,
    save_dataset,
    select_pair,
    shift_loudness,
)


def write_csv(path, text):
    path.write_text(text)
    return path


def test_load_small_csv(tmp_path):
    p = write_csv(tmp_path / "d.csv",
                  "x.1,x.2,x.3,g,speaker\n"
                  "1.0,2.0,3.0,a,train.dr1\n"
                  "4.0,5.0,6.0,b,test.dr2\n")
    d = load_dataset(p)
    assert d.n_points == 3
    assert d.class_counts == {"a": {Split.TRAIN: 1}, "b": {Split.TEST: 1}}
    assert np.array_equal(d.samples[0].values, [1.0, 2.0, 3.0])


def test_load_with_row_id_column(tmp_path):
    p = write_csv(tmp_path / "d.csv",
                  "row.names,x.1,x.2,g,speaker\n"
                  "1,1.0,2.0,a,train\n")
    d = load_dataset(p)
    assert d.n_points == 2
    assert d.samples[0].sample_id == "1"


def test_malformed_row_names_row(tmp_path):
    p = write_csv(tmp_path / "d.csv",
                  "x.1,x.2,g,speaker\n"
                  "1.0,2.0,a,train\n"
                  "1.0,a,train\n")
    with pytest.raises(ValueError, match="row 3"):
        load_dataset(p)


def test_nan_feature_names_row(tmp_path):
    p = write_csv(tmp_path / "d.csv",
                  "x.1,x.2,g,speaker\n"
                  "1.0,NaN,a,train\n")
    with pytest.raises(ValueError, match="row 2"):
        load_dataset(p)


def test_unknown_split_tag(tmp_path):
    p = write_csv(tmp_path / "d.csv",
                  "x.1,g,speaker\n"
                  "1.0,a,validation\n")
    with pytest.raises(ValueError, match="split tag"):
        load_dataset(p)


def test_split_tags_case_insensitive(tmp_path):
    p = write_csv(tmp_path / "d.csv",
                  "x.1,g,speaker\n"
                  "1.0,a,TRAIN.dr5.xyz\n"
                  "2.0,a,Test\n")
    d = load_dataset(p)
    assert d.class_counts["a"] == {Split.TRAIN: 1, Split.TEST: 1}


def test_round_trip_writer(tmp_path, synth_dataset):
    p = tmp_path / "out.csv"
    save_dataset(synth_dataset, p)
    d2 = load_dataset(p)
    assert d2.n_points == synth_dataset.n_points
    assert len(d2.samples) == len(synth_dataset.samples)
    for a, b in zip(synth_dataset.samples, d2.samples):
        assert np.array_equal(a.values, b.values)
        assert a.label == b.label and a.split == b.split and a.sample_id == b.sample_id


def test_pair_task_requires_distinct_classes():
    with pytest.raises(ValueError):
        PairTask("dcl", "dcl")


def test_select_pair_counts_and_signs(synth_dataset):
    task = PairTask("dcl", "iy")
    pairs = select_pair(synth_dataset, task, Split.TRAIN)
    counts = synth_dataset.class_counts
    assert len(pairs) == counts["dcl"][Split.TRAIN] + counts["iy"][Split.TRAIN]
    assert all(sg == (1 if s.label == "dcl" else -1) for s, sg in pairs)


def test_select_pair_partitions_both_splits(synth_dataset):
    task = PairTask("aa", "sh")
    train = select_pair(synth_dataset, task, Split.TRAIN)
    test = select_pair(synth_dataset, task, Split.TEST)
    got = {s.sample_id for s, _ in train} | {s.sample_id for s, _ in test}
    expect = {s.sample_id for s in synth_dataset.samples if s.label in ("aa", "sh")}
    assert got == expect
    assert not ({s.sample_id for s, _ in train} & {s.sample_id for s, _ in test})


def test_select_pair_missing_class_errors(synth_dataset):
    with pytest.raises(ValueError, match="zz"):
        select_pair(synth_dataset, PairTask("aa", "zz"), Split.TRAIN)


def test_shift_loudness_basic():
    s = Spectrum(np.array([1.0, 2.0, 3.0]), "a", Split.TRAIN, "s")
    assert np.array_equal(shift_loudness(s, 0.0).values, [1.0, 2.0, 3.0])
    assert np.array_equal(shift_loudness(s, 2.5).values, [3.5, 4.5, 5.5])
    # exactly representable shift round-trips bitwise
    assert np.array_equal(shift_loudness(shift_loudness(s, 2.5), -2.5).values, s.values)
    assert shift_loudness(s, 1.0).label == "a"


def test_shift_loudness_composes_additively():
    rng = np.random.default_rng(0)
    s = Spectrum(rng.normal(size=64) * 10, "a", Split.TRAIN, "s")
    for _ in range(50):
        a, b = rng.uniform(-100, 100, size=2)
        lhs = shift_loudness(shift_loudness(s, a), b).values
        rhs = shift_loudness(s, a + b).values
        assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_dataset_rejects_mixed_lengths():
    s1 = Spectrum(np.zeros(3), "a", Split.TRAIN, "1")
    s2 = Spectrum(np.zeros(4), "a", Split.TEST, "2")
    with pytest.raises(ValueError):
        Dataset.from_samples([s1, s2])


def test_spectrum_rejects_non_finite():
    with pytest.raises(ValueError):
        Spectrum(np.array([1.0, np.inf]), "a", Split.TRAIN, "x")
