import struct

import numpy as np
import pytest

from specdisc.classifier import PairClassifier, QuantileNeuron, SpectralRange
from specdisc.stream import (
    AudioClip,
    FrameSpec,
    frame_log_periodogram,
    read_pcm,
    scan,
    write_pcm,
)


def tone(freq, seconds=1.0, rate=16000, amp=0.5):
    t = np.arange(int(seconds * rate)) / rate
    return AudioClip(amp * np.sin(2 * np.pi * freq * t), rate)


class TestWav:
    def test_round_trip_bitwise(self, tmp_path):
        rng = np.random.default_rng(41)
        clip = AudioClip(np.round(rng.uniform(-1, 1, 16000) * 32767) / 32768.0, 16000)
        p = tmp_path / "a.wav"
        write_pcm(clip, p)
        back = read_pcm(p)
        assert back.sample_rate == 16000
        assert np.array_equal(back.samples, clip.samples)

    def test_one_second_sample_count(self, tmp_path):
        p = tmp_path / "t.wav"
        write_pcm(tone(440), p)
        assert len(read_pcm(p).samples) == 16000

    def test_full_scale_negative_maps_to_minus_one(self, tmp_path):
        p = tmp_path / "m.wav"
        write_pcm(AudioClip(np.array([-1.0, 0.0]), 8000), p)
        back = read_pcm(p)
        assert back.samples[0] == -1.0
        assert back.samples[1] == 0.0

    def test_stereo_downmix(self, tmp_path):
        # hand-rolled 2-channel wav: L = 100, R = 300 -> mean 200
        payload = struct.pack("<4h", 100, 300, -100, -300)
        p = tmp_path / "s.wav"
        with open(p, "wb") as fh:
            fh.write(b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE")
            fh.write(b"fmt " + struct.pack("<IHHIIHH", 16, 1, 2, 8000, 32000, 4, 16))
            fh.write(b"data" + struct.pack("<I", len(payload)) + payload)
        back = read_pcm(p)
        assert np.allclose(back.samples * 32768.0, [200.0, -200.0])

    def test_non_pcm_format_named_in_error(self, tmp_path):
        payload = struct.pack("<4f", 0.0, 0.1, 0.2, 0.3)
        p = tmp_path / "f.wav"
        with open(p, "wb") as fh:
            fh.write(b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE")
            fh.write(b"fmt " + struct.pack("<IHHIIHH", 16, 3, 1, 8000, 32000, 4, 32))
            fh.write(b"data" + struct.pack("<I", len(payload)) + payload)
        with pytest.raises(ValueError, match="IEEE_FLOAT"):
            read_pcm(p)

    def test_not_a_wav(self, tmp_path):
        p = tmp_path / "x.wav"
        p.write_bytes(b"hello world, definitely not riff")
        with pytest.raises(ValueError, match="RIFF"):
            read_pcm(p)


class TestFraming:
    def test_sinusoid_peaks_at_its_bin(self):
        rate, frame_len = 16000, 512
        bin_idx = 20  # 1-based spectrum index 21 maps to bin 20
        freq = bin_idx * rate / frame_len
        frames = frame_log_periodogram(tone(freq, 0.2),
                                       FrameSpec(frame_len, 256, "rectangular"), 256)
        assert frames
        assert int(np.argmax(frames[0].values)) == bin_idx

    def test_doubling_amplitude_adds_log10_of_4(self):
        spec = FrameSpec(256, 128, "hamming")
        rng = np.random.default_rng(43)
        x = rng.uniform(-0.2, 0.2, 4096)
        f1 = frame_log_periodogram(AudioClip(x, 16000), spec, 128)
        f2 = frame_log_periodogram(AudioClip(2 * x, 16000), spec, 128)
        diff = f2[0].values - f1[0].values
        assert np.allclose(diff, np.log10(4.0), atol=1e-9)

    def test_matches_naive_dft_oracle(self):
        rng = np.random.default_rng(44)
        frame_len, n_out = 64, 32
        x = rng.uniform(-0.5, 0.5, frame_len)
        frames = frame_log_periodogram(AudioClip(x, 8000),
                                       FrameSpec(frame_len, frame_len, "rectangular"),
                                       n_out)
        # O(n^2) direct DFT
        n = frame_len
        ks = np.arange(n_out)
        power = np.empty(n_out)
        for k in ks:
            re = sum(x[t] * np.cos(-2 * np.pi * k * t / n) for t in range(n))
            im = sum(x[t] * np.sin(-2 * np.pi * k * t / n) for t in range(n))
            power[k] = re**2 + im**2
        assert np.allclose(10.0 ** frames[0].values, power, rtol=1e-6)

    def test_frame_count_arithmetic(self):
        spec = FrameSpec(512, 128)
        clip = AudioClip(np.zeros(5000), 16000)
        frames = frame_log_periodogram(clip, spec, 256)
        assert len(frames) == (5000 - 512) // 128 + 1

    def test_short_clip_gives_empty_list(self):
        assert frame_log_periodogram(AudioClip(np.zeros(100), 16000),
                                     FrameSpec(512, 256), 256) == []

    def test_n_out_bounded_by_half_frame(self):
        with pytest.raises(ValueError):
            frame_log_periodogram(AudioClip(np.zeros(1024), 16000),
                                  FrameSpec(256, 128), 256)


def two_tilt_clip(rate=16000, seconds=1.0, seed=45):
    """Two stationary noises with different spectral tilt, concatenated."""
    rng = np.random.default_rng(seed)
    n = int(rate * seconds / 2)
    lowpassed = np.convolve(rng.normal(size=n + 16), np.ones(16) / 16, "valid")[:n]
    white = rng.normal(size=n) * 0.2
    x = np.concatenate([lowpassed, white])
    return AudioClip(0.8 * x / np.max(np.abs(x)), rate)


def default_classifier(theta=0.0, kind="Z"):
    return PairClassifier(
        QuantileNeuron(SpectralRange(62, 72), 11),
        QuantileNeuron(SpectralRange(1, 1), 1),
        theta, kind,
    )


class TestScan:
    def test_silent_clip_constant_trace(self):
        clip = AudioClip(np.zeros(4096), 16000)
        tr = scan(clip, FrameSpec(512, 256), default_classifier())
        assert len(tr.values) == (4096 - 512) // 256 + 1
        assert np.all(tr.values == tr.values[0])

    def test_trace_times_strictly_increasing(self):
        tr = scan(two_tilt_clip(), FrameSpec(512, 256), default_classifier())
        assert np.all(np.diff(tr.times) > 0)
        assert tr.theta == 0.0

    def test_level_shift_between_segments(self):
        clip = two_tilt_clip()
        tr = scan(clip, FrameSpec(512, 256), default_classifier())
        half = len(tr.values) // 2
        a, b = tr.values[:half], tr.values[half:]
        se = np.sqrt(a.var(ddof=1) / len(a) + b.var(ddof=1) / len(b))
        assert abs(a.mean() - b.mean()) >= 5 * se

    def test_amplitude_invariance(self):
        clip = two_tilt_clip()
        tr1 = scan(clip, FrameSpec(512, 256), default_classifier())
        tr2 = scan(AudioClip(clip.samples * 0.35, clip.sample_rate),
                   FrameSpec(512, 256), default_classifier())
        assert np.allclose(tr1.values, tr2.values, atol=1e-6)

    def test_classifier_needs_enough_bins(self):
        with pytest.raises(ValueError):
            scan(two_tilt_clip(), FrameSpec(512, 256), default_classifier(), n_out=32)
