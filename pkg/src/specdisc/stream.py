"""PCM audio framing, log-periodogram extraction and classifier scanning.

Turns a WAV clip into a sequence of log-power spectra commensurate with
the training data, then evaluates a trained classifier frame by frame.
The resulting discriminant trace makes phoneme transitions visible as
threshold crossings; because the classifier is loudness-balanced, the
trace is unaffected by rescaling the clip amplitude (up to the log
floor on silent bins).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .classifier import PairClassifier, discriminant
from .spectra import Spectrum, Split

__all__ = [
    "AudioClip",
    "FrameSpec",
    "Trace",
    "read_pcm",
    "write_pcm",
    "frame_log_periodogram",
    "scan",
]

LOG_FLOOR = 1e-12

WAVE_FORMAT_NAMES = {
    0x0001: "PCM",
    0x0003: "IEEE_FLOAT",
    0x0006: "ALAW",
    0x0007: "MULAW",
    0xFFFE: "EXTENSIBLE",
}


@dataclass(frozen=True)
class AudioClip:
    samples: np.ndarray  # mono, in [-1, 1]
    sample_rate: int

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        if s.ndim != 1 or s.size == 0:
            raise ValueError("audio clip must be a non-empty 1-D signal")
        if self.sample_rate <= 0:
            raise ValueError("sample rate must be positive")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)


@dataclass(frozen=True)
class FrameSpec:
    frame_len: int = 512
    hop: int = 256
    window: str = "hamming"  # or "rectangular"

    def __post_init__(self):
        if self.frame_len < 2 or self.frame_len & (self.frame_len - 1):
            raise ValueError("frame_len must be a power of two >= 2")
        if not (1 <= self.hop <= self.frame_len):
            raise ValueError("hop must be in 1..frame_len")
        if self.window not in ("hamming", "rectangular"):
            raise ValueError(f"unknown window {self.window!r}")


@dataclass(frozen=True)
class Trace:
    times: np.ndarray
    values: np.ndarray
    theta: float

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise ValueError("times and values must have equal length")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")


def read_pcm(path) -> AudioClip:
    """Read a RIFF/WAVE file with 16-bit PCM samples (stereo is averaged)."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise ValueError(f"{path}: not a RIFF/WAVE file")
    pos = 12
    fmt = None
    payload = None
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (size,) = struct.unpack("<I", data[pos + 4 : pos + 8])
        body = data[pos + 8 : pos + 8 + size]
        if chunk_id == b"fmt ":
            fmt = struct.unpack("<HHIIHH", body[:16])
        elif chunk_id == b"data":
            payload = body
        pos += 8 + size + (size & 1)
    if fmt is None or payload is None:
        raise ValueError(f"{path}: missing fmt or data chunk")
    audio_format, channels, rate, _, _, bits = fmt
    if audio_format != 0x0001:
        name = WAVE_FORMAT_NAMES.get(audio_format, hex(audio_format))
        raise ValueError(f"{path}: unsupported WAVE format tag {name}; only 16-bit PCM is supported")
    if bits != 16:
        raise ValueError(f"{path}: unsupported PCM sample width {bits} bits (need 16)")
    raw = np.frombuffer(payload, dtype="<i2")
    if channels > 1:
        raw = raw[: len(raw) - len(raw) % channels].reshape(-1, channels)
        samples = raw.mean(axis=1) / 32768.0
    else:
        samples = raw / 32768.0
    return AudioClip(samples=samples, sample_rate=rate)


def write_pcm(clip: AudioClip, path):
    """Write a mono 16-bit PCM WAV; read_pcm round-trips it bitwise."""
    ints = np.clip(np.round(clip.samples * 32768.0), -32768, 32767).astype("<i2")
    payload = ints.tobytes()
    with open(path, "wb") as fh:
        fh.write(b"RIFF")
        fh.write(struct.pack("<I", 36 + len(payload)))
        fh.write(b"WAVE")
        fh.write(b"fmt ")
        fh.write(struct.pack("<IHHIIHH", 16, 1, 1, clip.sample_rate,
                             clip.sample_rate * 2, 2, 16))
        fh.write(b"data")
        fh.write(struct.pack("<I", len(payload)))
        fh.write(payload)
        if len(payload) & 1:
            fh.write(b"\x00")


def frame_log_periodogram(clip: AudioClip, spec: FrameSpec = FrameSpec(),
                          n_out: int = 256) -> list[Spectrum]:
    """Log10 power spectra of successive frames, first n_out bins each.

    Bin i (1-based) corresponds to frequency (i-1) * rate / frame_len.
    Power is floored before the log so silent frames stay finite.
    """
    if n_out > spec.frame_len // 2:
        raise ValueError(f"n_out {n_out} exceeds frame_len/2 = {spec.frame_len // 2}")
    x = clip.samples
    if len(x) < spec.frame_len:
        return []
    win = np.hamming(spec.frame_len) if spec.window == "hamming" else np.ones(spec.frame_len)
    n_frames = (len(x) - spec.frame_len) // spec.hop + 1
    out = []
    for f in range(n_frames):
        start = f * spec.hop
        frame = x[start : start + spec.frame_len] * win
        power = np.abs(np.fft.rfft(frame)) ** 2
        logp = np.log10(np.maximum(power[:n_out], LOG_FLOOR))
        center = (start + spec.frame_len / 2) / clip.sample_rate
        out.append(Spectrum(values=logp, label="frame",
                            split=Split.TEST, sample_id=f"frame{f}@{center:.6f}s"))
    return out


def scan(clip: AudioClip, spec: FrameSpec, c: PairClassifier, n_out: int = 256) -> Trace:
    """Discriminant value of the classifier on every frame of the clip."""
    needed = max(c.pos_neuron.range.end, c.neg_neuron.range.end)
    if needed > n_out:
        raise ValueError(f"classifier needs {needed} spectrum points but n_out is {n_out}")
    frames = frame_log_periodogram(clip, spec, n_out)
    times = np.array([(f * spec.hop + spec.frame_len / 2) / clip.sample_rate
                      for f in range(len(frames))])
    values = np.array([discriminant(c, s) for s in frames])
    return Trace(times=times, values=values, theta=c.theta)
