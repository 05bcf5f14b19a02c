"""Audio container, 16-bit WAV I/O, framing, and a deterministic speech-like generator."""

from __future__ import annotations

import wave
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, FormatError, ParameterError, ShapeError

PCM_SCALE = 32768  # 16-bit full scale


@dataclass(frozen=True)
class AudioSignal:
    """Mono audio: finite float samples at a fixed sample rate.

    Samples are nominally in [-1, +1]; values outside that range are
    tolerated in memory and clamped when written to disk.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ShapeError("expected a 1-D mono sample array, got shape %s" % (samples.shape,))
        if not np.all(np.isfinite(samples)):
            raise ParameterError("samples must be finite")
        if int(self.sample_rate) <= 0:
            raise ParameterError("sample_rate must be positive")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate

    def replace_samples(self, samples: np.ndarray) -> "AudioSignal":
        """New signal with the same rate and different samples."""
        return AudioSignal(samples, self.sample_rate)


@dataclass(frozen=True)
class FrameSpec:
    """Non-overlapping framing: one embedded bit per full frame."""

    frame_len: int = 600

    def __post_init__(self):
        if int(self.frame_len) < 2:
            raise ParameterError("frame_len must be at least 2")
        object.__setattr__(self, "frame_len", int(self.frame_len))


def read_wav(path) -> AudioSignal:
    """Read a 16-bit PCM RIFF/WAVE file; stereo is averaged down to mono.

    Integer samples are scaled by 1/32768, so 32767 maps to 32767/32768
    and -32768 maps to -1.0.
    """
    try:
        with wave.open(str(path), "rb") as wav:
            n_channels = wav.getnchannels()
            sampwidth = wav.getsampwidth()
            comptype = wav.getcomptype()
            sample_rate = wav.getframerate()
            n_frames = wav.getnframes()
            raw = wav.readframes(n_frames)
    except wave.Error as exc:
        raise FormatError(f"not a readable PCM WAV file: {exc}") from exc
    except EOFError as exc:
        raise IOError(f"truncated WAV file: {path}") from exc
    if comptype != "NONE":
        raise FormatError(f"unsupported WAV compression type {comptype!r}")
    if sampwidth != 2:
        raise FormatError(f"only 16-bit PCM is supported, got {8 * sampwidth}-bit")
    if n_channels not in (1, 2):
        raise FormatError(f"only mono or stereo supported, got {n_channels} channels")
    if len(raw) < n_frames * n_channels * 2:
        raise IOError(f"truncated WAV data in {path}")
    ints = np.frombuffer(raw, dtype="<i2").astype(np.float64)
    if n_channels == 2:
        ints = ints.reshape(-1, 2).mean(axis=1)
    return AudioSignal(ints / PCM_SCALE, sample_rate)


def write_wav(signal: AudioSignal, path) -> None:
    """Write mono 16-bit PCM; amplitudes are clamped to [-1, +1] and
    scaled by 32768 with saturation at +32767."""
    clamped = np.clip(signal.samples, -1.0, 1.0)
    ints = np.clip(np.rint(clamped * PCM_SCALE), -PCM_SCALE, PCM_SCALE - 1).astype("<i2")
    with wave.open(str(path), "wb") as wav:
        wav.setnchannels(1)
        wav.setsampwidth(2)
        wav.setframerate(signal.sample_rate)
        wav.writeframes(ints.tobytes())


def frame_signal(signal: AudioSignal, spec: FrameSpec) -> np.ndarray:
    """Split into consecutive non-overlapping frames of spec.frame_len.

    Returns an (n_frames, frame_len) array. A trailing partial frame is
    dropped (it is never embedded into); recover it with
    ``signal.samples[n_frames * frame_len:]``.
    """
    n = len(signal)
    frame_len = spec.frame_len
    if frame_len > n:
        raise CapacityError(f"frame_len {frame_len} exceeds signal length {n}")
    n_frames = n // frame_len
    return signal.samples[: n_frames * frame_len].reshape(n_frames, frame_len).copy()


def assemble_frames(frames, tail, sample_rate: int) -> AudioSignal:
    """Concatenate frames and append the untouched tail.

    Inverse of frame_signal when no frame was modified.
    """
    frames = [np.asarray(f, dtype=np.float64) for f in frames]
    if frames:
        frame_len = frames[0].shape[0]
        for f in frames:
            if f.shape != (frame_len,):
                raise ShapeError("all frames must have the same length")
        body = np.concatenate(frames)
    else:
        body = np.zeros(0)
    tail = np.asarray(tail, dtype=np.float64)
    return AudioSignal(np.concatenate([body, tail]), sample_rate)


def tail_of(signal: AudioSignal, spec: FrameSpec) -> np.ndarray:
    """Residual samples after the last full frame."""
    n_frames = len(signal) // spec.frame_len
    return signal.samples[n_frames * spec.frame_len :].copy()


def synth_speech_like(duration_s: float, sample_rate: int, seed: int) -> AudioSignal:
    """Deterministic speech-like test signal.

    A slowly amplitude-modulated harmonic series whose fundamental drifts
    between 100 and 300 Hz, a noise floor band-limited to about 7 kHz, and
    sparse plosive-like bursts that give a speech-like crest factor. The
    harmonic amplitude profile, noise level and high-frequency skirt vary
    per seed so a corpus of these files has speaker-like diversity. The
    result is peak-normalized to 0.9 and occupies the 100 Hz - 8 kHz range.
    """
    if duration_s <= 0:
        raise ParameterError("duration_s must be positive")
    n = int(round(duration_s * sample_rate))
    if n < 16:
        raise ParameterError("duration too short for synthesis")
    rng = np.random.default_rng(seed)
    t = np.arange(n) / sample_rate

    # drifting fundamental, 100..300 Hz
    drift_hz = rng.uniform(0.08, 0.3)
    f0 = 200.0 + 100.0 * np.sin(2.0 * np.pi * drift_hz * t + rng.uniform(0.0, 2.0 * np.pi))
    phase = 2.0 * np.pi * np.cumsum(f0) / sample_rate

    # harmonic series; 23 partials keep the top partial below 7 kHz at the
    # highest fundamental. The rolloff exponent and a per-partial gain
    # (about +-2.5 dB) differ per seed.
    voiced = np.zeros(n)
    harmonic_pow = rng.uniform(0.35, 0.75)
    partial_gain = rng.uniform(-0.125, 0.125, size=23)
    for k in range(1, 24):
        voiced += (
            k**-harmonic_pow
            * 10.0 ** partial_gain[k - 1]
            * np.sin(k * phase + rng.uniform(0.0, 2.0 * np.pi))
        )

    # syllable-rate amplitude modulation with a nonzero floor
    syllable_hz = rng.uniform(2.0, 5.0)
    mod = 0.5 + 0.5 * np.sin(2.0 * np.pi * syllable_hz * t + rng.uniform(0.0, 2.0 * np.pi))
    envelope = 0.3 + 0.7 * mod**2
    body = envelope * voiced

    # noise floor: band-limited to ~7 kHz (steep rolloff at 6.3 kHz) above
    # a shallow per-seed high-frequency skirt that itself dies out by 8.5 kHz
    noise = rng.standard_normal(n)
    freqs = np.fft.rfftfreq(n, 1.0 / sample_rate)
    skirt_db = rng.uniform(-18.0, -10.0)
    skirt = 10.0 ** (skirt_db / 20.0) / np.sqrt(1.0 + (freqs / 8500.0) ** 24)
    rolloff = np.maximum(1.0 / np.sqrt(1.0 + (freqs / 6300.0) ** 64), skirt)
    noise = np.fft.irfft(np.fft.rfft(noise) * rolloff, n)
    body_rms = np.sqrt(np.mean(body**2))
    noise_level = rng.uniform(0.3, 0.42)
    noise *= noise_level * body_rms / max(np.sqrt(np.mean(noise**2)), 1e-300)
    x = body + noise

    # sparse plosive-like bursts (one per second on average) set the crest
    # factor; they are band-limited to the speech range like everything else
    burst_len = 150
    n_bursts = max(1, int(round(duration_s)))
    peak_body = np.max(np.abs(x))
    decay = np.exp(-np.arange(burst_len) / 25.0)
    burst_freqs = np.fft.rfftfreq(burst_len, 1.0 / sample_rate)
    burst_shape = 1.0 / np.sqrt(1.0 + (burst_freqs / 7000.0) ** 16)
    for pos in rng.integers(0, max(1, n - burst_len), size=n_bursts):
        burst = np.fft.irfft(np.fft.rfft(rng.standard_normal(burst_len)) * burst_shape, burst_len)
        burst *= decay
        burst *= 4.5 * peak_body / max(np.max(np.abs(burst)), 1e-300)
        x[pos : pos + burst_len] += burst

    return AudioSignal(x * (0.9 / np.max(np.abs(x))), sample_rate)


def random_bits(n_bits: int, seed: int) -> np.ndarray:
    """Seeded uniform message bits as a uint8 array over {0, 1}."""
    if n_bits < 0:
        raise ParameterError("n_bits must be non-negative")
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2, size=n_bits, dtype=np.uint8)


def as_bits(bits) -> np.ndarray:
    """Coerce a bit sequence (iterable/string of 0 and 1) to a uint8 array."""
    if isinstance(bits, str):
        bits = [int(c) for c in bits]
    arr = np.asarray(bits, dtype=np.int64)
    if arr.ndim != 1:
        raise ShapeError("bits must be a 1-D sequence")
    if arr.size and not np.all((arr == 0) | (arr == 1)):
        raise ParameterError("bits must be 0 or 1")
    return arr.astype(np.uint8)
