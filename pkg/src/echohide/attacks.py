"""Channel impairments applied to stego signals for robustness evaluation.

Every attack preserves the sample count and sample rate of its input.
All are deterministic given their parameters (noise via an explicit seed;
MP3 determinism depends on the external codec).
"""

from __future__ import annotations

import os
import shlex
import shutil
import subprocess
import tempfile
from dataclasses import dataclass

import numpy as np
from scipy import signal as sig

from .audio import AudioSignal, read_wav, write_wav
from .errors import CodecUnavailableError, DegenerateSignalError, ParameterError

FIR_TAPS = 255  # odd-length linear-phase design -> integer group delay

ENV_MP3_ENCODE = "ECHOHIDE_MP3_ENCODE"
ENV_MP3_DECODE = "ECHOHIDE_MP3_DECODE"


@dataclass(frozen=True)
class Awgn:
    snr_db: float = 30.0
    seed: int = 0


@dataclass(frozen=True)
class Mp3:
    kbps: int = 128

    def __post_init__(self):
        if self.kbps not in (64, 96, 128):
            raise ParameterError("MP3 bitrate must be one of 64, 96, 128 kbps")


@dataclass(frozen=True)
class LowPass:
    cutoff_hz: float = 4000.0


@dataclass(frozen=True)
class Resample:
    divisor: int = 2

    def __post_init__(self):
        if self.divisor not in (2, 4):
            raise ParameterError("resample divisor must be 2 or 4")


@dataclass(frozen=True)
class Requantize:
    bits: int = 8

    def __post_init__(self):
        if not 2 <= self.bits <= 16:
            raise ParameterError("requantize depth must be in 2..16 bits")


@dataclass(frozen=True)
class Identity:
    """No-op channel, used as the clean baseline."""


AttackSpec = (Awgn, Mp3, LowPass, Resample, Requantize, Identity)


def attack_awgn(signal: AudioSignal, snr_db: float, seed: int) -> AudioSignal:
    """Add white Gaussian noise scaled to hit the target SNR exactly."""
    x = signal.samples
    p_signal = float(np.mean(x**2))
    if p_signal == 0.0:
        raise DegenerateSignalError("cannot set an SNR against an all-zero signal")
    if not np.isfinite(snr_db):
        raise ParameterError("snr_db must be finite; use the identity attack instead")
    noise = np.random.default_rng(seed).standard_normal(x.size)
    p_target = p_signal / (10.0 ** (snr_db / 10.0))
    noise *= np.sqrt(p_target / np.mean(noise**2))
    return signal.replace_samples(x + noise)


def _lowpass_kernel(cutoff_hz: float, sample_rate: int) -> np.ndarray:
    return sig.firwin(FIR_TAPS, cutoff_hz, fs=sample_rate, window="hamming")


def _zero_phase_fir(x: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Filter and remove the integer group delay, keeping the input length."""
    delay = (kernel.size - 1) // 2
    full = sig.fftconvolve(x, kernel, mode="full")
    return full[delay : delay + x.size]


def attack_lowpass(signal: AudioSignal, cutoff_hz: float) -> AudioSignal:
    """Linear-phase windowed-sinc FIR low-pass, group delay compensated."""
    if not 0 < cutoff_hz < signal.sample_rate / 2:
        raise ParameterError("cutoff must be between 0 and Nyquist")
    kernel = _lowpass_kernel(cutoff_hz, signal.sample_rate)
    return signal.replace_samples(_zero_phase_fir(signal.samples, kernel))


def attack_resample(signal: AudioSignal, divisor: int) -> AudioSignal:
    """Decimate to fs/divisor and interpolate back to fs.

    Anti-alias low-pass at 0.45*(fs/divisor), keep every divisor-th
    sample, zero-stuff back and reapply the same filter (times divisor to
    restore the passband gain). Output length equals input length.
    """
    if divisor not in (2, 4):
        raise ParameterError("resample divisor must be 2 or 4")
    fs = signal.sample_rate
    kernel = _lowpass_kernel(0.45 * fs / divisor, fs)
    low = _zero_phase_fir(signal.samples, kernel)
    decimated = low[::divisor]
    stuffed = np.zeros(signal.samples.size)
    stuffed[:: divisor] = decimated
    restored = _zero_phase_fir(stuffed, kernel) * divisor
    return signal.replace_samples(restored)


def attack_requantize(signal: AudioSignal, bits: int) -> AudioSignal:
    """Round each sample to the nearest of 2**bits uniform levels over [-1, 1)."""
    if not 2 <= bits <= 16:
        raise ParameterError("requantize depth must be in 2..16 bits")
    step = 2.0 ** (1 - bits)
    levels = np.clip(np.rint((signal.samples + 1.0) / step), 0, 2**bits - 1)
    return signal.replace_samples(levels * step - 1.0)


@dataclass(frozen=True)
class CodecHook:
    """Shell command templates with {in}, {out} and {kbps} placeholders."""

    encode: str
    decode: str

    @staticmethod
    def from_env() -> "CodecHook | None":
        encode = os.environ.get(ENV_MP3_ENCODE)
        decode = os.environ.get(ENV_MP3_DECODE)
        if encode and decode:
            return CodecHook(encode, decode)
        return None

    def available(self) -> bool:
        for template in (self.encode, self.decode):
            argv = shlex.split(template)
            if not argv or shutil.which(argv[0]) is None:
                return False
        return True

    def run(self, template: str, in_path: str, out_path: str, kbps: int):
        argv = [
            part.format(**{"in": in_path, "out": out_path, "kbps": kbps})
            for part in shlex.split(template)
        ]
        subprocess.run(argv, check=True, capture_output=True)


def _align_to(reference: np.ndarray, decoded: np.ndarray, max_lag: int = 8192) -> np.ndarray:
    """Trim the codec delay by cross-correlation, then pad/trim to length."""
    n = reference.size
    probe = min(n, 4 * max_lag)
    corr = sig.fftconvolve(decoded[: probe + max_lag], reference[:probe][::-1], mode="valid")
    lag = int(np.argmax(corr))
    shifted = decoded[lag:]
    if shifted.size < n:
        shifted = np.pad(shifted, (0, n - shifted.size))
    return shifted[:n]


def attack_mp3(signal: AudioSignal, kbps: int, codec_hook: CodecHook | None = None) -> AudioSignal:
    """Round-trip through an external MP3 encoder/decoder.

    Raises CodecUnavailableError when no hook is configured or the
    commands are missing, so callers can mark the cell as skipped rather
    than silently passing the signal through.
    """
    if kbps not in (64, 96, 128):
        raise ParameterError("MP3 bitrate must be one of 64, 96, 128 kbps")
    hook = codec_hook or CodecHook.from_env()
    if hook is None:
        raise CodecUnavailableError(
            f"no MP3 codec configured; set {ENV_MP3_ENCODE} and {ENV_MP3_DECODE} "
            "or provide a codec hook in the config"
        )
    if not hook.available():
        raise CodecUnavailableError("configured MP3 codec commands were not found on PATH")
    with tempfile.TemporaryDirectory(prefix="echohide_mp3_") as tmp:
        wav_in = os.path.join(tmp, "in.wav")
        mp3_path = os.path.join(tmp, "coded.mp3")
        wav_out = os.path.join(tmp, "out.wav")
        write_wav(signal, wav_in)
        try:
            hook.run(hook.encode, wav_in, mp3_path, kbps)
            hook.run(hook.decode, mp3_path, wav_out, kbps)
        except (subprocess.CalledProcessError, OSError) as exc:
            raise CodecUnavailableError(f"MP3 codec invocation failed: {exc}") from exc
        decoded = read_wav(wav_out)
    aligned = _align_to(signal.samples, decoded.samples)
    return signal.replace_samples(aligned)


def apply_attack(signal: AudioSignal, spec, codec_hook: CodecHook | None = None) -> AudioSignal:
    """Dispatch on an attack spec value."""
    if isinstance(spec, Identity):
        return signal
    if isinstance(spec, Awgn):
        return attack_awgn(signal, spec.snr_db, spec.seed)
    if isinstance(spec, Mp3):
        return attack_mp3(signal, spec.kbps, codec_hook)
    if isinstance(spec, LowPass):
        return attack_lowpass(signal, spec.cutoff_hz)
    if isinstance(spec, Resample):
        return attack_resample(signal, spec.divisor)
    if isinstance(spec, Requantize):
        return attack_requantize(signal, spec.bits)
    raise ParameterError(f"unknown attack spec {spec!r}")
