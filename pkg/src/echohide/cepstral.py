"""Bit detection from echoed frames via cepstrum autocorrelation.

Two detection statistics are provided. Both start from the complex log
spectrum L = ln(FT[frame]) (magnitude floored, principal-branch phase):

* original: Re(FT^-1[L^2]) — squares the complex log directly, which is
  only an autocorrelation under a self-symmetry assumption the host
  signal does not actually satisfy;
* proposed: Re(FT^-1[|L|^2]) — multiplies the log spectrum by its complex
  conjugate, i.e. the true circular autocorrelation of the cepstrum.

An echo at delay d raises the profile near lag d; comparing the profile
at the two candidate delays recovers the embedded bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import AudioSignal, FrameSpec, frame_signal
from .errors import CapacityError, DegenerateSignalError, ParameterError
from .kernels import BitDelays

MAG_FLOOR = 1e-12  # spectrum magnitude floor before the log

# Receiver-side frame conditioning. Frames are brought to a canonical
# loudness before analysis because the echo's signature in either profile
# rides on the frame's mean log magnitude: at raw scale that mean goes
# negative on quiet frames and the d0/d1 comparison inverts (measured
# ~20% recovery). The large canonical gain also keeps the log spectrum
# well above zero, which suppresses the phase-noise floor relative to the
# echo evidence; the Hamming analysis window tames leakage-driven
# spectral nulls. Conditioning lives in the extraction path only - the
# profile operations themselves stay raw so their contracts hold exactly.
ANALYSIS_GAIN = 403.428793492735123  # e**6, canonical RMS for detection
_WINDOW_CACHE: dict = {}


@dataclass(frozen=True)
class CepstralProfile:
    """Per-lag detection statistic for one frame."""

    values: np.ndarray
    method: str

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))


def _log_spectrum(frames: np.ndarray) -> np.ndarray:
    """Complex log spectrum with floored magnitude, rows = frames."""
    spectrum = np.fft.fft(frames, axis=-1)
    magnitude = np.maximum(np.abs(spectrum), MAG_FLOOR)
    return np.log(magnitude) + 1j * np.angle(spectrum)


def _check_frame(frame: np.ndarray) -> np.ndarray:
    frame = np.asarray(frame, dtype=np.float64)
    if frame.ndim != 1 or frame.size < 2:
        raise ParameterError("frame must be 1-D with at least 2 samples")
    if not np.any(frame):
        raise DegenerateSignalError("all-zero frame has no spectrum to analyze")
    return frame


def _profiles_original(frames: np.ndarray) -> np.ndarray:
    log_spec = _log_spectrum(frames)
    return np.fft.ifft(log_spec * log_spec, axis=-1).real


def _profiles_proposed(frames: np.ndarray) -> np.ndarray:
    log_spec = _log_spectrum(frames)
    power = (log_spec * np.conj(log_spec)).real
    return np.fft.ifft(power, axis=-1).real


def _analysis_window(n: int) -> np.ndarray:
    window = _WINDOW_CACHE.get(n)
    if window is None:
        window = np.hamming(n)
        _WINDOW_CACHE[n] = window
    return window


def condition_frames(frames: np.ndarray) -> np.ndarray:
    """Canonical-loudness, Hamming-windowed copies of frames for detection."""
    frames = np.atleast_2d(np.asarray(frames, dtype=np.float64))
    rms = np.sqrt(np.mean(frames**2, axis=-1, keepdims=True))
    scaled = frames / np.maximum(rms, 1e-300) * ANALYSIS_GAIN
    return scaled * _analysis_window(frames.shape[-1])[None, :]


def detection_profiles(frames: np.ndarray, method: str) -> np.ndarray:
    """Per-row detection profiles of conditioned frames."""
    conditioned = condition_frames(frames)
    if method == "original":
        return _profiles_original(conditioned)
    return _profiles_proposed(conditioned)


def cepstrum_autocorr_original(frame) -> CepstralProfile:
    """Detection profile from the squared complex log spectrum."""
    frame = _check_frame(frame)
    return CepstralProfile(_profiles_original(frame), "original")


def cepstrum_autocorr_proposed(frame) -> CepstralProfile:
    """Detection profile from the squared magnitude of the log spectrum.

    The imaginary residue of the inverse transform is zero up to rounding
    because |L|^2 is real and even on the DFT grid for real frames.
    """
    frame = _check_frame(frame)
    return CepstralProfile(_profiles_proposed(frame), "proposed")


def detect_bit(profile: CepstralProfile, delays: BitDelays = BitDelays(), window: int = 0) -> int:
    """Compare the profile at the two candidate delays.

    Returns 1 when the value at d1 exceeds the value at d0, 0 when it is
    smaller, and 1 on an exact tie. ``window`` > 0 takes the maximum over
    +-window lags around each delay instead of the single bin.
    """
    values = profile.values
    if max(delays.d0, delays.d1) + window >= values.shape[-1]:
        raise ParameterError("delays (plus window) must lie inside the profile")
    if window:
        v0 = values[delays.d0 - window : delays.d0 + window + 1].max()
        v1 = values[delays.d1 - window : delays.d1 + window + 1].max()
    else:
        v0 = values[delays.d0]
        v1 = values[delays.d1]
    return 1 if v1 >= v0 else 0


def extract_echo(
    signal: AudioSignal,
    delays: BitDelays = BitDelays(),
    spec: FrameSpec = FrameSpec(),
    n_bits: int | None = None,
    method: str = "proposed",
    window: int = 0,
) -> np.ndarray:
    """Recover n_bits message bits, one per frame, via the chosen profile."""
    if method not in ("original", "proposed"):
        raise ParameterError(f"unknown extraction method {method!r}")
    frames = frame_signal(signal, spec)
    if n_bits is None:
        n_bits = frames.shape[0]
    if n_bits > frames.shape[0]:
        raise CapacityError(f"requested {n_bits} bits but only {frames.shape[0]} full frames")
    if n_bits == 0:
        return np.zeros(0, dtype=np.uint8)
    if max(delays.d0, delays.d1) + window >= spec.frame_len:
        raise ParameterError("delays (plus window) must lie inside the frame")
    frames = frames[:n_bits]
    # silent frames stay all-zero through conditioning; their flat profile
    # makes the comparison a tie, which decodes as 1
    profiles = detection_profiles(frames, method)
    if window:
        lags0 = np.arange(delays.d0 - window, delays.d0 + window + 1)
        lags1 = np.arange(delays.d1 - window, delays.d1 + window + 1)
        v0 = profiles[:, lags0].max(axis=1)
        v1 = profiles[:, lags1].max(axis=1)
    else:
        v0 = profiles[:, delays.d0]
        v1 = profiles[:, delays.d1]
    return (v1 >= v0).astype(np.uint8)
