"""Recovery-rate and SNR metrics."""

from __future__ import annotations

import numpy as np

from .audio import AudioSignal, as_bits
from .errors import DegenerateSignalError, ShapeError


def recovery_rate(sent, received) -> float:
    """Percentage of bits recovered correctly."""
    sent = as_bits(sent)
    received = as_bits(received)
    if sent.size != received.size:
        raise ShapeError(f"bit strings differ in length: {sent.size} vs {received.size}")
    if sent.size == 0:
        raise ShapeError("recovery rate needs at least one bit")
    return 100.0 * float(np.count_nonzero(sent == received)) / sent.size


def snr_db(cover: AudioSignal, stego: AudioSignal) -> float:
    """10*log10 of cover power over the power of (stego - cover)."""
    if len(cover) != len(stego) or cover.sample_rate != stego.sample_rate:
        raise ShapeError("cover and stego must share length and sample rate")
    noise = stego.samples - cover.samples
    p_noise = float(np.sum(noise**2))
    if p_noise == 0.0:
        raise DegenerateSignalError("signals are identical; SNR is unbounded")
    return 10.0 * np.log10(float(np.sum(cover.samples**2)) / p_noise)
