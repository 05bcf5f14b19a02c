"""Additive spread-spectrum embedding and the host-rejecting improved variant.

A frame-long key of +-1 chips carries one bit: the standard variant adds
A*b*s to the frame, the improved variant adds (A*b - k*(s.x))*s so that
the detector statistic s.y no longer depends on the host when k = 1/N.
Detection is the sign of the correlation with the key.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import AudioSignal, FrameSpec, assemble_frames, frame_signal, tail_of
from .errors import CapacityError, ParameterError, ShapeError


@dataclass(frozen=True)
class SSParams:
    """Embedding strength and (for the improved variant) host-rejection gain.

    ``k`` = None resolves to 1/N at embed time, which cancels host
    interference exactly.
    """

    strength_a: float = 0.005
    k: float | None = None
    improved: bool = False

    def __post_init__(self):
        # zero strength is allowed so that A = 0 is an exact identity
        if self.strength_a < 0:
            raise ParameterError("strength_a must be non-negative")
        if self.k is not None and self.k < 0:
            raise ParameterError("k must be non-negative")

    def effective_k(self, frame_len: int) -> float:
        k = 1.0 / frame_len if self.k is None else self.k
        if not 0.0 <= k <= 2.0 / frame_len:
            raise ParameterError(f"k must be in [0, 2/N] = [0, {2.0 / frame_len}], got {k}")
        return k


def frame_key(seed: int, frame_index: int, length: int) -> np.ndarray:
    """Fresh +-1 chips for one frame, derived from (seed, frame index)."""
    rng = np.random.default_rng([np.uint64(seed), np.uint64(frame_index)])
    return (rng.integers(0, 2, size=length) * 2 - 1).astype(np.float64)


def ss_embed_frame(frame, key: np.ndarray, bit: int, params: SSParams = SSParams()) -> np.ndarray:
    """Embed one bit into one frame; output clamped to [-1, +1]."""
    frame = np.asarray(frame, dtype=np.float64)
    key = np.asarray(key, dtype=np.float64)
    if frame.shape != key.shape:
        raise ShapeError("frame and key lengths must match")
    b = 1.0 if bit else -1.0
    gain = params.strength_a * b
    if params.improved:
        gain -= params.effective_k(frame.size) * float(key @ frame)
    return np.clip(frame + gain * key, -1.0, 1.0)


def ss_detect_frame(frame, key: np.ndarray) -> int:
    """Sign of the key correlation: 1 for positive or zero, 0 for negative."""
    frame = np.asarray(frame, dtype=np.float64)
    key = np.asarray(key, dtype=np.float64)
    if frame.shape != key.shape:
        raise ShapeError("frame and key lengths must match")
    return 1 if float(key @ frame) >= 0.0 else 0


def ss_embed(
    signal: AudioSignal,
    bits,
    key_seed: int,
    params: SSParams = SSParams(),
    spec: FrameSpec = FrameSpec(),
) -> AudioSignal:
    """One bit per frame; keys are regenerated per frame from the seed."""
    bits = np.asarray(bits, dtype=np.uint8)
    frames = frame_signal(signal, spec)
    if bits.size > frames.shape[0]:
        raise CapacityError(
            f"message of {bits.size} bits needs {bits.size} full frames, have {frames.shape[0]}"
        )
    for i, bit in enumerate(bits):
        key = frame_key(key_seed, i, spec.frame_len)
        frames[i] = ss_embed_frame(frames[i], key, int(bit), params)
    return assemble_frames(frames, tail_of(signal, spec), signal.sample_rate)


def ss_extract(
    signal: AudioSignal,
    key_seed: int,
    spec: FrameSpec = FrameSpec(),
    n_bits: int | None = None,
) -> np.ndarray:
    """Recover n_bits by correlating each frame with its derived key."""
    frames = frame_signal(signal, spec)
    if n_bits is None:
        n_bits = frames.shape[0]
    if n_bits > frames.shape[0]:
        raise CapacityError(f"requested {n_bits} bits but only {frames.shape[0]} full frames")
    bits = np.zeros(n_bits, dtype=np.uint8)
    for i in range(n_bits):
        key = frame_key(key_seed, i, spec.frame_len)
        bits[i] = ss_detect_frame(frames[i], key)
    return bits
