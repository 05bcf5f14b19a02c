"""Echo kernels and per-frame echo embedding.

Five kernel families are supported. Each one is an impulse response
h(n) = delta(n) + (echo taps); convolving a frame with it adds faint
delayed copies of the frame. A message bit selects the echo delay:
bit 0 uses delay d0, bit 1 uses delay d1 (multi-delay kernels shift all
their delays by d1 - d0 for bit 1).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .audio import AudioSignal, FrameSpec, assemble_frames, frame_signal, tail_of
from .errors import CapacityError, ParameterError


@dataclass(frozen=True)
class BitDelays:
    """Echo delays (in samples) encoding bit 0 and bit 1."""

    d0: int = 32
    d1: int = 48

    def __post_init__(self):
        if self.d0 < 1 or self.d1 < 1:
            raise ParameterError("delays must be >= 1 sample")
        if self.d0 == self.d1:
            raise ParameterError("d0 and d1 must differ")
        if abs(self.d1 - self.d0) < 8:
            raise ParameterError("|d0 - d1| must be >= 8 for separable cepstral peaks")


def _check_coeff(alpha: float, name: str = "alpha"):
    if not abs(alpha) < 1.0:
        raise ParameterError(f"|{name}| must be < 1, got {alpha}")


@dataclass(frozen=True)
class BasicKernel:
    """h(n) = delta(n) + alpha * delta(n - delay)."""

    alpha: float = 0.3
    delay: int = 32

    def __post_init__(self):
        _check_coeff(self.alpha)
        if self.delay < 1:
            raise ParameterError("delay must be >= 1")

    def taps(self):
        return [(self.delay, self.alpha)]

    def for_bit(self, bit: int, delays: BitDelays) -> "BasicKernel":
        return replace(self, delay=delays.d1 if bit else delays.d0)


@dataclass(frozen=True)
class NegPosKernel:
    """Positive backward echo plus a nearby negative backward echo."""

    alpha_pb: float = 0.3
    alpha_nb: float = 0.3
    d_pb: int = 32
    d_nb: int = 36

    def __post_init__(self):
        _check_coeff(self.alpha_pb, "alpha_pb")
        _check_coeff(self.alpha_nb, "alpha_nb")
        if self.d_pb < 1 or self.d_nb < 1:
            raise ParameterError("delays must be >= 1")
        if not 1 <= self.d_nb - self.d_pb <= 5:
            raise ParameterError("d_nb - d_pb must be in [1, 5]")

    def taps(self):
        return [(self.d_pb, self.alpha_pb), (self.d_nb, -self.alpha_nb)]

    def for_bit(self, bit: int, delays: BitDelays):
        shift = (delays.d1 - delays.d0) if bit else 0
        return replace(self, d_pb=self.d_pb + shift, d_nb=self.d_nb + shift)


@dataclass(frozen=True)
class BackwardForwardKernel:
    """Equal echoes both backward and forward of the impulse."""

    alpha: float = 0.3
    delay: int = 32

    def __post_init__(self):
        _check_coeff(self.alpha)
        if self.delay < 1:
            raise ParameterError("delay must be >= 1")

    def taps(self):
        return [(self.delay, self.alpha), (-self.delay, self.alpha)]

    def for_bit(self, bit: int, delays: BitDelays):
        return replace(self, delay=delays.d1 if bit else delays.d0)


@dataclass(frozen=True)
class MirroredKernel:
    """Positive and negative echo pairs reflected around the impulse."""

    alpha_pb: float = 0.3
    alpha_nb: float = 0.3
    d_pb: int = 32
    d_nb: int = 36

    def __post_init__(self):
        _check_coeff(self.alpha_pb, "alpha_pb")
        _check_coeff(self.alpha_nb, "alpha_nb")
        if self.d_pb < 1 or self.d_nb < 1:
            raise ParameterError("delays must be >= 1")
        if not 1 <= self.d_nb - self.d_pb <= 5:
            raise ParameterError("d_nb - d_pb must be in [1, 5]")

    def taps(self):
        return [
            (self.d_pb, self.alpha_pb),
            (-self.d_pb, self.alpha_pb),
            (self.d_nb, -self.alpha_nb),
            (-self.d_nb, -self.alpha_nb),
        ]

    def for_bit(self, bit: int, delays: BitDelays):
        shift = (delays.d1 - delays.d0) if bit else 0
        return replace(self, d_pb=self.d_pb + shift, d_nb=self.d_nb + shift)


def spread_sequence(length: int, seed: int) -> np.ndarray:
    """Seeded pseudorandom +-1 sequence used by the time-spread kernel."""
    if length < 1:
        raise ParameterError("sequence length must be >= 1")
    rng = np.random.default_rng(seed)
    return (rng.integers(0, 2, size=length) * 2 - 1).astype(np.float64)


@dataclass(frozen=True)
class TimeSpreadKernel:
    """Echo energy spread over a +-1 pseudorandom sequence.

    The i-th element of ``p`` (i = 1..N) lands at lag delay + i, so a
    single-element sequence reduces to a basic kernel at delay + 1.
    """

    alpha: float = 0.005
    delay: int = 32
    p: np.ndarray = None
    seed: int = 0

    def __post_init__(self):
        _check_coeff(self.alpha)
        if self.delay < 1:
            raise ParameterError("delay must be >= 1")
        p = self.p if self.p is not None else spread_sequence(1023, self.seed)
        p = np.asarray(p, dtype=np.float64)
        if p.ndim != 1 or p.size < 1:
            raise ParameterError("p must be a non-empty 1-D sequence")
        if not np.all(np.abs(p) == 1.0):
            raise ParameterError("p elements must be +-1")
        object.__setattr__(self, "p", p)

    def taps(self):
        return [(self.delay + i, self.alpha * self.p[i - 1]) for i in range(1, self.p.size + 1)]

    def for_bit(self, bit: int, delays: BitDelays):
        return replace(self, delay=delays.d1 if bit else delays.d0)


EchoKernel = (BasicKernel, NegPosKernel, BackwardForwardKernel, MirroredKernel, TimeSpreadKernel)


def _apply_taps(frames: np.ndarray, taps) -> np.ndarray:
    """Add tap * shifted-frame for each (lag, coefficient), zero outside the frame."""
    n = frames.shape[-1]
    out = frames.copy()
    for lag, coeff in taps:
        if abs(lag) >= n:
            raise ParameterError(f"kernel delay {lag} does not fit in frame of length {n}")
        if coeff == 0.0:
            continue
        if lag > 0:
            out[..., lag:] += coeff * frames[..., :-lag]
        elif lag < 0:
            out[..., :lag] += coeff * frames[..., -lag:]
        else:
            out += coeff * frames
    return out


def apply_kernel(frame: np.ndarray, kernel) -> np.ndarray:
    """Convolve one frame with an echo kernel, truncated to the frame.

    Delayed terms index within the frame only: x(n-d) is zero for n < d
    and forward terms x(n+d) are zero for n+d >= len(frame). The output
    is clamped to [-1, +1].
    """
    frame = np.asarray(frame, dtype=np.float64)
    return np.clip(_apply_taps(frame, kernel.taps()), -1.0, 1.0)


def embed_echo(
    signal: AudioSignal,
    bits,
    kernel,
    delays: BitDelays = BitDelays(),
    spec: FrameSpec = FrameSpec(),
) -> AudioSignal:
    """Embed one bit per frame by echo addition.

    Frame i carries bit i through ``kernel`` instantiated at the delay for
    that bit value; frames beyond the message pass through untouched.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    frames = frame_signal(signal, spec)
    if bits.size > frames.shape[0]:
        raise CapacityError(
            f"message of {bits.size} bits needs {bits.size} full frames, have {frames.shape[0]}"
        )
    for bit_value in (0, 1):
        rows = np.nonzero(bits == bit_value)[0]
        if rows.size == 0:
            continue
        taps = kernel.for_bit(bit_value, delays).taps()
        frames[rows] = np.clip(_apply_taps(frames[rows], taps), -1.0, 1.0)
    return assemble_frames(frames, tail_of(signal, spec), signal.sample_rate)
