"""Subkey stream generation from a primary key, plus LFSR pre-encryption.

The sender and receiver share a primary key (a string of decimal digits)
and a constant square digit matrix of matching dimension. Each step
multiplies the key, read as one decimal integer, by every matrix column
(read top-to-bottom as a decimal integer), sums the products, and appends
the minimal big-endian binary expansion of the sum to the stream. After
each step both the key digits and every matrix row rotate right by one.
Arithmetic is exact: step values grow with key length and must never be
truncated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import as_bits
from .errors import ParameterError, ShapeError, WeakKeyError


def _parse_digits(value) -> tuple[int, ...]:
    if isinstance(value, str):
        if not value.isdigit():
            raise ParameterError(f"digit string must contain only 0-9, got {value!r}")
        return tuple(int(c) for c in value)
    digits = tuple(int(d) for d in value)
    if any(d < 0 or d > 9 for d in digits):
        raise ParameterError("digits must be in 0..9")
    return digits


@dataclass(frozen=True)
class PrimaryKey:
    """Shared secret: a sequence of decimal digits (at least one nonzero)."""

    digits: tuple

    def __post_init__(self):
        digits = _parse_digits(self.digits)
        if len(digits) < 2:
            raise ParameterError("primary key needs at least 2 digits")
        if not any(digits):
            raise WeakKeyError("all-zero primary key")
        object.__setattr__(self, "digits", digits)

    def __len__(self):
        return len(self.digits)


@dataclass(frozen=True)
class ConstantMatrix:
    """Shared square digit matrix; dimension equals the key length."""

    rows: tuple

    def __post_init__(self):
        rows = tuple(_parse_digits(r) for r in self.rows)
        if not rows:
            raise ParameterError("matrix must be non-empty")
        size = len(rows)
        if any(len(r) != size for r in rows):
            raise ShapeError("matrix must be square")
        object.__setattr__(self, "rows", rows)

    def __len__(self):
        return len(self.rows)


@dataclass(frozen=True)
class SubKeyStream:
    """Concatenated subkey bits plus the index where each subkey begins."""

    bits: np.ndarray
    step_boundaries: tuple

    def __post_init__(self):
        object.__setattr__(self, "bits", as_bits(self.bits))


def rotate_right(digits):
    """Circular rotation by one: the last digit moves to the front.

    Accepts a digit string or sequence; returns the same kind.
    """
    if isinstance(digits, str):
        if len(digits) <= 1:
            return digits
        return digits[-1] + digits[:-1]
    seq = tuple(digits)
    if len(seq) <= 1:
        return seq
    return (seq[-1],) + seq[:-1]


def _digits_to_int(digits) -> int:
    value = 0
    for d in digits:
        value = value * 10 + d
    return value


def subkey_step(key: PrimaryKey, matrix: ConstantMatrix) -> int:
    """Sum over columns of (key-as-integer x column-as-integer)."""
    if len(key) != len(matrix):
        raise ShapeError("matrix dimension must equal key length")
    key_int = _digits_to_int(key.digits)
    total = 0
    for j in range(len(matrix)):
        column = _digits_to_int(row[j] for row in matrix.rows)
        total += key_int * column
    return total


def to_binary(value: int) -> np.ndarray:
    """Minimal-length big-endian binary expansion; 0 becomes a single 0 bit."""
    if value < 0:
        raise ParameterError("value must be non-negative")
    return as_bits(format(value, "b"))


def generate_subkeys(key: PrimaryKey, matrix: ConstantMatrix, total_bits: int) -> SubKeyStream:
    """Concatenate binary subkeys of successive rotations until total_bits.

    Step 0 uses the unrotated key and matrix; after each step both are
    rotated right once (cumulatively). The stream is truncated to
    total_bits for consumption.
    """
    if total_bits < 1:
        raise ParameterError("total_bits must be >= 1")
    if not any(any(row) for row in matrix.rows):
        raise WeakKeyError("all-zero constant matrix produces a degenerate stream")
    chunks = []
    boundaries = []
    collected = 0
    current_key = key
    current_matrix = matrix
    while collected < total_bits:
        boundaries.append(collected)
        chunk = to_binary(subkey_step(current_key, current_matrix))
        chunks.append(chunk)
        collected += chunk.size
        current_key = PrimaryKey(rotate_right(current_key.digits))
        current_matrix = ConstantMatrix(tuple(rotate_right(r) for r in current_matrix.rows))
    bits = np.concatenate(chunks)[:total_bits]
    return SubKeyStream(bits, tuple(b for b in boundaries if b < total_bits))


@dataclass(frozen=True)
class LfsrSpec:
    """Fibonacci LFSR: ``width`` register bits, 1-indexed tap positions."""

    width: int = 16
    taps: tuple = (16, 14, 13, 11)
    seed: int = 0xACE1

    def __post_init__(self):
        taps = tuple(sorted(set(int(t) for t in self.taps)))
        if self.width < 1:
            raise ParameterError("width must be >= 1")
        if not taps:
            raise ParameterError("taps must be non-empty")
        if taps[0] < 1 or taps[-1] > self.width:
            raise ParameterError("tap positions must be in 1..width")
        if not 0 < int(self.seed) < (1 << self.width):
            raise ParameterError("seed must be a nonzero state of the register")
        object.__setattr__(self, "taps", taps)
        object.__setattr__(self, "seed", int(self.seed))


def lfsr_stream(spec: LfsrSpec, n_bits: int) -> np.ndarray:
    """Keystream bits from the shift register, LSB out per clock.

    Right-shifting Fibonacci form: tap position p reads register bit
    (width - p), so the highest tap always reads the outgoing bit and the
    update is a bijection on nonzero states.
    """
    if n_bits < 0:
        raise ParameterError("n_bits must be non-negative")
    state = spec.seed
    out = np.zeros(n_bits, dtype=np.uint8)
    top = spec.width - 1
    tap_shifts = [spec.width - t for t in spec.taps]
    for i in range(n_bits):
        out[i] = state & 1
        feedback = 0
        for shift in tap_shifts:
            feedback ^= (state >> shift) & 1
        state = (feedback << top) | (state >> 1)
    return out


def xor_cipher(message, keystream) -> np.ndarray:
    """XOR the message with the keystream; applying it twice restores input."""
    message = as_bits(message)
    keystream = as_bits(keystream)
    if keystream.size < message.size:
        raise ShapeError("keystream must be at least as long as the message")
    return np.bitwise_xor(message, keystream[: message.size])
