"""Key-scheduled hybrid of spread spectrum and echo hiding.

Every payload bit rides exactly one frame. The shared subkey stream
decides the carrier per frame: subkey bit 0 selects spread spectrum,
subkey bit 1 selects echo hiding. The payload is a fixed-width length
header followed by the LFSR-encrypted message, so the receiver can
resynchronize from the same key material alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import AudioSignal, FrameSpec, as_bits, assemble_frames, frame_signal, tail_of
from .cepstral import detection_profiles
from .errors import CapacityError, ConfigError, CorruptHeaderError, ParameterError
from .keysched import ConstantMatrix, LfsrSpec, PrimaryKey, generate_subkeys, lfsr_stream, xor_cipher
from .kernels import BasicKernel, BitDelays, apply_kernel
from .sspec import SSParams, frame_key, ss_detect_frame, ss_embed_frame

SELECT_SS = "ss"
SELECT_ECHO = "echo"

MIN_FRAMES_PER_SECOND = 20.0


@dataclass(frozen=True)
class HybridConfig:
    """Everything both ends need beyond the primary key and matrix."""

    echo: BasicKernel = BasicKernel(alpha=0.3)
    delays: BitDelays = BitDelays()
    ss: SSParams = SSParams(strength_a=0.005, improved=True)
    ss_seed: int = 7
    frame: FrameSpec = FrameSpec()
    lfsr: LfsrSpec = LfsrSpec()
    header_bits: int = 32
    echo_method: str = "proposed"

    def __post_init__(self):
        if self.header_bits < 1:
            raise ConfigError("header_bits must be >= 1")
        if self.echo_method not in ("original", "proposed"):
            raise ConfigError(f"unknown echo extraction method {self.echo_method!r}")
        if max(self.delays.d0, self.delays.d1) >= self.frame.frame_len:
            raise ConfigError("echo delays must fit inside the frame")

    def check_rate(self, sample_rate: int):
        if sample_rate / self.frame.frame_len < MIN_FRAMES_PER_SECOND:
            raise ConfigError(
                f"frame_len {self.frame.frame_len} at {sample_rate} Hz embeds fewer than "
                f"{MIN_FRAMES_PER_SECOND:.0f} bits/s"
            )


def plan_selection(subkeys, payload_len: int):
    """Project subkey bits onto per-frame carrier tags (0 -> SS, 1 -> echo)."""
    bits = subkeys.bits if hasattr(subkeys, "bits") else as_bits(subkeys)
    if payload_len > bits.size:
        raise ParameterError("subkey stream shorter than the payload")
    return tuple(SELECT_ECHO if b else SELECT_SS for b in bits[:payload_len])


def _int_to_header(value: int, width: int) -> np.ndarray:
    if value >= 1 << width:
        raise CapacityError(f"message length {value} does not fit in a {width}-bit header")
    return as_bits(format(value, f"0{width}b"))


def _header_to_int(bits: np.ndarray) -> int:
    return int("".join(str(int(b)) for b in bits), 2)


def hybrid_embed(
    signal: AudioSignal,
    message,
    cfg: HybridConfig,
    key: PrimaryKey,
    matrix: ConstantMatrix,
    selection_override=None,
) -> AudioSignal:
    """Embed header + encrypted message, one bit per frame.

    ``selection_override`` replaces the subkey-derived carrier plan; it is
    a test hook for forcing a single branch.
    """
    cfg.check_rate(signal.sample_rate)
    message = as_bits(message)
    payload = np.concatenate(
        [
            _int_to_header(message.size, cfg.header_bits),
            xor_cipher(message, lfsr_stream(cfg.lfsr, message.size)),
        ]
    )
    frames = frame_signal(signal, cfg.frame)
    if payload.size > frames.shape[0]:
        raise CapacityError(
            f"payload of {payload.size} bits (header {cfg.header_bits} + message "
            f"{message.size}) exceeds {frames.shape[0]} full frames"
        )
    if selection_override is not None:
        plan = tuple(selection_override)
        if len(plan) != payload.size:
            raise ParameterError("selection override must match payload length")
    else:
        plan = plan_selection(generate_subkeys(key, matrix, payload.size), payload.size)
    for t, (bit, carrier) in enumerate(zip(payload, plan)):
        if carrier == SELECT_SS:
            chips = frame_key(cfg.ss_seed, t, cfg.frame.frame_len)
            frames[t] = ss_embed_frame(frames[t], chips, int(bit), cfg.ss)
        else:
            frames[t] = apply_kernel(frames[t], cfg.echo.for_bit(int(bit), cfg.delays))
    return assemble_frames(frames, tail_of(signal, cfg.frame), signal.sample_rate)


def _decode_frames(frames: np.ndarray, plan, cfg: HybridConfig, frame_offset: int = 0) -> np.ndarray:
    """Per-frame branch decode mirroring the embedder's plan."""
    bits = np.zeros(len(plan), dtype=np.uint8)
    echo_rows = [i for i, carrier in enumerate(plan) if carrier == SELECT_ECHO]
    for i, carrier in enumerate(plan):
        if carrier == SELECT_SS:
            chips = frame_key(cfg.ss_seed, frame_offset + i, cfg.frame.frame_len)
            bits[i] = ss_detect_frame(frames[i], chips)
    if echo_rows:
        profiles = detection_profiles(frames[echo_rows], cfg.echo_method)
        bits[echo_rows] = (profiles[:, cfg.delays.d1] >= profiles[:, cfg.delays.d0]).astype(
            np.uint8
        )
    return bits


def hybrid_extract(
    signal: AudioSignal,
    cfg: HybridConfig,
    key: PrimaryKey,
    matrix: ConstantMatrix,
    selection_override=None,
    expected_bits: int | None = None,
) -> np.ndarray:
    """Regenerate the subkey plan, decode the header, then the message.

    ``expected_bits`` bypasses the decoded header's length field (the
    payload is still read from the frames after the header). Evaluation
    uses it to measure channel recovery under conditions where header bit
    errors would otherwise abort the extraction.
    """
    cfg.check_rate(signal.sample_rate)
    frames = frame_signal(signal, cfg.frame)
    if frames.shape[0] < cfg.header_bits:
        raise CapacityError(
            f"signal has {frames.shape[0]} full frames, fewer than the "
            f"{cfg.header_bits}-bit header"
        )
    if selection_override is not None:
        full_plan = tuple(selection_override)
        if len(full_plan) < cfg.header_bits:
            raise ParameterError("selection override shorter than the header")
    else:
        full_plan = None

    remaining = frames.shape[0] - cfg.header_bits
    if expected_bits is None:
        header_plan = (
            full_plan[: cfg.header_bits]
            if full_plan is not None
            else plan_selection(generate_subkeys(key, matrix, cfg.header_bits), cfg.header_bits)
        )
        header_bits = _decode_frames(frames[: cfg.header_bits], header_plan, cfg)
        msg_len = _header_to_int(header_bits)
        if msg_len > remaining:
            raise CorruptHeaderError(
                f"decoded message length {msg_len} exceeds remaining capacity {remaining}"
            )
    else:
        msg_len = int(expected_bits)
        if msg_len > remaining:
            raise CapacityError(
                f"expected {msg_len} payload bits but only {remaining} frames remain"
            )
    if msg_len == 0:
        return np.zeros(0, dtype=np.uint8)

    total = cfg.header_bits + msg_len
    if full_plan is not None:
        if len(full_plan) < total:
            raise ParameterError("selection override shorter than the payload")
        plan = full_plan[cfg.header_bits : total]
    else:
        plan = plan_selection(generate_subkeys(key, matrix, total), total)[cfg.header_bits :]
    cipher_bits = _decode_frames(
        frames[cfg.header_bits : total], plan, cfg, frame_offset=cfg.header_bits
    )
    return xor_cipher(cipher_bits, lfsr_stream(cfg.lfsr, msg_len))
