import numpy as np
import pytest

import echohide as eh
from echohide.errors import CapacityError, ParameterError


def test_zero_alpha_is_identity():
    frame = np.linspace(-0.5, 0.5, 600)
    out = eh.apply_kernel(frame, eh.BasicKernel(alpha=0.0, delay=50))
    assert np.array_equal(out, frame)


def test_basic_kernel_on_impulse():
    frame = np.zeros(600)
    frame[0] = 1.0
    out = eh.apply_kernel(frame, eh.BasicKernel(alpha=0.3, delay=50))
    expected = np.zeros(600)
    expected[0] = 1.0
    expected[50] = 0.3
    assert np.array_equal(out, expected)


def test_time_spread_single_element_matches_basic():
    rng = np.random.default_rng(0)
    frame = 0.5 * rng.standard_normal(600)
    ts = eh.TimeSpreadKernel(alpha=0.2, delay=40, p=np.array([1.0]))
    basic = eh.BasicKernel(alpha=0.2, delay=41)
    assert np.allclose(eh.apply_kernel(frame, ts), eh.apply_kernel(frame, basic), atol=1e-15)


def test_backward_forward_taps_truncate_at_edges():
    frame = np.zeros(100)
    frame[99] = 0.5
    out = eh.apply_kernel(frame, eh.BackwardForwardKernel(alpha=0.4, delay=10))
    # backward echo of the last sample would land outside; forward echo lands at 89
    assert out[89] == pytest.approx(0.2)
    assert out[99] == pytest.approx(0.5)


def test_delay_must_fit_frame():
    with pytest.raises(ParameterError):
        eh.apply_kernel(np.zeros(40) + 0.1, eh.BasicKernel(alpha=0.3, delay=40))


def test_apply_kernel_clamps():
    frame = np.full(100, 0.9)
    out = eh.apply_kernel(frame, eh.BasicKernel(alpha=0.5, delay=10))
    assert np.max(out) <= 1.0


def test_kernel_linearity_before_clamp():
    rng = np.random.default_rng(1)
    a = 0.3 * rng.standard_normal(256)
    b = 0.3 * rng.standard_normal(256)
    k = eh.MirroredKernel(0.1, 0.1, 20, 24)
    scale = 0.25  # keeps everything far from the clamp
    lhs = eh.apply_kernel(scale * (a + b), k)
    rhs = eh.apply_kernel(scale * a, k) + eh.apply_kernel(scale * b, k)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_no_clamping_in_safe_regime():
    sig = eh.synth_speech_like(0.5, 16000, 5)
    scaled = eh.AudioSignal(sig.samples * (0.6 / np.max(np.abs(sig.samples))), 16000)
    bits = eh.random_bits(10, 0)
    stego = eh.embed_echo(scaled, bits, eh.BasicKernel(alpha=0.5))
    assert np.max(np.abs(stego.samples)) <= 0.9 + 1e-12


def test_embed_empty_is_identity():
    sig = eh.synth_speech_like(0.5, 16000, 4)
    out = eh.embed_echo(sig, np.zeros(0, dtype=np.uint8), eh.BasicKernel(alpha=0.3))
    assert np.array_equal(out.samples, sig.samples)


def test_embed_alpha_zero_identity():
    sig = eh.synth_speech_like(0.5, 16000, 4)
    out = eh.embed_echo(sig, np.array([1], dtype=np.uint8), eh.BasicKernel(alpha=0.0))
    assert np.array_equal(out.samples, sig.samples)


def test_embed_bit_delays_time_domain():
    sig = eh.synth_speech_like(0.5, 16000, 6)
    scaled = eh.AudioSignal(sig.samples * 0.5, 16000)
    delays = eh.BitDelays(50, 100)
    spec = eh.FrameSpec(600)
    bits = np.array([0, 1], dtype=np.uint8)
    stego = eh.embed_echo(scaled, bits, eh.BasicKernel(alpha=0.3), delays, spec)
    cover_frames = eh.frame_signal(scaled, spec)
    diff = eh.frame_signal(stego, spec) - cover_frames
    expect0 = np.zeros(600)
    expect0[50:] = 0.3 * cover_frames[0, :-50]
    expect1 = np.zeros(600)
    expect1[100:] = 0.3 * cover_frames[1, :-100]
    assert np.allclose(diff[0], expect0, atol=1e-12)
    assert np.allclose(diff[1], expect1, atol=1e-12)
    assert np.all(diff[2:] == 0.0)


def test_embed_energy_matches_alpha():
    sig = eh.synth_speech_like(1.0, 16000, 7)
    scaled = eh.AudioSignal(sig.samples * 0.5, 16000)
    spec = eh.FrameSpec(600)
    delays = eh.BitDelays(32, 48)
    bits = eh.random_bits(20, 1)
    stego = eh.embed_echo(scaled, bits, eh.BasicKernel(alpha=0.3), delays, spec)
    cov = eh.frame_signal(scaled, spec)
    diff = eh.frame_signal(stego, spec) - cov
    for i, bit in enumerate(bits):
        d = delays.d1 if bit else delays.d0
        echo_energy = 0.3**2 * np.sum(cov[i, :-d] ** 2)
        assert np.sum(diff[i] ** 2) == pytest.approx(echo_energy, abs=1e-9)


def test_embed_capacity_error():
    sig = eh.AudioSignal(np.zeros(1200), 16000)
    with pytest.raises(CapacityError):
        eh.embed_echo(sig, np.ones(3, dtype=np.uint8), eh.BasicKernel(alpha=0.3))


def test_negpos_spacing_validation():
    with pytest.raises(ParameterError):
        eh.NegPosKernel(0.3, 0.3, 32, 32)  # spacing 0
    with pytest.raises(ParameterError):
        eh.NegPosKernel(0.3, 0.3, 32, 40)  # spacing 6
    eh.NegPosKernel(0.3, 0.3, 32, 37)  # spacing 5 ok


def test_coefficient_magnitude_validation():
    with pytest.raises(ParameterError):
        eh.BasicKernel(alpha=1.0, delay=10)
    with pytest.raises(ParameterError):
        eh.MirroredKernel(0.3, 1.2, 20, 24)


def test_bit_delays_validation():
    with pytest.raises(ParameterError):
        eh.BitDelays(50, 50)
    with pytest.raises(ParameterError):
        eh.BitDelays(50, 55)  # separation below 8
    with pytest.raises(ParameterError):
        eh.BitDelays(0, 48)


def test_spread_sequence_deterministic_pm_one():
    p = eh.spread_sequence(1023, 3)
    assert p.size == 1023
    assert set(np.unique(p)) == {-1.0, 1.0}
    assert np.array_equal(p, eh.spread_sequence(1023, 3))


def test_kernel_bit_selection_shifts():
    delays = eh.BitDelays(32, 48)
    np_kernel = eh.NegPosKernel(0.3, 0.3, 32, 36)
    shifted = np_kernel.for_bit(1, delays)
    assert (shifted.d_pb, shifted.d_nb) == (48, 52)
    same = np_kernel.for_bit(0, delays)
    assert (same.d_pb, same.d_nb) == (32, 36)
    basic = eh.BasicKernel(alpha=0.3, delay=32)
    assert basic.for_bit(1, delays).delay == 48
