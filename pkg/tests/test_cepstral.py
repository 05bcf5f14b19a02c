import numpy as np
import pytest

import echohide as eh
from echohide.errors import CapacityError, DegenerateSignalError, ParameterError


def direct_profile(frame, method):
    """O(n^2) direct-DFT reference for the profile pipeline."""
    frame = np.asarray(frame, dtype=np.complex128)
    n = frame.size
    grid = np.exp(-2j * np.pi * np.outer(np.arange(n), np.arange(n)) / n)
    spectrum = grid @ frame
    log_spec = np.log(np.maximum(np.abs(spectrum), 1e-12)) + 1j * np.angle(spectrum)
    squared = log_spec * log_spec if method == "original" else log_spec * np.conj(log_spec)
    inverse = (grid.conj() @ squared) / n
    return inverse.real


def echoed_impulse(n=600, alpha=0.3, delay=50):
    frame = np.zeros(n)
    frame[0] = 1.0
    frame[delay] = alpha
    return frame


def test_proposed_matches_direct_oracle_small_frames():
    rng = np.random.default_rng(0)
    for n in (8, 16, 33, 64):
        frame = rng.standard_normal(n) * 0.4
        ours = eh.cepstrum_autocorr_proposed(frame).values
        assert np.max(np.abs(ours - direct_profile(frame, "proposed"))) < 1e-9


def test_original_matches_direct_oracle_small_frames():
    rng = np.random.default_rng(1)
    for n in (8, 16, 64):
        frame = rng.standard_normal(n) * 0.4
        ours = eh.cepstrum_autocorr_original(frame).values
        assert np.max(np.abs(ours - direct_profile(frame, "original"))) < 1e-9


def test_proposed_impulse_peak_at_echo_lag():
    frame = echoed_impulse()
    profile = eh.cepstrum_autocorr_proposed(frame).values
    oracle = direct_profile(frame, "proposed")
    lag = 8 + np.argmax(np.abs(oracle[8:301]))
    assert lag == 50
    assert 8 + np.argmax(np.abs(profile[8:301])) == lag


def test_original_impulse_peak_at_doubled_lag():
    # without a host component the squared-log pipeline concentrates its
    # first strong term at twice the echo lag (the direct oracle is
    # authoritative here)
    frame = echoed_impulse()
    profile = eh.cepstrum_autocorr_original(frame).values
    oracle = direct_profile(frame, "original")
    lag = 8 + np.argmax(np.abs(oracle[8:301]))
    assert lag == 100
    assert 8 + np.argmax(np.abs(profile[8:301])) == lag


def test_pure_impulse_profile_is_zero():
    frame = np.zeros(600)
    frame[0] = 1.0
    for fn in (eh.cepstrum_autocorr_original, eh.cepstrum_autocorr_proposed):
        assert np.max(np.abs(fn(frame).values)) < 1e-12


def test_scaling_pure_impulse_leaves_nonzero_lags():
    frame = np.zeros(600)
    frame[0] = 1.0
    for fn in (eh.cepstrum_autocorr_original, eh.cepstrum_autocorr_proposed):
        base = fn(frame).values
        scaled = fn(3.7 * frame).values
        assert np.max(np.abs(scaled[1:] - base[1:])) < 1e-9


def test_proposed_lag_zero_is_mean_square_log_spectrum():
    rng = np.random.default_rng(2)
    frame = 0.5 * rng.standard_normal(256)
    profile = eh.cepstrum_autocorr_proposed(frame).values
    spectrum = np.fft.fft(frame)
    log_spec = np.log(np.maximum(np.abs(spectrum), 1e-12)) + 1j * np.angle(spectrum)
    assert profile[0] == pytest.approx(np.mean(np.abs(log_spec) ** 2), rel=1e-12)
    assert profile[0] >= 0.0


def test_proposed_profile_is_real_and_even():
    rng = np.random.default_rng(3)
    frame = 0.5 * rng.standard_normal(128)
    values = eh.cepstrum_autocorr_proposed(frame).values
    assert np.allclose(values[1:], values[:0:-1], atol=1e-10)


def test_degenerate_frame_rejected():
    with pytest.raises(DegenerateSignalError):
        eh.cepstrum_autocorr_proposed(np.zeros(64))
    with pytest.raises(ParameterError):
        eh.cepstrum_autocorr_original(np.array([1.0]))


def test_detect_bit_rules():
    delays = eh.BitDelays(10, 20)
    values = np.zeros(64)
    values[20], values[10] = 0.5, 0.2
    assert eh.detect_bit(eh.CepstralProfile(values, "proposed"), delays) == 1
    values[20], values[10] = 0.1, 0.4
    assert eh.detect_bit(eh.CepstralProfile(values, "proposed"), delays) == 0
    values[20] = values[10] = 0.3
    assert eh.detect_bit(eh.CepstralProfile(values, "proposed"), delays) == 1


def test_detect_bit_monotone_invariance():
    delays = eh.BitDelays(5, 15)
    rng = np.random.default_rng(4)
    for _ in range(20):
        values = rng.standard_normal(32)
        base = eh.detect_bit(eh.CepstralProfile(values, "proposed"), delays)
        transformed = np.exp(2.0 * values) + 1.0
        assert eh.detect_bit(eh.CepstralProfile(transformed, "proposed"), delays) == base


def test_extract_round_trip_strong_alpha():
    sig = eh.synth_speech_like(8.0, 16000, 10)
    bits = eh.random_bits(200, 11)
    stego = eh.embed_echo(sig, bits, eh.BasicKernel(alpha=0.5))
    recovered = eh.extract_echo(stego, n_bits=200, method="proposed")
    assert eh.recovery_rate(bits, recovered) >= 90.0


def test_extract_unembedded_noise_is_chance_level():
    rng = np.random.default_rng(12)
    sig = eh.AudioSignal(0.5 * rng.standard_normal(2200 * 600), 16000)
    bits = eh.extract_echo(sig, n_bits=2200, method="proposed")
    reference = eh.random_bits(2200, 999)
    rate = np.mean(bits == reference)
    assert 0.45 <= rate <= 0.55


def test_extract_zero_bits():
    sig = eh.synth_speech_like(0.5, 16000, 13)
    assert eh.extract_echo(sig, n_bits=0).size == 0


def test_extract_capacity_error():
    sig = eh.synth_speech_like(0.5, 16000, 13)
    with pytest.raises(CapacityError):
        eh.extract_echo(sig, n_bits=1000)


def test_extract_unknown_method():
    sig = eh.synth_speech_like(0.5, 16000, 13)
    with pytest.raises(ParameterError):
        eh.extract_echo(sig, n_bits=1, method="mystery")


def test_extract_silent_frames_decode_as_one():
    sig = eh.AudioSignal(np.zeros(1200), 16000)
    bits = eh.extract_echo(sig, n_bits=2)
    assert np.array_equal(bits, [1, 1])


def test_extract_both_methods_agree_on_strong_echo():
    sig = eh.synth_speech_like(4.0, 16000, 14)
    bits = eh.random_bits(100, 15)
    stego = eh.embed_echo(sig, bits, eh.BasicKernel(alpha=0.5))
    prop = eh.extract_echo(stego, n_bits=100, method="proposed")
    orig = eh.extract_echo(stego, n_bits=100, method="original")
    assert eh.recovery_rate(bits, prop) >= 95.0
    assert eh.recovery_rate(bits, orig) >= 90.0
