import numpy as np
import pytest

import echohide as eh
from echohide.errors import CapacityError, ParameterError, ShapeError
from echohide.sspec import frame_key


def test_key_chips_are_pm_one_and_deterministic():
    key = frame_key(7, 0, 600)
    assert set(np.unique(key)) == {-1.0, 1.0}
    assert float(key @ key) == 600.0
    assert np.array_equal(key, frame_key(7, 0, 600))
    assert not np.array_equal(key, frame_key(7, 1, 600))


def test_embed_zero_frame_gives_scaled_key():
    key = frame_key(1, 0, 64)
    out = eh.ss_embed_frame(np.zeros(64), key, 1, eh.SSParams(strength_a=0.01))
    assert np.allclose(out, 0.01 * key)


def test_improved_host_rejection_identity():
    rng = np.random.default_rng(0)
    params = eh.SSParams(strength_a=0.005, k=None, improved=True)
    for _ in range(10):
        # frames comfortably inside [-1, 1] so no sample clamps
        frame = np.clip(0.2 * rng.standard_normal(600), -0.9, 0.9)
        key = frame_key(3, 0, 600)
        for bit, b in ((1, 1.0), (0, -1.0)):
            out = eh.ss_embed_frame(frame, key, bit, params)
            assert float(key @ out) == pytest.approx(0.005 * b * 600, rel=1e-9)


def test_zero_strength_zero_k_is_identity():
    frame = np.linspace(-0.5, 0.5, 600)
    key = frame_key(2, 0, 600)
    out = eh.ss_embed_frame(frame, key, 1, eh.SSParams(strength_a=0.0, k=0.0, improved=True))
    assert np.array_equal(out, frame)


def test_detect_sign_rules():
    key = frame_key(5, 0, 200)
    assert eh.ss_detect_frame(0.1 * key, key) == 1
    assert eh.ss_detect_frame(-0.1 * key, key) == 0
    assert eh.ss_detect_frame(np.zeros(200), key) == 1  # tie decodes as 1


def test_orthogonal_host_detects_embedded_bit():
    key = frame_key(6, 0, 64)
    # construct a host orthogonal to the key
    host = np.ones(64) * 0.01
    host -= key * (key @ host) / 64.0
    assert abs(key @ host) < 1e-12
    out = eh.ss_embed_frame(host, key, 0, eh.SSParams(strength_a=0.001))
    assert eh.ss_detect_frame(out, key) == 0


def test_detection_boundary():
    key = frame_key(9, 0, 600)
    a = 0.005
    # adversarial host just inside the decision margin
    eps = 1e-6
    host = -key * (a - eps / 600)
    out = eh.ss_embed_frame(host, key, 1, eh.SSParams(strength_a=a))
    assert eh.ss_detect_frame(out, key) == 1


def test_detection_scale_invariance():
    rng = np.random.default_rng(1)
    frame = 0.2 * rng.standard_normal(300)
    key = frame_key(4, 0, 300)
    out = eh.ss_embed_frame(frame, key, 1, eh.SSParams(strength_a=0.01))
    assert eh.ss_detect_frame(out, key) == eh.ss_detect_frame(out * 0.25, key)


def test_shape_errors():
    key = frame_key(1, 0, 32)
    with pytest.raises(ShapeError):
        eh.ss_embed_frame(np.zeros(31), key, 1)
    with pytest.raises(ShapeError):
        eh.ss_detect_frame(np.zeros(31), key)


def test_k_range_validation():
    with pytest.raises(ParameterError):
        eh.SSParams(strength_a=-0.1)
    params = eh.SSParams(strength_a=0.005, k=0.5, improved=True)
    with pytest.raises(ParameterError):
        params.effective_k(600)  # 0.5 > 2/600


def test_round_trip_silent_cover():
    sig = eh.AudioSignal(np.zeros(600 * 50), 16000)
    bits = eh.random_bits(50, 0)
    stego = eh.ss_embed(sig, bits, 7, eh.SSParams(strength_a=0.01))
    assert np.array_equal(eh.ss_extract(stego, 7, n_bits=50), bits)


def test_round_trip_improved_any_cover():
    sig = eh.synth_speech_like(4.0, 16000, 20)
    bits = eh.random_bits(100, 21)
    stego = eh.ss_embed(sig, bits, 7, eh.SSParams(strength_a=0.005, improved=True))
    assert np.array_equal(eh.ss_extract(stego, 7, n_bits=100), bits)


def test_round_trip_standard_desk_scale():
    rates = []
    for seed in range(3):
        sig = eh.synth_speech_like(20.0, 16000, 30 + seed)
        bits = eh.random_bits(500, seed)
        stego = eh.ss_embed(sig, bits, 7, eh.SSParams(strength_a=0.005))
        rates.append(eh.recovery_rate(bits, eh.ss_extract(stego, 7, n_bits=500)))
    assert np.mean(rates) >= 88.0


def test_untouched_frames_and_tail():
    sig = eh.synth_speech_like(1.0, 16000, 22)
    bits = eh.random_bits(5, 1)
    stego = eh.ss_embed(sig, bits, 7)
    boundary = 5 * 600
    assert np.array_equal(stego.samples[boundary:], sig.samples[boundary:])


def test_capacity_error():
    sig = eh.AudioSignal(np.zeros(1200), 16000)
    with pytest.raises(CapacityError):
        eh.ss_embed(sig, np.ones(3, dtype=np.uint8), 7)
    with pytest.raises(CapacityError):
        eh.ss_extract(sig, 7, n_bits=3)
