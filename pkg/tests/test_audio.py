import numpy as np
import pytest

import echohide as eh
from echohide.errors import CapacityError, FormatError, ParameterError, ShapeError


def test_wav_round_trip_quantization(tmp_path):
    signal = eh.synth_speech_like(0.5, 16000, 1)
    path = tmp_path / "x.wav"
    eh.write_wav(signal, path)
    back = eh.read_wav(path)
    assert back.sample_rate == 16000
    assert len(back) == len(signal)
    assert np.max(np.abs(back.samples - signal.samples)) <= 1.0 / 32768


def test_wav_second_round_trip_idempotent(tmp_path):
    signal = eh.synth_speech_like(0.25, 16000, 2)
    p1, p2 = tmp_path / "a.wav", tmp_path / "b.wav"
    eh.write_wav(signal, p1)
    first = eh.read_wav(p1)
    eh.write_wav(first, p2)
    second = eh.read_wav(p2)
    assert np.array_equal(first.samples, second.samples)


def test_pcm_scaling_values(tmp_path):
    raw = np.array([32767, -32768, 0], dtype="<i2")
    import wave

    path = tmp_path / "raw.wav"
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(8000)
        w.writeframes(raw.tobytes())
    sig = eh.read_wav(path)
    assert sig.samples[0] == 32767 / 32768
    assert sig.samples[1] == -1.0
    assert sig.samples[2] == 0.0


def test_write_clamps_and_saturates(tmp_path):
    sig = eh.AudioSignal(np.array([0.0, 1.5, -1.0]), 8000)
    path = tmp_path / "c.wav"
    eh.write_wav(sig, path)
    import wave

    with wave.open(str(path), "rb") as w:
        ints = np.frombuffer(w.readframes(3), dtype="<i2")
    assert list(ints) == [0, 32767, -32768]


def test_stereo_downmix(tmp_path):
    import wave

    left = np.array([1000, 2000], dtype="<i2")
    right = np.array([3000, 4000], dtype="<i2")
    inter = np.empty(4, dtype="<i2")
    inter[0::2] = left
    inter[1::2] = right
    path = tmp_path / "st.wav"
    with wave.open(str(path), "wb") as w:
        w.setnchannels(2)
        w.setsampwidth(2)
        w.setframerate(8000)
        w.writeframes(inter.tobytes())
    sig = eh.read_wav(path)
    assert np.allclose(sig.samples, [2000 / 32768, 3000 / 32768])


def test_read_rejects_non_wav(tmp_path):
    path = tmp_path / "junk.wav"
    path.write_bytes(b"definitely not RIFF data")
    with pytest.raises(FormatError):
        eh.read_wav(path)


def test_read_rejects_8bit(tmp_path):
    import wave

    path = tmp_path / "8bit.wav"
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(1)
        w.setframerate(8000)
        w.writeframes(bytes([128, 127, 129]))
    with pytest.raises(FormatError):
        eh.read_wav(path)


def test_frame_counts():
    sig = eh.AudioSignal(np.zeros(1200), 16000)
    assert eh.frame_signal(sig, eh.FrameSpec(600)).shape == (2, 600)
    sig = eh.AudioSignal(np.zeros(1300), 16000)
    frames = eh.frame_signal(sig, eh.FrameSpec(600))
    assert frames.shape == (2, 600)
    assert eh.tail_of(sig, eh.FrameSpec(600)).size == 100


def test_frame_count_paper_scale():
    sig = eh.AudioSignal(np.zeros(6_000_000), 16000)
    assert eh.frame_signal(sig, eh.FrameSpec(600)).shape[0] == 10_000


def test_frame_len_larger_than_signal():
    sig = eh.AudioSignal(np.zeros(100), 16000)
    with pytest.raises(CapacityError):
        eh.frame_signal(sig, eh.FrameSpec(600))


def test_assemble_inverse_of_framing():
    sig = eh.synth_speech_like(0.3, 16000, 3)
    spec = eh.FrameSpec(600)
    frames = eh.frame_signal(sig, spec)
    back = eh.assemble_frames(frames, eh.tail_of(sig, spec), sig.sample_rate)
    assert np.array_equal(back.samples, sig.samples)
    assert back.sample_rate == sig.sample_rate


def test_assemble_empty_frames_keeps_tail():
    tail = np.array([0.1, -0.2, 0.3])
    out = eh.assemble_frames([], tail, 8000)
    assert np.array_equal(out.samples, tail)


def test_assemble_lengths():
    frames = [np.zeros(600), np.zeros(600)]
    out = eh.assemble_frames(frames, np.zeros(100), 16000)
    assert len(out) == 1300
    with pytest.raises(ShapeError):
        eh.assemble_frames([np.zeros(600), np.zeros(500)], np.zeros(0), 16000)


def test_synth_deterministic():
    a = eh.synth_speech_like(0.5, 16000, 42)
    b = eh.synth_speech_like(0.5, 16000, 42)
    assert np.array_equal(a.samples, b.samples)
    c = eh.synth_speech_like(0.5, 16000, 43)
    assert not np.array_equal(a.samples, c.samples)


def test_synth_length_and_peak():
    sig = eh.synth_speech_like(1.0, 16000, 0)
    assert len(sig) == 16000
    assert abs(np.max(np.abs(sig.samples)) - 0.9) <= 1e-9


def test_synth_band_power():
    sig = eh.synth_speech_like(2.0, 44100, 7)
    spectrum = np.abs(np.fft.rfft(sig.samples)) ** 2
    freqs = np.fft.rfftfreq(len(sig), 1.0 / 44100)
    in_band = spectrum[freqs <= 8000].sum()
    assert in_band / spectrum.sum() > 0.99


def test_synth_rejects_bad_duration():
    with pytest.raises(ParameterError):
        eh.synth_speech_like(0.0, 16000, 1)


def test_audio_signal_validation():
    with pytest.raises(ParameterError):
        eh.AudioSignal(np.array([np.nan]), 16000)
    with pytest.raises(ParameterError):
        eh.AudioSignal(np.zeros(4), 0)
    with pytest.raises(ShapeError):
        eh.AudioSignal(np.zeros((2, 2)), 16000)


def test_as_bits_accepts_strings():
    assert np.array_equal(eh.as_bits("0101"), [0, 1, 0, 1])
    with pytest.raises(ParameterError):
        eh.as_bits([0, 2])
