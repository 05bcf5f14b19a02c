"""MFCC features, two-class diagonal GMMs, and the minimum-average-error metric.

A detector is a pair of mixture models (cover, stego) over per-window
MFCC vectors. A file is scored by the mean per-window log-likelihood
difference; sweeping the decision threshold over the scores of both
classes yields P_E = min 0.5*(P_FA + P_MD), the security metric (0.5
means the steganography is indistinguishable from cover audio).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.fft import dct

from .audio import AudioSignal
from .errors import ParameterError, ShapeError

LOG_FLOOR = 1e-10  # mel energy floor before the log
VAR_FLOOR = 1e-6  # variance floor applied each M-step


@dataclass(frozen=True)
class MfccConfig:
    window_len: int = 512
    hop: int = 256
    n_mel_filters: int = 26
    n_coeffs: int = 13
    sample_rate: int = 16000

    def __post_init__(self):
        if self.window_len < 2 or self.window_len & (self.window_len - 1):
            raise ParameterError("window_len must be a power of two")
        if self.hop < 1:
            raise ParameterError("hop must be >= 1")
        if self.n_coeffs > self.n_mel_filters:
            raise ParameterError("n_coeffs cannot exceed n_mel_filters")


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(cfg: MfccConfig) -> np.ndarray:
    """Triangular filters, mel-spaced from 0 Hz to Nyquist.

    Rows are filters over the rfft bins; adjacent triangles peak where
    their neighbours cross.
    """
    n_bins = cfg.window_len // 2 + 1
    freqs = np.linspace(0.0, cfg.sample_rate / 2.0, n_bins)
    mel_points = np.linspace(hz_to_mel(0.0), hz_to_mel(cfg.sample_rate / 2.0), cfg.n_mel_filters + 2)
    hz_points = mel_to_hz(mel_points)
    bank = np.zeros((cfg.n_mel_filters, n_bins))
    for i in range(cfg.n_mel_filters):
        left, center, right = hz_points[i], hz_points[i + 1], hz_points[i + 2]
        rising = (freqs - left) / max(center - left, 1e-12)
        falling = (right - freqs) / max(right - center, 1e-12)
        bank[i] = np.clip(np.minimum(rising, falling), 0.0, None)
    return bank


def mfcc_features(signal: AudioSignal, cfg: MfccConfig | None = None) -> np.ndarray:
    """Per-window MFCC vectors, shape (n_windows, n_coeffs).

    Pipeline per window: Hamming window, DFT magnitude, triangular mel
    filterbank energies, floored log, cosine transform across the filter
    channels, first n_coeffs coefficients kept.
    """
    cfg = cfg or MfccConfig(sample_rate=signal.sample_rate)
    x = signal.samples
    if x.size < cfg.window_len:
        raise ShapeError(f"signal of {x.size} samples is shorter than one {cfg.window_len} window")
    n_windows = (x.size - cfg.window_len) // cfg.hop + 1
    idx = np.arange(cfg.window_len)[None, :] + cfg.hop * np.arange(n_windows)[:, None]
    windows = x[idx] * np.hamming(cfg.window_len)[None, :]
    magnitude = np.abs(np.fft.rfft(windows, axis=1))
    energies = magnitude @ mel_filterbank(cfg).T
    log_energies = np.log(np.maximum(energies, LOG_FLOOR))
    return dct(log_energies, type=2, axis=1, norm="ortho")[:, : cfg.n_coeffs]


@dataclass(frozen=True)
class GmmModel:
    """Diagonal-covariance Gaussian mixture."""

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.float64)
        means = np.asarray(self.means, dtype=np.float64)
        variances = np.asarray(self.variances, dtype=np.float64)
        if means.shape != variances.shape or weights.shape[0] != means.shape[0]:
            raise ShapeError("weights, means and variances must agree on components")
        if abs(weights.sum() - 1.0) > 1e-9:
            raise ParameterError("weights must sum to 1")
        if np.any(variances < VAR_FLOOR * (1 - 1e-12)):
            raise ParameterError("variances must respect the floor")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "variances", variances)

    @property
    def n_components(self) -> int:
        return self.weights.shape[0]


def _log_gaussians(features: np.ndarray, model: GmmModel) -> np.ndarray:
    """Per-component log densities, shape (n_points, n_components)."""
    diff = features[:, None, :] - model.means[None, :, :]
    maha = np.sum(diff**2 / model.variances[None, :, :], axis=2)
    log_norm = -0.5 * (
        features.shape[1] * np.log(2.0 * np.pi) + np.sum(np.log(model.variances), axis=1)
    )
    return log_norm[None, :] - 0.5 * maha


def _logsumexp(a: np.ndarray, axis: int) -> np.ndarray:
    peak = np.max(a, axis=axis, keepdims=True)
    return (peak + np.log(np.sum(np.exp(a - peak), axis=axis, keepdims=True))).squeeze(axis)


def gmm_log_likelihood(features: np.ndarray, model: GmmModel) -> np.ndarray:
    """Per-point mixture log density."""
    return _logsumexp(_log_gaussians(features, model) + np.log(model.weights)[None, :], axis=1)


def gmm_fit(
    features: np.ndarray,
    n_components: int = 8,
    seed: int = 0,
    max_iter: int = 100,
    tol: float = 1e-4,
) -> GmmModel:
    """EM for a diagonal GMM, initialized by seeded random responsibilities.

    Stops at max_iter or when the total log-likelihood gain drops below
    tol. Degenerate (all-identical) feature sets collapse to a single
    effective component with a warning.
    """
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2:
        raise ShapeError("features must be 2-D (points, dims)")
    n_points, n_dims = features.shape
    if n_points < 10 * n_components:
        raise ParameterError(f"need at least {10 * n_components} points for {n_components} components")
    if np.all(features == features[0]):
        warnings.warn("degenerate features: all points identical; fitting one effective component")
    rng = np.random.default_rng(seed)
    resp = rng.random((n_points, n_components))
    resp /= resp.sum(axis=1, keepdims=True)

    def m_step(resp):
        mass = resp.sum(axis=0) + 1e-12
        weights = mass / mass.sum()
        means = (resp.T @ features) / mass[:, None]
        second = (resp.T @ features**2) / mass[:, None]
        variances = np.maximum(second - means**2, VAR_FLOOR)
        return GmmModel(weights, means, variances)

    model = m_step(resp)
    prev_ll = -np.inf
    for _ in range(max_iter):
        log_joint = _log_gaussians(features, model) + np.log(model.weights)[None, :]
        log_total = _logsumexp(log_joint, axis=1)
        ll = float(np.sum(log_total))
        if ll - prev_ll < tol and np.isfinite(prev_ll):
            break
        prev_ll = ll
        resp = np.exp(log_joint - log_total[:, None])
        model = m_step(resp)
    return model


def score_file(model_cover: GmmModel, model_stego: GmmModel, features: np.ndarray) -> float:
    """Mean per-window log-likelihood under stego minus under cover.

    Positive scores lean stego.
    """
    features = np.asarray(features, dtype=np.float64)
    if features.shape[1] != model_cover.means.shape[1] or features.shape[1] != model_stego.means.shape[1]:
        raise ShapeError("feature dimensionality does not match the models")
    return float(
        np.mean(gmm_log_likelihood(features, model_stego) - gmm_log_likelihood(features, model_cover))
    )


@dataclass(frozen=True)
class ScoreSet:
    """Per-file scores for the two classes."""

    cover_scores: np.ndarray
    stego_scores: np.ndarray

    def __post_init__(self):
        cover = np.asarray(self.cover_scores, dtype=np.float64)
        stego = np.asarray(self.stego_scores, dtype=np.float64)
        if cover.size == 0 or stego.size == 0:
            raise ParameterError("both score sets must be non-empty")
        object.__setattr__(self, "cover_scores", cover)
        object.__setattr__(self, "stego_scores", stego)


def compute_pe(scores: ScoreSet) -> float:
    """Minimum average of false-alarm and missed-detection over thresholds.

    Thresholds sweep the midpoints between adjacent sorted scores plus
    +-infinity, in both polarities, so the result is always in [0, 0.5].
    """
    cover = scores.cover_scores
    stego = scores.stego_scores
    pooled = np.sort(np.concatenate([cover, stego]))
    mids = (pooled[:-1] + pooled[1:]) / 2.0
    thresholds = np.concatenate([[-np.inf], mids, [np.inf]])
    p_fa = np.mean(cover[None, :] >= thresholds[:, None], axis=1)
    p_md = np.mean(stego[None, :] < thresholds[:, None], axis=1)
    direct = 0.5 * (p_fa + p_md)
    flipped = 0.5 * ((1.0 - p_fa) + (1.0 - p_md))
    return float(min(np.min(direct), np.min(flipped), 0.5))


MODEL_FORMAT_VERSION = 1


def save_gmm(model: GmmModel, path) -> None:
    """Versioned JSON persistence with full round-trip float precision."""
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "weights": model.weights.tolist(),
        "means": model.means.tolist(),
        "variances": model.variances.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)


def load_gmm(path) -> GmmModel:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise ParameterError(f"unsupported model format version {doc.get('format_version')!r}")
    return GmmModel(
        np.array(doc["weights"]), np.array(doc["means"]), np.array(doc["variances"])
    )
