"""JSON configuration documents for the CLI.

One schema covers embed/extract/attack (kernel, delays, spread-spectrum,
key material, codec hook); the eval and steganalyze subcommands layer
corpus/method/attack grids on top. Unknown keys are rejected so typos
fail loudly.
"""

from __future__ import annotations

import json

from . import attacks as atk
from .audio import FrameSpec
from .errors import ConfigError
from .evaluate import (
    ExperimentConfig,
    MethodParams,
    SteganalysisConfig,
    SyntheticCorpus,
)
from .hybrid import HybridConfig
from .kernels import (
    BackwardForwardKernel,
    BasicKernel,
    BitDelays,
    MirroredKernel,
    NegPosKernel,
    TimeSpreadKernel,
    spread_sequence,
)
from .keysched import LfsrSpec
from .steganalysis import MfccConfig


def _take(doc: dict, allowed: set, context: str) -> None:
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown {context} keys: {sorted(unknown)}")


def load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def kernel_from_dict(doc: dict, delays: BitDelays):
    kind = doc.get("kind", "basic")
    if kind == "basic":
        _take(doc, {"kind", "alpha"}, "kernel")
        return BasicKernel(alpha=doc.get("alpha", 0.3), delay=delays.d0)
    if kind == "negpos":
        _take(doc, {"kind", "alpha_pb", "alpha_nb", "spacing"}, "kernel")
        spacing = doc.get("spacing", 4)
        return NegPosKernel(
            doc.get("alpha_pb", 0.3), doc.get("alpha_nb", 0.3), delays.d0, delays.d0 + spacing
        )
    if kind == "backward_forward":
        _take(doc, {"kind", "alpha"}, "kernel")
        return BackwardForwardKernel(alpha=doc.get("alpha", 0.3), delay=delays.d0)
    if kind == "mirrored":
        _take(doc, {"kind", "alpha_pb", "alpha_nb", "spacing"}, "kernel")
        spacing = doc.get("spacing", 4)
        return MirroredKernel(
            doc.get("alpha_pb", 0.3), doc.get("alpha_nb", 0.3), delays.d0, delays.d0 + spacing
        )
    if kind == "time_spread":
        _take(doc, {"kind", "alpha", "length", "seed"}, "kernel")
        return TimeSpreadKernel(
            alpha=doc.get("alpha", 0.005),
            delay=delays.d0,
            p=spread_sequence(doc.get("length", 1023), doc.get("seed", 0)),
            seed=doc.get("seed", 0),
        )
    raise ConfigError(f"unknown kernel kind {kind!r}")


def attack_from_dict(doc: dict):
    kind = doc.get("kind")
    if kind == "identity":
        _take(doc, {"kind"}, "attack")
        return atk.Identity()
    if kind == "awgn":
        _take(doc, {"kind", "snr_db", "seed"}, "attack")
        return atk.Awgn(snr_db=doc.get("snr_db", 30.0), seed=doc.get("seed", 0))
    if kind == "mp3":
        _take(doc, {"kind", "kbps"}, "attack")
        return atk.Mp3(kbps=doc.get("kbps", 128))
    if kind == "lowpass":
        _take(doc, {"kind", "cutoff_hz"}, "attack")
        return atk.LowPass(cutoff_hz=doc.get("cutoff_hz", 4000.0))
    if kind == "resample":
        _take(doc, {"kind", "divisor"}, "attack")
        return atk.Resample(divisor=doc.get("divisor", 2))
    if kind == "requantize":
        _take(doc, {"kind", "bits"}, "attack")
        return atk.Requantize(bits=doc.get("bits", 8))
    raise ConfigError(f"unknown attack kind {kind!r}")


_PARAM_KEYS = {
    "frame_len",
    "delays",
    "echo_alpha",
    "ss_seed",
    "ss_strength",
    "ss_improved_strength",
    "np_coeff",
    "np_spacing",
    "bf_coeff",
    "mirrored_coeff",
    "mirrored_spacing",
    "ts_alpha",
    "ts_len",
    "ts_seed",
    "primary_key",
    "constant_matrix",
    "lfsr",
    "hybrid_improved_ss",
    "hybrid_echo_method",
}


def _lfsr_from_dict(doc: dict) -> LfsrSpec:
    _take(doc, {"width", "taps", "seed"}, "lfsr")
    return LfsrSpec(
        width=doc.get("width", 16),
        taps=tuple(doc.get("taps", (16, 14, 13, 11))),
        seed=doc.get("seed", 0xACE1),
    )


def method_params_from_dict(doc: dict) -> MethodParams:
    _take(doc, _PARAM_KEYS, "params")
    kwargs = {}
    if "frame_len" in doc:
        kwargs["frame"] = FrameSpec(doc["frame_len"])
    if "delays" in doc:
        kwargs["delays"] = BitDelays(doc["delays"]["d0"], doc["delays"]["d1"])
    if "lfsr" in doc:
        kwargs["lfsr"] = _lfsr_from_dict(doc["lfsr"])
    if "constant_matrix" in doc:
        kwargs["constant_matrix"] = tuple(doc["constant_matrix"])
    for field_name in (
        "echo_alpha",
        "ss_seed",
        "ss_strength",
        "ss_improved_strength",
        "np_coeff",
        "np_spacing",
        "bf_coeff",
        "mirrored_coeff",
        "mirrored_spacing",
        "ts_alpha",
        "ts_len",
        "ts_seed",
        "primary_key",
        "hybrid_improved_ss",
        "hybrid_echo_method",
    ):
        if field_name in doc:
            kwargs[field_name] = doc[field_name]
    return MethodParams(**kwargs)


def codec_hook_from_dict(doc: dict | None) -> atk.CodecHook | None:
    if doc is None:
        return atk.CodecHook.from_env()
    _take(doc, {"encode", "decode"}, "mp3_codec")
    if "encode" not in doc or "decode" not in doc:
        raise ConfigError("mp3_codec needs both encode and decode templates")
    return atk.CodecHook(doc["encode"], doc["decode"])


def corpus_from_dict(doc) -> object:
    if isinstance(doc, str):
        return doc
    if "dir" in doc:
        _take(doc, {"dir"}, "corpus")
        return doc["dir"]
    if "synthetic" in doc:
        synth = doc["synthetic"]
        _take(synth, {"n_files", "duration_s", "sample_rate", "seed"}, "corpus.synthetic")
        return SyntheticCorpus(
            n_files=synth.get("n_files", 10),
            duration_s=synth.get("duration_s", 60.0),
            sample_rate=synth.get("sample_rate", 16000),
            seed=synth.get("seed", 2024),
        )
    raise ConfigError("corpus must be a directory path or {'synthetic': {...}}")


def experiment_from_dict(doc: dict) -> ExperimentConfig:
    _take(
        doc,
        {"corpus", "methods", "alphas", "attacks", "message_bits", "message_seed", "params", "mp3_codec"},
        "experiment",
    )
    return ExperimentConfig(
        corpus=corpus_from_dict(doc.get("corpus", {"synthetic": {}})),
        methods=tuple(doc.get("methods", ("echo_proposed_extract",))),
        alphas=tuple(doc.get("alphas", (None,))),
        attacks=tuple(attack_from_dict(a) for a in doc.get("attacks", ({"kind": "identity"},))),
        message_bits=doc.get("message_bits"),
        message_seed=doc.get("message_seed", 99),
        params=method_params_from_dict(doc.get("params", {})),
        codec_hook=codec_hook_from_dict(doc.get("mp3_codec")),
    )


def steganalysis_from_dict(doc: dict) -> SteganalysisConfig:
    _take(
        doc,
        {
            "methods",
            "n_train",
            "n_test",
            "file_samples",
            "sample_rate",
            "corpus_seed",
            "message_seed",
            "params",
            "mfcc",
            "n_components",
            "gmm_seed",
            "gmm_max_iter",
            "gmm_tol",
        },
        "steganalysis",
    )
    mfcc = None
    if "mfcc" in doc:
        m = doc["mfcc"]
        _take(m, {"window_len", "hop", "n_mel_filters", "n_coeffs", "sample_rate"}, "mfcc")
        mfcc = MfccConfig(
            window_len=m.get("window_len", 512),
            hop=m.get("hop", 256),
            n_mel_filters=m.get("n_mel_filters", 26),
            n_coeffs=m.get("n_coeffs", 13),
            sample_rate=m.get("sample_rate", doc.get("sample_rate", 16000)),
        )
    kwargs = {k: doc[k] for k in (
        "n_train",
        "n_test",
        "file_samples",
        "sample_rate",
        "corpus_seed",
        "message_seed",
        "n_components",
        "gmm_seed",
        "gmm_max_iter",
        "gmm_tol",
    ) if k in doc}
    if "methods" in doc:
        kwargs["methods"] = tuple(doc["methods"])
    return SteganalysisConfig(
        params=method_params_from_dict(doc.get("params", {})), mfcc=mfcc, **kwargs
    )


def stego_config_from_dict(doc: dict):
    """(MethodParams, HybridConfig, key, matrix, codec hook) for embed/extract."""
    _take(doc, _PARAM_KEYS | {"header_bits", "mp3_codec"}, "config")
    params = method_params_from_dict({k: v for k, v in doc.items() if k in _PARAM_KEYS})
    hybrid_cfg = params.hybrid_config()
    if "header_bits" in doc:
        hybrid_cfg = HybridConfig(
            echo=hybrid_cfg.echo,
            delays=hybrid_cfg.delays,
            ss=hybrid_cfg.ss,
            ss_seed=hybrid_cfg.ss_seed,
            frame=hybrid_cfg.frame,
            lfsr=hybrid_cfg.lfsr,
            header_bits=doc["header_bits"],
            echo_method=hybrid_cfg.echo_method,
        )
    key, matrix = params.key_material()
    return params, hybrid_cfg, key, matrix, codec_hook_from_dict(doc.get("mp3_codec"))
