"""Command-line surface.

Subcommands: embed, extract, attack, eval, steganalyze, keygen, synth.
Exit codes: 0 success, 2 config error, 3 capacity error, 4 when the run
could only skip cells (e.g. MP3 requested with no codec configured).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import attacks as atk
from .audio import as_bits, random_bits, read_wav, synth_speech_like, write_wav
from .config import (
    attack_from_dict,
    experiment_from_dict,
    load_json,
    steganalysis_from_dict,
    stego_config_from_dict,
)
from .errors import (
    CapacityError,
    CodecUnavailableError,
    ConfigError,
    EchoHideError,
)
from .evaluate import build_pipeline, method_capacity, run_experiment, run_steganalysis, write_report
from .hybrid import hybrid_embed, hybrid_extract
from .keysched import ConstantMatrix, PrimaryKey

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAPACITY = 3
EXIT_SKIPPED_ONLY = 4


def _load_stego_config(path):
    doc = load_json(path) if path else {}
    return stego_config_from_dict(doc)


def _read_message(args) -> np.ndarray:
    given = [v is not None for v in (args.message_bits, args.message_file, args.random_bits)]
    if sum(given) != 1:
        raise ConfigError("provide exactly one of --message-bits, --message-file, --random-bits")
    if args.message_bits is not None:
        return as_bits(args.message_bits)
    if args.message_file is not None:
        with open(args.message_file, "r", encoding="utf-8") as fh:
            return as_bits(fh.read().strip())
    return random_bits(args.random_bits, args.seed)


def _cmd_embed(args) -> int:
    params, hybrid_cfg, key, matrix, _ = _load_stego_config(args.config)
    cover = read_wav(args.cover)
    message = _read_message(args)
    if args.method == "hybrid":
        stego = hybrid_embed(cover, message, hybrid_cfg, key, matrix)
    else:
        embed, _ = build_pipeline(args.method, params, args.alpha)
        stego = embed(cover, message)
    write_wav(stego, args.out)
    print(f"embedded {message.size} bits into {args.out} via {args.method}")
    return EXIT_OK


def _cmd_extract(args) -> int:
    params, hybrid_cfg, key, matrix, _ = _load_stego_config(args.config)
    stego = read_wav(args.stego)
    if args.method == "hybrid":
        bits = hybrid_extract(stego, hybrid_cfg, key, matrix)
    else:
        if args.n_bits is None:
            raise ConfigError("--n-bits is required for non-hybrid extraction")
        _, extract = build_pipeline(args.method, params, args.alpha)
        bits = extract(stego, args.n_bits)
    text = "".join(str(int(b)) for b in bits)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def _cmd_attack(args) -> int:
    _, _, _, _, codec_hook = _load_stego_config(args.config)
    doc = {"kind": args.kind}
    if args.snr_db is not None:
        doc["snr_db"] = args.snr_db
    if args.seed is not None and args.kind == "awgn":
        doc["seed"] = args.seed
    if args.cutoff_hz is not None:
        doc["cutoff_hz"] = args.cutoff_hz
    if args.divisor is not None:
        doc["divisor"] = args.divisor
    if args.bits is not None:
        doc["bits"] = args.bits
    if args.kbps is not None:
        doc["kbps"] = args.kbps
    spec = attack_from_dict(doc)
    signal = read_wav(args.infile)
    try:
        attacked = atk.apply_attack(signal, spec, codec_hook)
    except CodecUnavailableError as exc:
        print(f"skipped: {exc}", file=sys.stderr)
        return EXIT_SKIPPED_ONLY
    write_wav(attacked, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    cfg = experiment_from_dict(load_json(args.config))
    started = time.monotonic()
    report = run_experiment(cfg)
    elapsed = time.monotonic() - started
    write_report(report, args.out, args.tables_dir)
    statuses = [c["status"] for c in report["cells"].values()]
    n_ok = sum(1 for s in statuses if s == "ok")
    print(f"evaluated {len(statuses)} cells ({n_ok} ok) in {elapsed:.1f}s -> {args.out}")
    if statuses and n_ok == 0:
        return EXIT_SKIPPED_ONLY
    return EXIT_OK


def _cmd_steganalyze(args) -> int:
    cfg = steganalysis_from_dict(load_json(args.config))
    started = time.monotonic()
    results = run_steganalysis(cfg)
    elapsed = time.monotonic() - started
    doc = {"p_e": results}
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")
    for method in sorted(results):
        print(f"P_E[{method}] = {results[method]:.4f}")
    print(f"done in {elapsed:.1f}s -> {args.out}")
    return EXIT_OK


def _cmd_keygen(args) -> int:
    rng = np.random.default_rng(args.seed)
    digits = rng.integers(0, 10, size=args.digits)
    while not digits.any():
        digits = rng.integers(0, 10, size=args.digits)
    matrix = rng.integers(0, 10, size=(args.digits, args.digits))
    if not matrix.any():
        matrix[0, 0] = 1
    doc = {
        "primary_key": "".join(str(d) for d in digits),
        "constant_matrix": ["".join(str(d) for d in row) for row in matrix],
        "lfsr": {"width": 16, "taps": [16, 14, 13, 11], "seed": int(rng.integers(1, 1 << 16))},
        "ss_seed": int(rng.integers(0, 1 << 31)),
    }
    PrimaryKey(doc["primary_key"])
    ConstantMatrix(tuple(doc["constant_matrix"]))
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    print(f"wrote key material to {args.out}")
    return EXIT_OK


def _cmd_synth(args) -> int:
    signal = synth_speech_like(args.duration, args.sample_rate, args.seed)
    write_wav(signal, args.out)
    print(f"wrote {args.duration}s at {args.sample_rate} Hz to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="echohide", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    methods = [
        "echo_original_extract",
        "echo_proposed_extract",
        "ss",
        "ss_improved",
        "echo_np",
        "echo_bf",
        "echo_mirrored",
        "echo_ts",
        "hybrid",
    ]

    p = sub.add_parser("embed", help="embed a message into a cover WAV")
    p.add_argument("--cover", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--method", default="hybrid", choices=methods)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--config", default=None, help="stego config JSON")
    p.add_argument("--message-bits", default=None, help="bit string, e.g. 0101")
    p.add_argument("--message-file", default=None, help="file holding a bit string")
    p.add_argument("--random-bits", type=int, default=None, help="embed N seeded random bits")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("extract", help="extract a message from a stego WAV")
    p.add_argument("--stego", required=True)
    p.add_argument("--method", default="hybrid", choices=methods)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--n-bits", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("attack", help="apply a channel impairment to a WAV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--kind", required=True,
                   choices=["identity", "awgn", "lowpass", "resample", "requantize", "mp3"])
    p.add_argument("--snr-db", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--cutoff-hz", type=float, default=None)
    p.add_argument("--divisor", type=int, default=None)
    p.add_argument("--bits", type=int, default=None)
    p.add_argument("--kbps", type=int, default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(func=_cmd_attack)

    p = sub.add_parser("eval", help="run an experiment grid and write a report")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--tables-dir", default=None)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("steganalyze", help="train the MFCC+GMM bench and report P_E per method")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_steganalyze)

    p = sub.add_parser("keygen", help="generate key material")
    p.add_argument("--digits", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_keygen)

    p = sub.add_parser("synth", help="write a deterministic speech-like WAV")
    p.add_argument("--duration", type=float, default=60.0)
    p.add_argument("--sample-rate", type=int, default=16000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except EchoHideError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
