"""Echo-hiding audio steganography toolkit.

Embedding via five echo kernels or spread spectrum, bit recovery through
cepstrum-autocorrelation profiles (original and corrected forms), a
key-scheduled hybrid of both carriers, a robustness attack suite, and an
MFCC+GMM steganalysis bench.
"""

from .attacks import (
    AttackSpec,
    Awgn,
    CodecHook,
    Identity,
    LowPass,
    Mp3,
    Requantize,
    Resample,
    apply_attack,
    attack_awgn,
    attack_lowpass,
    attack_mp3,
    attack_requantize,
    attack_resample,
)
from .audio import (
    AudioSignal,
    FrameSpec,
    as_bits,
    assemble_frames,
    frame_signal,
    random_bits,
    read_wav,
    synth_speech_like,
    tail_of,
    write_wav,
)
from .cepstral import (
    CepstralProfile,
    cepstrum_autocorr_original,
    cepstrum_autocorr_proposed,
    condition_frames,
    detect_bit,
    detection_profiles,
    extract_echo,
)
from .errors import (
    CapacityError,
    CodecUnavailableError,
    ConfigError,
    CorruptHeaderError,
    DegenerateSignalError,
    EchoHideError,
    FormatError,
    ParameterError,
    ShapeError,
    WeakKeyError,
)
from .hybrid import HybridConfig, hybrid_embed, hybrid_extract, plan_selection
from .kernels import (
    BackwardForwardKernel,
    BasicKernel,
    BitDelays,
    MirroredKernel,
    NegPosKernel,
    TimeSpreadKernel,
    apply_kernel,
    embed_echo,
    spread_sequence,
)
from .keysched import (
    ConstantMatrix,
    LfsrSpec,
    PrimaryKey,
    SubKeyStream,
    generate_subkeys,
    lfsr_stream,
    rotate_right,
    subkey_step,
    to_binary,
    xor_cipher,
)
from .evaluate import (
    BENCH_METHODS,
    METHOD_NAMES,
    ExperimentConfig,
    MethodParams,
    SteganalysisConfig,
    SyntheticCorpus,
    build_pipeline,
    export_cepstral_series,
    method_capacity,
    run_experiment,
    run_steganalysis,
    summarize_report,
    write_report,
)
from .metrics import recovery_rate, snr_db
from .sspec import SSParams, frame_key, ss_detect_frame, ss_embed, ss_embed_frame, ss_extract
from .steganalysis import (
    GmmModel,
    MfccConfig,
    ScoreSet,
    compute_pe,
    gmm_fit,
    load_gmm,
    mel_filterbank,
    mfcc_features,
    save_gmm,
    score_file,
)

__version__ = "0.1.0"
