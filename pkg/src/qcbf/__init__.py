"""Bit-flipping decoding of double-circulant QC-MDPC codes.

Sparse ring arithmetic, syndrome/counter machinery, bit-flipping decoder
variants with optional near-codeword table recovery, error-model samplers,
and a deterministic Monte Carlo harness for failure-rate experiments.
"""

from .code import (
    CounterVector,
    ErrorVector,
    QcMdpcCode,
    Syndrome,
    adjacency,
    column_support,
    counter_approximation,
    counters,
    load_code,
    random_code,
    save_code,
    syndrome,
    syndrome_bits,
)
from .decoders import (
    DecodeOutcome,
    DecodeStatus,
    DecoderSpec,
    affine_threshold,
    decode,
    mld_threshold,
    select_bfmax,
    select_threshold,
)
from .error_models import (
    BitClassification,
    IntersectionProfile,
    classify_bits,
    intersection_profile,
    sample_almost_nc,
    sample_uniform_error,
)
from .harness import (
    ExperimentConfig,
    SweepPointResult,
    clopper_pearson,
    run_almost_nc_sweep,
    run_counter_dist,
    run_dfr_sweep,
    run_experiment,
)
from .nc_table import NcSyndromeTable, nc_error
from .ring import CirculantPoly, DenseBits, add, from_dense, mul, shift, square, to_dense
from .rng import SplitMix64, derive_trial_seeds

__version__ = "0.1.0"

__all__ = [
    "CirculantPoly",
    "DenseBits",
    "add",
    "mul",
    "shift",
    "square",
    "to_dense",
    "from_dense",
    "QcMdpcCode",
    "ErrorVector",
    "Syndrome",
    "CounterVector",
    "random_code",
    "save_code",
    "load_code",
    "column_support",
    "syndrome",
    "syndrome_bits",
    "counters",
    "adjacency",
    "counter_approximation",
    "NcSyndromeTable",
    "nc_error",
    "IntersectionProfile",
    "BitClassification",
    "sample_uniform_error",
    "sample_almost_nc",
    "intersection_profile",
    "classify_bits",
    "DecoderSpec",
    "DecodeOutcome",
    "DecodeStatus",
    "decode",
    "select_bfmax",
    "select_threshold",
    "mld_threshold",
    "affine_threshold",
    "ExperimentConfig",
    "SweepPointResult",
    "clopper_pearson",
    "run_dfr_sweep",
    "run_almost_nc_sweep",
    "run_counter_dist",
    "run_experiment",
    "SplitMix64",
    "derive_trial_seeds",
]
