"""Phoneme-level divergence and detectability analysis of real vs.
converted emotional speech.

Per-phoneme frame embeddings are mean-pooled into segment vectors,
real and converted segments of a shared target emotion are compared by
the symmetric KL divergence of fitted Gaussians and by held-out
RBF-SVM accuracy, and the two measures are correlated per condition.
"""

__version__ = "0.1.0"

from .config import RunConfig, build_config
from .corpus import (
    Cell,
    FrameMatrix,
    SegmentEmbedding,
    UtteranceRecord,
    build_cells,
    frames_for_interval,
    pool_segment,
    read_frame_matrix,
    read_manifest,
    write_frame_matrix,
    write_manifest,
)
from .kernels import BACKEND
from .pitch import F0Config, F0Frame, extract_f0
from .report import (
    PhonemeCellResult,
    ResultSet,
    VOWELS,
    correlate_conditions,
    emit_tables,
    run_pipeline,
)
from .stats import (
    ConfusionCounts,
    CorrelationResult,
    GaussianModel,
    fit_gaussian,
    kl_gaussian,
    pearson,
    reg_inc_beta,
    sym_kld,
)
from .svm import SvmModel, evaluate_cell, make_split, predict, rbf_kernel, train_smo
from .synth import SynthSpec, gen_synthetic_corpus, mc_kl_oracle, qp_oracle_svm
from .textgrid import (
    SILENCE,
    Interval,
    Tier,
    load_textgrid,
    normalize_label,
    parse_textgrid,
    phone_intervals,
)

__all__ = [
    "BACKEND",
    "Cell",
    "ConfusionCounts",
    "CorrelationResult",
    "F0Config",
    "F0Frame",
    "FrameMatrix",
    "GaussianModel",
    "Interval",
    "PhonemeCellResult",
    "ResultSet",
    "RunConfig",
    "SILENCE",
    "SegmentEmbedding",
    "SvmModel",
    "SynthSpec",
    "Tier",
    "UtteranceRecord",
    "VOWELS",
    "build_cells",
    "build_config",
    "correlate_conditions",
    "emit_tables",
    "evaluate_cell",
    "extract_f0",
    "fit_gaussian",
    "frames_for_interval",
    "gen_synthetic_corpus",
    "kl_gaussian",
    "load_textgrid",
    "make_split",
    "mc_kl_oracle",
    "normalize_label",
    "parse_textgrid",
    "pearson",
    "phone_intervals",
    "pool_segment",
    "predict",
    "qp_oracle_svm",
    "read_frame_matrix",
    "read_manifest",
    "reg_inc_beta",
    "run_pipeline",
    "sym_kld",
    "train_smo",
    "write_frame_matrix",
    "write_manifest",
]
