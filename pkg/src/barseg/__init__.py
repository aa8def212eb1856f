"""Unsupervised music structure boundary detection at the bar scale.

Pipeline: barwise feature matrices (deep embeddings loaded from files, or
the built-in Barwise TF baseline) -> self-similarity matrices -> one of
three unsupervised segmenters (Foote novelty, spectral clustering, block
matching) -> hit-rate evaluation against reference annotations under
configurable trimming protocols.
"""

from .cbm import CbmParams, block_score, cbm_kernel, segment_cbm
from .core import (
    Annotation,
    BarGrid,
    BarMatrix,
    Segmentation,
    SelfSimilarityMatrix,
    bars_from_downbeats,
    boundaries_to_seconds,
)
from .errors import (
    EmptyAnnotation,
    FormatError,
    InvalidInput,
    TrackSkipped,
    UnsupportedFormat,
)
from .evaluate import (
    DetectionScore,
    TrackEval,
    best_of_annotations,
    detection_score,
    double_trim,
    match_boundaries,
    trim,
)
from .features import Spectrogram, barwise_tf, decode_audio, log_mel, pool_barwise
from .foote import FooteParams, checkerboard_kernel, novelty_curve, pick_peaks, segment_foote
from .harness import (
    SelectionPolicy,
    SweepConfig,
    SweepGrid,
    TrackManifest,
    emit_report,
    load_manifest,
    run_track,
    select_and_aggregate,
    sweep,
)
from .io import read_matrix, write_matrix
from .lsd import LsdParams, build_affinity, laplacian_embedding, segment_lsd
from .ssm import cosine_ssm, normalize_rows, rbf_ssm

__version__ = "0.1.0"

__all__ = [
    "Annotation",
    "BarGrid",
    "BarMatrix",
    "CbmParams",
    "DetectionScore",
    "EmptyAnnotation",
    "FooteParams",
    "FormatError",
    "InvalidInput",
    "LsdParams",
    "Segmentation",
    "SelectionPolicy",
    "SelfSimilarityMatrix",
    "Spectrogram",
    "SweepConfig",
    "SweepGrid",
    "TrackEval",
    "TrackManifest",
    "TrackSkipped",
    "UnsupportedFormat",
    "bars_from_downbeats",
    "barwise_tf",
    "best_of_annotations",
    "block_score",
    "boundaries_to_seconds",
    "build_affinity",
    "cbm_kernel",
    "checkerboard_kernel",
    "cosine_ssm",
    "decode_audio",
    "detection_score",
    "double_trim",
    "emit_report",
    "laplacian_embedding",
    "load_manifest",
    "log_mel",
    "match_boundaries",
    "normalize_rows",
    "novelty_curve",
    "pick_peaks",
    "pool_barwise",
    "rbf_ssm",
    "read_matrix",
    "run_track",
    "segment_cbm",
    "segment_foote",
    "segment_lsd",
    "select_and_aggregate",
    "sweep",
    "trim",
    "write_matrix",
]
