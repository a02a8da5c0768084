"""Time-aware link prediction with complex embeddings."""

from ._core import (
    ComplexTable,
    ConfigError,
    DatasetBundle,
    DivergenceError,
    Error,
    FormatError,
    IndexError,
    ModelKind,
    ModelParams,
    UnsupportedModelError,
    augment_reciprocal,
    average_precision,
    delta_p,
    evaluate,
    lambda_p,
    load_bundle,
    load_model,
    loss_instantaneous,
    loss_temporal,
    main,
    modulation_check,
    omega3,
    parameter_count,
    rank_match,
    save_bundle_cache,
    save_model,
    score,
    score_all_objects,
    score_all_times,
    synthesize,
    train,
)

__version__ = "0.1.0"
