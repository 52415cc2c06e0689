"""Single-channel EEG preference classification toolkit.

Library layers, bottom to top: deterministic PRNG (`rng`), signal
containers and spectral features (`signals`), penalized smoothing
(`smoothing`), nonlinear transforms and bootstrap augmentation
(`augment`), the from-scratch MLP (`mlp`), split/metrics/arm comparison
(`evaluate`), plot emission (`plots`), and the end-to-end run
orchestration (`pipeline`) exposed through the `eegpref` CLI (`cli`).
"""

from .augment import (
    CUBE_ROOT,
    SIGNED_LOG,
    BootstrapConfig,
    TransformKind,
    bootstrap_dataset,
    bootstrap_indices,
    nonlinear_transform,
    tanh_scaled,
)
from .dataio import (
    ingest_raw,
    read_canonical_csv,
    read_signal_file,
    write_canonical_csv,
)
from .errors import (
    BadParameterError,
    CorruptModelError,
    DivergenceError,
    DuplicateIdError,
    EmptyDatasetError,
    EmptyTrainSetError,
    ManifestError,
    MissingClassError,
    NonFiniteError,
    PipelineError,
    ShapeError,
    SolverError,
    TooShortError,
    VersionMismatchError,
)
from .evaluate import (
    ArmConfig,
    ArmResult,
    ComparisonReport,
    Metrics,
    SplitConfig,
    compare_pipelines,
    compute_metrics,
    run_arm,
    stratified_split,
)
from .mlp import (
    MlpModel,
    TrainConfig,
    TrainHistory,
    bce_loss,
    grad_check,
    init_mlp,
    load_model,
    save_model,
    train,
)
from .pipeline import PipelineConfig, resolve_config, run_compare, run_pipeline
from .plots import PlotSeries, emit_plot, read_series_csv, series_from_values
from .rng import Rng64
from .signals import (
    BandDefinition,
    Dataset,
    Label,
    Signal,
    band_powers,
    canonical_bands,
    class_variance_stats,
    generate_synthetic,
    normalize_zscore,
    resample_to_length,
    resample_values,
)
from .smoothing import (
    DEFAULT_LAMBDA,
    LowFreqComponent,
    SmootherConfig,
    extract_lowfreq_dataset,
    highfreq_residual,
    smooth_whittaker,
)

__version__ = "0.1.0"

__all__ = [
    "ArmConfig",
    "ArmResult",
    "BadParameterError",
    "BandDefinition",
    "BootstrapConfig",
    "ComparisonReport",
    "CorruptModelError",
    "CUBE_ROOT",
    "Dataset",
    "DEFAULT_LAMBDA",
    "DivergenceError",
    "DuplicateIdError",
    "EmptyDatasetError",
    "EmptyTrainSetError",
    "Label",
    "LowFreqComponent",
    "ManifestError",
    "Metrics",
    "MissingClassError",
    "MlpModel",
    "NonFiniteError",
    "PipelineConfig",
    "PipelineError",
    "PlotSeries",
    "Rng64",
    "ShapeError",
    "Signal",
    "SIGNED_LOG",
    "SmootherConfig",
    "SolverError",
    "SplitConfig",
    "TooShortError",
    "TrainConfig",
    "TrainHistory",
    "TransformKind",
    "VersionMismatchError",
    "band_powers",
    "bce_loss",
    "bootstrap_dataset",
    "bootstrap_indices",
    "canonical_bands",
    "class_variance_stats",
    "compare_pipelines",
    "compute_metrics",
    "emit_plot",
    "extract_lowfreq_dataset",
    "generate_synthetic",
    "grad_check",
    "highfreq_residual",
    "ingest_raw",
    "init_mlp",
    "load_model",
    "nonlinear_transform",
    "normalize_zscore",
    "read_canonical_csv",
    "read_series_csv",
    "read_signal_file",
    "resample_to_length",
    "resample_values",
    "resolve_config",
    "run_arm",
    "run_compare",
    "run_pipeline",
    "save_model",
    "series_from_values",
    "smooth_whittaker",
    "stratified_split",
    "tanh_scaled",
    "train",
    "write_canonical_csv",
]
