"""Missing-data reconstruction for measurement time series.

The package trains autoencoder-family models (plain, denoising, and
neighbor-window denoising in dense and recurrent flavors) next to
interpolation and extreme-learning-machine baselines, reconstructs zeroed
entries of corrupted series, and benchmarks everything under an NMSE sweep
with CSV reports and figures. See the README for the CLI walkthrough.
"""

from .errors import (
    CorruptModelFileError,
    ModelFileError,
    ModelShapeError,
    ModelVersionError,
    NumericFailureError,
    UndefinedMetricError,
    UnreconstructableChannelError,
)
from .evaluation import (
    CellResult,
    ExperimentPlan,
    NmseReport,
    cell_seed,
    nmse,
    run_experiment,
)
from .models import (
    ModelKind,
    TrainConfig,
    TrainedModel,
    baseline_elm,
    baseline_im,
    load_model,
    reconstruct,
    save_model,
    train_ae,
    train_dae,
    train_edae,
    train_model,
)
from .rng import SplitMix64
from .series import (
    CorruptedSeries,
    CorruptionMask,
    NormParams,
    TimeSeries,
    WindowConfig,
    WindowSample,
    build_window_dataset,
    corrupt_series,
    expand_window,
    init_fake_values,
    normalize,
    denormalize,
)
from .synthetic import (
    PowerProfileConfig,
    RandomSeqConfig,
    generate_power_profile,
    generate_random_sequence,
)

__version__ = "0.1.0"

__all__ = [
    "CellResult",
    "CorruptModelFileError",
    "CorruptedSeries",
    "CorruptionMask",
    "ExperimentPlan",
    "ModelFileError",
    "ModelKind",
    "ModelShapeError",
    "ModelVersionError",
    "NmseReport",
    "NormParams",
    "NumericFailureError",
    "PowerProfileConfig",
    "RandomSeqConfig",
    "SplitMix64",
    "TimeSeries",
    "TrainConfig",
    "TrainedModel",
    "UndefinedMetricError",
    "UnreconstructableChannelError",
    "WindowConfig",
    "WindowSample",
    "baseline_elm",
    "baseline_im",
    "build_window_dataset",
    "cell_seed",
    "corrupt_series",
    "denormalize",
    "expand_window",
    "generate_power_profile",
    "generate_random_sequence",
    "init_fake_values",
    "load_model",
    "nmse",
    "normalize",
    "reconstruct",
    "run_experiment",
    "save_model",
    "train_ae",
    "train_dae",
    "train_edae",
    "train_model",
    "__version__",
]
