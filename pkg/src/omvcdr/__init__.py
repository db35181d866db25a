"""One-step multi-view clustering with diverse latent representations."""

__version__ = "0.1.0"

from .dataset import (
    MultiViewDataset,
    SyntheticSpec,
    concat_views,
    generate_synthetic,
    load_dataset,
    save_dataset,
    zscore_normalize,
)
from .estimator import OMVCDR
from .metrics import accuracy, evaluate, fscore, nmi, purity
from .solver import FitResult, SolverConfig, fit

__all__ = [
    "OMVCDR",
    "FitResult",
    "MultiViewDataset",
    "SolverConfig",
    "SyntheticSpec",
    "accuracy",
    "concat_views",
    "evaluate",
    "fit",
    "fscore",
    "generate_synthetic",
    "load_dataset",
    "nmi",
    "purity",
    "save_dataset",
    "zscore_normalize",
]
