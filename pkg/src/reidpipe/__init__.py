"""Person re-identification ranking pipeline.

Feature extraction, spatially constrained similarity learning, DCIA
post-ranking, order-statistics ranking aggregation and CMC evaluation.
"""

from . import datamodel, evaluation, features, postrank, rankagg, simlearn
from .config import ExperimentConfig, load_config
from .errors import (
    ConfigError,
    ContractError,
    DataError,
    DimError,
    FormatError,
    NumericError,
    ReidError,
)
from .experiment import run_experiment, write_report

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ContractError",
    "DataError",
    "DimError",
    "ExperimentConfig",
    "FormatError",
    "NumericError",
    "ReidError",
    "datamodel",
    "evaluation",
    "features",
    "load_config",
    "postrank",
    "rankagg",
    "run_experiment",
    "simlearn",
    "write_report",
]
