"""Toolkit for building, augmenting, and scoring two-choice
commonsense datasets across closely related languages and dialects.
"""

from .data import (
    CopaInstance,
    Dataset,
    DatasetId,
    ValidationReport,
    load_dataset,
    parse_instance,
    validate,
    write_dataset,
)
from .errors import CopaKitError

__version__ = "0.1.0"

__all__ = [
    "CopaInstance",
    "CopaKitError",
    "Dataset",
    "DatasetId",
    "ValidationReport",
    "__version__",
    "load_dataset",
    "parse_instance",
    "validate",
    "write_dataset",
]
