"""Utility modules for the co-allocation solver."""

from .io import describe_validation_error, load_model, read_json, validate_document, write_json
from .timing import NO_DEADLINE, Deadline, log_duration

__all__ = [
    "Deadline",
    "NO_DEADLINE",
    "describe_validation_error",
    "load_model",
    "log_duration",
    "read_json",
    "validate_document",
    "write_json",
]
