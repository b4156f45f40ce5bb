"""Scalar-flat toric Kahler 4-metrics from labeled polygons."""

from .errors import (
    ConvergenceError,
    DegenerateMapError,
    DomainError,
    InputError,
    StepError,
    UnsupportedError,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DegenerateMapError",
    "DomainError",
    "InputError",
    "StepError",
    "UnsupportedError",
    "__version__",
]
