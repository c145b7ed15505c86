"""Symmetrization of planar polygons and integral-mean inequalities for their Riemann maps."""
from .errors import (ApproximationDegraded, CoefficientPrecisionFailure, ConstructionFailure,
                     EvaluationOutOfRange, InvalidInput, PrecisionFailure, PreconditionViolation,
                     SteinerError, StepFailure)
from .geom import Polygon

__version__ = "0.1.0"

__all__ = [
    "Polygon", "SteinerError", "InvalidInput", "PreconditionViolation", "ConstructionFailure",
    "PrecisionFailure", "CoefficientPrecisionFailure", "EvaluationOutOfRange", "StepFailure",
    "ApproximationDegraded", "__version__",
]
