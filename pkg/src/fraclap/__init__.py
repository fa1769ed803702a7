"""Numerical fractional Laplacian in one dimension.

Engines: singular-integral quadrature, Fourier multiplier (with the fractional
heat semigroup), harmonic extension for ``s = 1/2`` and a finite-difference
solver for the exterior-data Dirichlet problem. :mod:`fraclap.verify` runs
the reproduction checks and :mod:`fraclap.cli` is the command-line front end.
"""

from .core import EvalReport, FracOrder, normalization_constant
from .errors import (AliasingError, DivergenceError, DomainError, FracLapError,
                     PreconditionError)
from .fields import ScalarField1D, TailModel, catalog_field, field_from_function, field_from_samples
from .quadrature import QuadratureBudget, frac_lap, frac_lap_pv, frac_lap_second_difference

__version__ = "0.1.0"

__all__ = [
    "AliasingError", "DivergenceError", "DomainError", "EvalReport", "FracLapError", "FracOrder",
    "PreconditionError", "QuadratureBudget", "ScalarField1D", "TailModel", "catalog_field",
    "field_from_function", "field_from_samples", "frac_lap", "frac_lap_pv",
    "frac_lap_second_difference", "normalization_constant",
]
