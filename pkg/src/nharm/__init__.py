"""Numerics for sine series with noninteger harmonics sin(k**alpha x).

Submodules: ``phasecore`` (phase reduction, summation, quadrature),
``sequences`` (coefficient classes), ``expsums`` (exponential and sine
sums), ``convergence`` (tail diagnostics and witnesses), ``diophantine``
(square-free sieve, approximation search, bad points) and ``cli``.
"""
from ._backend import NAME as BACKEND
from .errors import (BudgetExceeded, DomainError, InvalidSequence, NharmError, PrecisionExhausted,
                     PreconditionViolated, SequenceFileError, WitnessNotFound)
from .phasecore import HarmonicExponent, compensated_sum, reduce_phase

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BudgetExceeded",
    "DomainError",
    "HarmonicExponent",
    "InvalidSequence",
    "NharmError",
    "PrecisionExhausted",
    "PreconditionViolated",
    "SequenceFileError",
    "WitnessNotFound",
    "__version__",
    "compensated_sum",
    "reduce_phase",
]
