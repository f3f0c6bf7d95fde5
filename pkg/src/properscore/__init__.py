"""Proper scoring rules on the real line: CRPS, S_alpha and the S-tilde family."""

from .dist import (
    Dirac,
    DiscreteDistribution,
    Distribution,
    DomainError,
    Empirical,
    Gumbel,
    Laplace,
    Logistic,
    Mixture,
    Normal,
    OddsPower,
)
from .quad import IntegralResult, IntegrationError, QuadConfig
from .rules import RuleSpec, ScoreValue
from .weights import Constant, GaussianCDF, GaussianPDF, GaussianSF, Indicator

__version__ = "0.1.0"

__all__ = [
    "Dirac", "DiscreteDistribution", "Distribution", "DomainError", "Empirical", "Gumbel", "Laplace",
    "Logistic", "Mixture", "Normal", "OddsPower", "IntegralResult", "IntegrationError", "QuadConfig",
    "RuleSpec", "ScoreValue", "Constant", "GaussianCDF", "GaussianPDF", "GaussianSF", "Indicator",
]
