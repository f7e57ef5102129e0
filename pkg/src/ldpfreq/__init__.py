"""Locally differentially private frequency oracles."""

from .core import (
    Domain,
    PrivacyBudget,
    ReportBatch,
    TallyVector,
    tally,
    true_distribution,
    validate_budget,
)
from .kernels import BACKEND
from .mechanisms import make_mechanism

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Domain",
    "PrivacyBudget",
    "ReportBatch",
    "TallyVector",
    "make_mechanism",
    "tally",
    "true_distribution",
    "validate_budget",
]
