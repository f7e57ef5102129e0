"""The six frequency oracles and a name-based factory."""

import numpy as np

from ..core import LdpError
from .base import Mechanism
from .hadamard import HadamardResponse, hadamard_matrix, hr_preference_set, next_power_of_two
from .ksubset import KSubset, default_k
from .rr import KRR, RandomizedResponse, rr_estimate
from .unary import BasicRappor, CountMeanSketch

MECHANISMS = {
    "rr": RandomizedResponse,
    "krr": KRR,
    "ksubset": KSubset,
    "brappor": BasicRappor,
    "cms": CountMeanSketch,
    "hr": HadamardResponse,
}

# column order for benchmark tables
BENCH_ORDER = ("krr", "brappor", "cms", "ksubset", "hr")

_OPTIONS = {
    "rr": set(),
    "krr": set(),
    "ksubset": {"k"},
    "brappor": {"p", "q"},
    "cms": {"verbatim"},
    "hr": {"dprime"},
}


def make_mechanism(name, d, epsilon, **options):
    """Build mechanism ``name`` for domain size ``d``.

    ``options`` holds mechanism-specific overrides (``k`` for ksubset, ``p``
    and ``q`` for brappor, ``verbatim`` for cms, ``dprime`` for hr); ``None``
    values are ignored and anything else is rejected.
    """
    if name not in MECHANISMS:
        raise LdpError(f"unknown mechanism {name!r}; choose from {', '.join(MECHANISMS)}")
    options = {k: v for k, v in options.items() if v is not None and v is not False}
    extra = set(options) - _OPTIONS[name]
    if extra:
        raise LdpError(f"option(s) {', '.join(sorted(extra))} do not apply to {name}")
    if name == "rr":
        if d != 2:
            raise LdpError("rr is defined for d = 2 only")
        return RandomizedResponse(epsilon=epsilon)
    return MECHANISMS[name](d, epsilon, **options)


def project_simplex(estimate):
    """Clamp negative entries to zero and renormalise to sum 1.

    Falls back to the uniform vector when nothing positive remains.
    """
    est = np.clip(np.asarray(estimate, dtype=float), 0, None)
    total = est.sum()
    if total <= 0:
        return np.full(est.shape, 1 / est.size)
    return est / total


__all__ = [
    "Mechanism",
    "RandomizedResponse",
    "KRR",
    "KSubset",
    "BasicRappor",
    "CountMeanSketch",
    "HadamardResponse",
    "MECHANISMS",
    "BENCH_ORDER",
    "make_mechanism",
    "project_simplex",
    "rr_estimate",
    "hadamard_matrix",
    "hr_preference_set",
    "next_power_of_two",
    "default_k",
]
