"""Binary randomized response and its k-ary generalisation (k-RR)."""

import math

import numpy as np

from ..core import VALUE, DegenerateP, LdpError
from .base import Mechanism


def rr_estimate(observed, p):
    """Debias the observed proportion of 1s under binary randomized response."""
    if abs(2 * p - 1) < 1e-12:
        raise DegenerateP("p = 1/2 carries no information")
    return (observed + p - 1) / (2 * p - 1)


class RandomizedResponse(Mechanism):
    """Warner's randomized response on a single bit.

    The bit is reported truthfully with probability ``p`` and negated
    otherwise, which is ``ln(p / (1 - p))``-LDP. Reports are values in {0, 1}.
    """

    name = "rr"
    report_kind = VALUE
    uniforms_per_report = 2

    def __init__(self, p=None, epsilon=None, d=2):
        if d != 2:
            raise LdpError("randomized response works on a binary domain (d = 2)")
        if (p is None) == (epsilon is None):
            raise LdpError("give exactly one of p or epsilon")
        if p is None:
            p = 1 / (1 + math.exp(-float(epsilon)))
        if not 0.5 < p < 1:
            raise LdpError(f"p must lie in (1/2, 1), got {p!r}")
        self.p = float(p)
        super().__init__(2, math.log(p / (1 - p)))

    def params(self):
        return {"p": self.p}

    def _sample(self, k, values, u):
        return k.krr_sample(values, 2, self.p, u)

    def privatize_bit(self, bit, rng, backend=None):
        return self.privatize(bit, rng, backend).index

    def _estimate(self, t):
        ones = rr_estimate(t.counts[1] / t.n, self.p)
        return np.array([1 - ones, ones])


class KRR(Mechanism):
    """k-ary randomized response (direct encoding).

    Keeps the true value with probability ``e^eps / (e^eps + d - 1)``; otherwise
    reports one of the other ``d - 1`` values uniformly.
    """

    name = "krr"
    report_kind = VALUE
    uniforms_per_report = 2

    def __init__(self, d, epsilon):
        super().__init__(d, epsilon)
        z = math.exp(self.epsilon) + self.d - 1
        self.p_keep = math.exp(self.epsilon) / z
        self.p_other = 1 / z
        # p_keep - p_other without cancellation at small epsilon
        self.gap = math.expm1(self.epsilon) / z

    def params(self):
        return {"p_keep": self.p_keep, "p_other": self.p_other}

    def _sample(self, k, values, u):
        return k.krr_sample(values, self.d, self.p_keep, u)

    def _estimate(self, t):
        return (t.counts / t.n - self.p_other) / self.gap
