import math

from ..core import SUBSET, DegenerateChannel, KOutOfRange
from .base import Mechanism


def default_k(d, epsilon):
    """Subset size used when none is given: round(d / (e^eps + 1)), kept in [1, d]."""
    k = math.floor(d / (math.exp(epsilon) + 1) + 0.5)
    return min(d, max(1, k))


class KSubset(Mechanism):
    """k-subset mechanism.

    Each user reports a k-subset of the domain. A subset containing the true
    value is ``e^eps`` times as likely as one that does not. Sampling is done
    in two stages: with probability ``g_k`` keep the true value and fill up
    with k - 1 uniformly chosen others, otherwise report k uniformly chosen
    values from the other d - 1.
    """

    name = "ksubset"
    report_kind = SUBSET

    def __init__(self, d, epsilon, k=None):
        super().__init__(d, epsilon)
        if k is None:
            k = default_k(self.d, self.epsilon)
        if int(k) != k or not 1 <= k <= self.d:
            raise KOutOfRange(f"k must be an integer in [1, {self.d}], got {k!r}")
        self.k = k = int(k)
        d = self.d
        e = math.exp(self.epsilon)
        z = k * e + d - k
        self.g = k * e / z
        self.h = self.g * (k - 1) / (d - 1) + (d - k) / z * k / (d - 1)
        # g - h, simplified so it stays exact at k = d and small epsilon
        self.gap = k * (d - k) * math.expm1(self.epsilon) / ((d - 1) * z)

    @property
    def uniforms_per_report(self):
        return self.k + 1

    def params(self):
        return {"k": self.k, "g": self.g, "h": self.h}

    def _sample(self, k, values, u):
        return k.ksubset_sample(values, self.d, self.k, self.g, u)

    def _estimate(self, t):
        if abs(self.gap) < 1e-12:
            raise DegenerateChannel(f"k = {self.k} on d = {self.d} reports carry no information")
        if t.k != self.k:
            raise DegenerateChannel(f"tally built from {t.k}-subsets, mechanism uses k = {self.k}")
        return (t.counts - self.h * t.n) / (self.gap * t.n)
