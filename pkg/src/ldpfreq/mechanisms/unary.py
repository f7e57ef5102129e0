"""One-hot mechanisms: Basic RAPPOR and the one-hot Count Mean Sketch.

Both encode the value as a length-d one-hot vector and randomise every bit
independently. They differ only in how the per-bit probabilities are
parameterised and in the shape of the estimator.
"""

import math

import numpy as np

from .. import kernels
from ..core import BITS, DegenerateChannel, LdpError, TallyVector
from .base import Mechanism


class _OneHot(Mechanism):
    report_kind = BITS

    # probability that the held value's bit / any other bit reads 1
    p_hot: float
    p_cold: float

    @property
    def uniforms_per_report(self):
        return self.d

    def _sample(self, k, values, u):
        return k.bits_sample(values, self.d, self.p_hot, self.p_cold, u)

    def privatize_tally(self, values, rng, backend=None):
        values = self._check_values(values)
        k = kernels.get_backend(backend)
        counts = np.zeros(self.d, dtype=np.int64)
        for a, b in self._chunks(values.shape[0]):
            counts += k.bits_count(values[a:b], self.d, self.p_hot, self.p_cold, rng.random((b - a, self.d)))
        return TallyVector(counts, values.shape[0], BITS)


class BasicRappor(_OneHot):
    """Basic RAPPOR: one-hot encoding plus per-bit randomized response.

    A 1-bit is kept with probability ``q``, a 0-bit becomes 1 with probability
    ``p``. The defaults ``q = e^(eps/2) / (e^(eps/2) + 1)`` and ``p = 1 - q``
    make the worst-case ratio, reached when two bits differ, exactly ``e^eps``.
    Explicit ``p``/``q`` must still satisfy that bound.
    """

    name = "brappor"

    def __init__(self, d, epsilon, p=None, q=None):
        super().__init__(d, epsilon)
        half = math.exp(self.epsilon / 2)
        self.q = half / (half + 1) if q is None else float(q)
        self.p = 1 / (half + 1) if p is None else float(p)
        if not 0 < self.p < 1 or not 0 < self.q < 1:
            raise LdpError("p and q must lie strictly between 0 and 1")
        self.custom = p is not None or q is not None
        if not self.custom:
            self.gap = math.expm1(self.epsilon / 2) / (half + 1)
        else:
            self.gap = self.q - self.p
            spent = math.log(self.q * (1 - self.p) / (self.p * (1 - self.q)))
            if abs(spent) > self.epsilon * (1 + 1e-12):
                raise LdpError(f"p={self.p}, q={self.q} spend {abs(spent):.6g} > epsilon={self.epsilon}")
        self.p_hot, self.p_cold = self.q, self.p

    def params(self):
        return {"p": self.p, "q": self.q}

    def _estimate(self, t):
        if abs(self.gap) < 1e-12:
            raise DegenerateChannel("q == p: reports carry no information")
        return (t.counts - self.p * t.n) / (self.gap * t.n)


class CountMeanSketch(_OneHot):
    """One-hot Count Mean Sketch.

    Every bit of the one-hot vector is flipped with probability
    ``1 / (e^(eps/2) + 1)``. The estimate ``c * (count/n - 1/2) + 1/2`` uses
    ``c = (e^(eps/2) + 1) / (e^(eps/2) - 1)``, the constant that makes it
    unbiased for this flip probability.

    With ``verbatim=True`` the constant ``(e^eps + 1) / (e^eps - 1)`` is used
    instead. That estimator is biased toward 1/2 and exists only for
    comparison runs.
    """

    name = "cms"

    def __init__(self, d, epsilon, verbatim=False):
        super().__init__(d, epsilon)
        half = math.exp(self.epsilon / 2)
        self.flip = 1 / (half + 1)
        self.verbatim = bool(verbatim)
        if self.verbatim:
            self.c = (math.exp(self.epsilon) + 1) / math.expm1(self.epsilon)
        else:
            self.c = (half + 1) / math.expm1(self.epsilon / 2)
        self.p_hot, self.p_cold = 1 - self.flip, self.flip

    def params(self):
        return {"flip": self.flip, "c": self.c, "verbatim": self.verbatim}

    def _estimate(self, t):
        return self.c * (t.counts / t.n - 0.5) + 0.5
