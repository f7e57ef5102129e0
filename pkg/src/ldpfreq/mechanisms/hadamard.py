import math

import numpy as np

from ..core import EXTENDED, EmptyTally, IndexOutOfDomain, LdpError, NotPowerOfTwo
from .base import Mechanism


def is_power_of_two(m):
    return isinstance(m, (int, np.integer)) and m >= 1 and (m & (m - 1)) == 0


def hadamard_matrix(m):
    """Sylvester Hadamard matrix of order ``m`` (a power of two), entries +1/-1."""
    if not is_power_of_two(m):
        raise NotPowerOfTwo(f"Hadamard order must be a power of two, got {m!r}")
    h = np.ones((1, 1), dtype=np.int8)
    while h.shape[0] < m:
        h = np.block([[h, h], [h, -h]])
    return h


def next_power_of_two(x):
    return 1 << (int(x) - 1).bit_length()


class HadamardResponse(Mechanism):
    """Hadamard response.

    Value ``v`` is mapped to the preference set ``S_v``: the columns holding +1
    in row ``v + 1`` of the Hadamard matrix of order ``d'`` (row 0 is all ones
    and is skipped). The report is an element of ``[0, d')``, drawn from
    ``S_v`` with weight ``e^eps`` and from the rest with weight 1.

    ``d'`` defaults to the smallest power of two that is at least ``d + 1``,
    giving ``|S_v| = d'/2`` and ``|S_u & S_v| = d'/4`` for ``u != v``.
    """

    name = "hr"
    report_kind = EXTENDED
    uniforms_per_report = 2

    def __init__(self, d, epsilon, dprime=None, *, _membership=None):
        super().__init__(d, epsilon)
        if _membership is None:
            if dprime is None:
                dprime = next_power_of_two(self.d + 1)
            if not is_power_of_two(dprime):
                raise NotPowerOfTwo(f"d' must be a power of two, got {dprime!r}")
            if not self.d + 1 <= dprime <= 4 * self.d:
                raise LdpError(f"d' must lie in [{self.d + 1}, {4 * self.d}] for d = {self.d}, got {dprime}")
            _membership = hadamard_matrix(dprime)[1 : self.d + 1] > 0
        self.membership = np.asarray(_membership, dtype=bool)
        self.membership.setflags(write=False)
        self.dprime = self.membership.shape[1]
        sizes = self.membership.sum(axis=1)
        overlaps = self.membership.astype(np.int64) @ self.membership.T.astype(np.int64)
        off = overlaps[~np.eye(self.d, dtype=bool)]
        if len(set(sizes.tolist())) != 1 or len(set(off.tolist())) != 1:
            raise LdpError("preference sets must share one size and one pairwise overlap")
        self.s = int(sizes[0])
        self.overlap = int(off[0])
        e = math.exp(self.epsilon)
        z = self.s * e + self.dprime - self.s
        self.p_in_elem = e / z
        self.p_out_elem = 1 / z
        self.p_in_set = self.s * e / z
        # P(report lands in S_v | user holds u != v)
        self.p_cross = (self.overlap * e + self.s - self.overlap) / z
        self.gap = (self.s - self.overlap) * math.expm1(self.epsilon) / z
        idx = np.arange(self.dprime)
        self._in_table = np.ascontiguousarray([idx[row] for row in self.membership], dtype=np.int64)
        self._out_table = np.ascontiguousarray([idx[~row] for row in self.membership], dtype=np.int64).reshape(
            self.d, self.dprime - self.s
        )

    @classmethod
    def identity(cls, d, epsilon):
        """The degenerate configuration d' = d, s = 1, S_v = {v} (same channel as k-RR)."""
        return cls(d, epsilon, _membership=np.eye(d, dtype=bool))

    @property
    def tally_size(self):
        return self.dprime

    def params(self):
        return {"dprime": self.dprime, "s": self.s}

    def preference_set(self, v):
        self.domain.check(v)
        return frozenset(np.flatnonzero(self.membership[v]).tolist())

    def _sample(self, k, values, u):
        return k.table_sample(values, self.p_in_set, np.ascontiguousarray(u), self._in_table, self._out_table)

    def in_set_counts(self, t):
        """c'(v): how many reports fall inside ``S_v``, for every v."""
        return self.membership.astype(np.int64) @ np.asarray(t.counts, dtype=np.int64)

    def estimate_from_in_set(self, in_set, n):
        """Estimate from per-value in-set counts c'(v) over ``n`` reports."""
        if n <= 0:
            raise EmptyTally("no reports")
        return (np.asarray(in_set) / n - self.p_cross) / self.gap

    def _estimate(self, t):
        return self.estimate_from_in_set(self.in_set_counts(t), t.n)


def hr_preference_set(v, dprime):
    """``S_v`` for the default Hadamard construction of order ``dprime``."""
    if not 0 <= v < dprime - 1:
        raise IndexOutOfDomain(f"value {v} has no preference set at d' = {dprime}")
    row = hadamard_matrix(dprime)[v + 1]
    return frozenset(np.flatnonzero(row > 0).tolist())
