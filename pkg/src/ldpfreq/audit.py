"""Exact epsilon-LDP verification by enumerating a mechanism's output space.

For a discrete channel, ``max_S P[M(v1) in S] / P[M(v2) in S]`` is attained on
a single output: the ratio of two sums of positive terms never exceeds the
largest ratio of matching terms. The audit therefore only compares
single-atom probabilities, for every pair of inputs.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import BITS, EXTENDED, SUBSET, VALUE, LdpError, OutputSpaceTooLarge

MAX_VALUE_D = 64
MAX_SUBSETS = 10**6
MAX_BITS_D = 20
TIGHT_TOL = 1e-6


@dataclass(frozen=True)
class AuditResult:
    mechanism: str
    d: int
    epsilon: float
    max_ratio: float
    v1: int
    v2: int
    atom: object
    method: str = "enumerate"

    @property
    def bound(self):
        return math.exp(self.epsilon)

    @property
    def tight(self):
        return abs(self.max_ratio - self.bound) <= TIGHT_TOL

    @property
    def satisfied(self):
        return self.max_ratio <= self.bound + 1e-9

    def as_dict(self):
        atom = list(self.atom) if isinstance(self.atom, tuple) else self.atom
        return {
            "mechanism": self.mechanism,
            "d": self.d,
            "epsilon": self.epsilon,
            "max_ratio": self.max_ratio,
            "exp_epsilon": self.bound,
            "tight": self.tight,
            "satisfied": self.satisfied,
            "witness": {"v1": self.v1, "v2": self.v2, "output": atom},
            "method": self.method,
        }


def _bit_atoms(d):
    codes = np.arange(1 << d, dtype=np.int64)
    return ((codes[:, None] >> np.arange(d)) & 1).astype(np.uint8)


def channel(mech):
    """Return ``(atoms, P)`` where ``P[v, i]`` is the probability of output ``atoms[i]`` given ``v``.

    Probabilities follow the sampling procedure of each mechanism.
    """
    d = mech.d
    kind = mech.report_kind
    if kind == VALUE:
        if d > MAX_VALUE_D:
            raise OutputSpaceTooLarge(f"value channel with d = {d} > {MAX_VALUE_D}")
        p_keep = getattr(mech, "p_keep", getattr(mech, "p", None))
        p_other = (1 - p_keep) / (d - 1)
        P = np.full((d, d), p_other)
        np.fill_diagonal(P, p_keep)
        return list(range(d)), P
    if kind == EXTENDED:
        if d > MAX_VALUE_D:
            raise OutputSpaceTooLarge(f"extended-value channel with d = {d} > {MAX_VALUE_D}")
        P = np.where(mech.membership, mech.p_in_elem, mech.p_out_elem)
        return list(range(mech.dprime)), P
    if kind == SUBSET:
        k = mech.k
        if math.comb(d, k) > MAX_SUBSETS:
            raise OutputSpaceTooLarge(f"C({d}, {k}) = {math.comb(d, k)} subsets > {MAX_SUBSETS}")
        atoms = list(itertools.combinations(range(d), k))
        member = np.zeros((d, len(atoms)), dtype=bool)
        for i, s in enumerate(atoms):
            member[list(s), i] = True
        # two-stage sampler: keep v w.p. g and fill k-1 of the d-1 others, else k of the d-1 others
        with_v = mech.g / math.comb(d - 1, k - 1)
        without_v = (1 - mech.g) / math.comb(d - 1, k) if k < d else 0.0
        return atoms, np.where(member, with_v, without_v)
    if kind == BITS:
        if d > MAX_BITS_D:
            raise OutputSpaceTooLarge(
                f"2^{d} bit vectors exceed the enumeration limit (d <= {MAX_BITS_D}); use decompose mode"
            )
        x = _bit_atoms(d)
        cold = np.where(x == 1, mech.p_cold, 1 - mech.p_cold)
        base = np.prod(cold, axis=1)
        hot = np.where(x == 1, mech.p_hot, 1 - mech.p_hot)
        P = base[None, :] * (hot / cold).T
        atoms = [tuple(int(b) for b in row) for row in x]
        return atoms, P
    raise LdpError(f"cannot enumerate reports of kind {kind!r}")


def output_distribution(mech, v):
    """Mapping output -> probability for input ``v``."""
    mech.domain.check(v)
    atoms, P = channel(mech)
    return {a: float(p) for a, p in zip(atoms, P[v])}


def _audit_enumerate(mech):
    atoms, P = channel(mech)
    hi = P.argmax(axis=0)
    lo = P.argmin(axis=0)
    cols = np.arange(P.shape[1])
    with np.errstate(divide="ignore"):
        ratios = P[hi, cols] / P[lo, cols]
    i = int(np.argmax(ratios))
    return AuditResult(mech.name, mech.d, mech.epsilon, float(ratios[i]), int(hi[i]), int(lo[i]), atoms[i])


def _audit_decompose(mech):
    """Bit-vector mechanisms: only the bits at v1 and v2 differ between the two product channels."""
    if mech.report_kind != BITS:
        raise LdpError("decompose mode applies to bit-vector mechanisms only")
    hot = {1: mech.p_hot, 0: 1 - mech.p_hot}
    cold = {1: mech.p_cold, 0: 1 - mech.p_cold}
    best = None
    for b1, b2 in itertools.product((0, 1), repeat=2):
        r = (hot[b1] * cold[b2]) / (cold[b1] * hot[b2])
        if best is None or r > best[0]:
            best = (r, b1, b2)
    r, b1, b2 = best
    atom = (b1, b2) + (0,) * (mech.d - 2)
    return AuditResult(mech.name, mech.d, mech.epsilon, float(r), 0, 1, atom, method="decompose")


def audit_ldp(mech, mode="enumerate"):
    """Worst-case output-probability ratio of ``mech`` over all input pairs.

    ``mode`` is ``enumerate`` (full output space), ``decompose`` (per-bit
    closed form, bit-vector mechanisms only) or ``auto`` (enumerate when the
    output space is small enough, else decompose).
    """
    if mode == "enumerate":
        return _audit_enumerate(mech)
    if mode == "decompose":
        return _audit_decompose(mech)
    if mode == "auto":
        try:
            return _audit_enumerate(mech)
        except OutputSpaceTooLarge:
            if mech.report_kind == BITS:
                return _audit_decompose(mech)
            raise
    raise ValueError(f"unknown audit mode {mode!r}")
