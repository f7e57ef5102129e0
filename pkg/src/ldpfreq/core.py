"""Shared domain types, validation and report tallying.

All category indices are 0-based. A report is produced on the client side by a
mechanism's ``privatize`` step; the aggregator only ever sees reports, tallies
them, and hands the :class:`TallyVector` to the mechanism's ``estimate`` step.

Reports come in two shapes: single tagged records (``ValueReport`` and
friends), convenient for one user at a time, and :class:`ReportBatch`, a
columnar array form used on the hot path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np


class LdpError(ValueError):
    """Base class for all validation errors raised by this package."""


class NonPositiveEpsilon(LdpError):
    pass


class IndexOutOfDomain(LdpError):
    pass


class DomainMismatch(LdpError):
    pass


class MixedReportKinds(LdpError):
    pass


class EmptyInput(LdpError):
    pass


class EmptyTally(LdpError):
    pass


class DegenerateChannel(LdpError):
    pass


class DegenerateP(DegenerateChannel):
    pass


class KOutOfRange(LdpError):
    pass


class NotPowerOfTwo(LdpError):
    pass


class OutputSpaceTooLarge(LdpError):
    pass


@dataclass(frozen=True)
class PrivacyBudget:
    epsilon: float

    def __post_init__(self):
        e = self.epsilon
        if not isinstance(e, (int, float, np.floating, np.integer)) or not math.isfinite(e) or e <= 0:
            raise NonPositiveEpsilon(f"epsilon must be positive and finite, got {e!r}")
        object.__setattr__(self, "epsilon", float(e))

    def __float__(self):
        return self.epsilon


def validate_budget(raw) -> PrivacyBudget:
    """Return a :class:`PrivacyBudget` for ``raw`` or raise ``NonPositiveEpsilon``."""
    if isinstance(raw, PrivacyBudget):
        return raw
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise NonPositiveEpsilon(f"epsilon must be a positive number, got {raw!r}") from None
    return PrivacyBudget(value)


@dataclass(frozen=True)
class Domain:
    size_d: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if int(self.size_d) != self.size_d or self.size_d < 2:
            raise LdpError(f"domain size must be an integer >= 2, got {self.size_d!r}")
        object.__setattr__(self, "size_d", int(self.size_d))
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != self.size_d:
                raise LdpError(f"expected {self.size_d} labels, got {len(labels)}")
            if len(set(labels)) != len(labels):
                raise LdpError("domain labels must be unique")
            object.__setattr__(self, "labels", labels)

    def __len__(self):
        return self.size_d

    def label(self, index: int) -> str:
        self.check(index)
        return self.labels[index] if self.labels is not None else str(index)

    def check(self, index) -> int:
        if int(index) != index or not 0 <= index < self.size_d:
            raise IndexOutOfDomain(f"index {index!r} outside domain of size {self.size_d}")
        return int(index)


def _as_domain(domain: Domain | int) -> Domain:
    return domain if isinstance(domain, Domain) else Domain(int(domain))


# --- single reports ---------------------------------------------------------

VALUE, SUBSET, BITS, EXTENDED = "value", "subset", "bits", "extended"


@dataclass(frozen=True)
class ValueReport:
    index: int
    kind = VALUE


@dataclass(frozen=True)
class SubsetReport:
    indices: tuple[int, ...]
    kind = SUBSET

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise LdpError(f"subset indices must be strictly increasing: {idx}")
        object.__setattr__(self, "indices", idx)


@dataclass(frozen=True)
class BitVectorReport:
    bits: tuple[int, ...]
    kind = BITS

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise LdpError("bit vector entries must be 0 or 1")
        object.__setattr__(self, "bits", bits)


@dataclass(frozen=True)
class ExtendedValueReport:
    index: int
    size: int  # extended-domain size d'
    kind = EXTENDED

    def __post_init__(self):
        if not 0 <= self.index < self.size:
            raise IndexOutOfDomain(f"extended index {self.index} outside [0, {self.size})")


Report = Union[ValueReport, SubsetReport, BitVectorReport, ExtendedValueReport]


@dataclass(frozen=True, eq=False)
class ReportBatch:
    """Columnar reports of a single kind.

    ``data`` is an int64 vector for value/extended reports, an ``(n, k)`` int64
    matrix of sorted indices for subset reports and an ``(n, d)`` uint8 matrix
    for bit-vector reports. ``size`` is the number of tally bins: d, or d' for
    extended reports.
    """

    kind: str
    data: np.ndarray
    size: int

    def __len__(self):
        return int(self.data.shape[0])

    def __getitem__(self, i) -> Report:
        row = self.data[i]
        if self.kind == VALUE:
            return ValueReport(int(row))
        if self.kind == EXTENDED:
            return ExtendedValueReport(int(row), self.size)
        if self.kind == SUBSET:
            return SubsetReport(tuple(int(x) for x in row))
        return BitVectorReport(tuple(int(x) for x in row))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @classmethod
    def from_reports(cls, reports: Sequence[Report], size: int) -> "ReportBatch":
        reports = list(reports)
        kinds = {r.kind for r in reports}
        if len(kinds) > 1:
            raise MixedReportKinds(f"reports of several kinds: {sorted(kinds)}")
        if not reports:
            raise EmptyInput("no reports")
        kind = kinds.pop()
        if kind == VALUE:
            data = np.array([r.index for r in reports], dtype=np.int64)
        elif kind == EXTENDED:
            sizes = {r.size for r in reports}
            if sizes != {size}:
                raise DomainMismatch(f"extended reports sized {sorted(sizes)}, expected {size}")
            data = np.array([r.index for r in reports], dtype=np.int64)
        elif kind == SUBSET:
            lengths = {len(r.indices) for r in reports}
            if len(lengths) != 1:
                raise DomainMismatch(f"subset reports of differing cardinality {sorted(lengths)}")
            data = np.array([r.indices for r in reports], dtype=np.int64)
        else:
            lengths = {len(r.bits) for r in reports}
            if lengths != {size}:
                raise DomainMismatch(f"bit vectors of length {sorted(lengths)}, expected {size}")
            data = np.array([r.bits for r in reports], dtype=np.uint8)
        return cls(kind, data, size)


@dataclass(frozen=True, eq=False)
class TallyVector:
    """Per-bin report counts plus the number of reports they came from."""

    counts: np.ndarray
    n: int
    kind: str = VALUE
    k: int = 1  # subset cardinality; 1 for every other kind

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 1 or (counts < 0).any():
            raise LdpError("counts must be a nonnegative integer vector")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "n", int(self.n))
        total = int(counts.sum())
        if self.kind in (VALUE, EXTENDED, SUBSET) and total != self.n * self.k:
            raise LdpError(f"counts sum to {total}, expected n*k = {self.n * self.k}")
        if self.kind == BITS and (counts > self.n).any():
            raise LdpError("a bit count exceeds the number of reports")

    def __add__(self, other: "TallyVector") -> "TallyVector":
        if (self.kind, self.k, len(self.counts)) != (other.kind, other.k, len(other.counts)):
            raise DomainMismatch("cannot merge tallies of different shape or kind")
        return TallyVector(self.counts + other.counts, self.n + other.n, self.kind, self.k)

    def __eq__(self, other):
        if not isinstance(other, TallyVector):
            return NotImplemented
        return (self.kind, self.k, self.n) == (other.kind, other.k, other.n) and np.array_equal(
            self.counts, other.counts
        )

    @property
    def proportions(self) -> np.ndarray:
        if self.n == 0:
            raise EmptyTally("tally holds no reports")
        return self.counts / self.n


def tally(reports: ReportBatch | Iterable[Report], domain: Domain | int) -> TallyVector:
    """Count, per bin, the reports equal to / containing / setting that bin.

    ``domain`` is the tally width: d for value, subset and bit-vector reports,
    d' for extended reports.
    """
    size = _as_domain(domain).size_d
    batch = reports if isinstance(reports, ReportBatch) else ReportBatch.from_reports(reports, size)
    if batch.size != size:
        raise DomainMismatch(f"reports sized {batch.size}, domain sized {size}")
    data = batch.data
    n = len(batch)
    if batch.kind in (VALUE, EXTENDED):
        if n and (data.min() < 0 or data.max() >= size):
            raise DomainMismatch(f"report index outside [0, {size})")
        return TallyVector(np.bincount(data, minlength=size), n, batch.kind)
    if batch.kind == SUBSET:
        k = data.shape[1]
        if n and (data.min() < 0 or data.max() >= size):
            raise DomainMismatch(f"subset index outside [0, {size})")
        return TallyVector(np.bincount(data.ravel(), minlength=size), n, SUBSET, k)
    if data.shape[1] != size:
        raise DomainMismatch(f"bit vectors of length {data.shape[1]}, expected {size}")
    return TallyVector(data.sum(axis=0, dtype=np.int64), n, BITS)


def true_distribution(values, domain: Domain | int) -> np.ndarray:
    """Empirical proportions of each category in ``values``."""
    size = _as_domain(domain).size_d
    values = np.asarray(values)
    if values.size == 0:
        raise EmptyInput("no values")
    if values.min() < 0 or values.max() >= size:
        raise IndexOutOfDomain(f"value outside [0, {size})")
    return np.bincount(values.astype(np.int64), minlength=size) / values.size
