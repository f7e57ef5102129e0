import numpy as np

from .. import kernels
from ..core import (
    Domain,
    EmptyTally,
    IndexOutOfDomain,
    DomainMismatch,
    ReportBatch,
    TallyVector,
    tally,
    validate_budget,
)

# rows of uniforms drawn per chunk are capped so a chunk holds ~4M doubles
_CHUNK_DOUBLES = 1 << 22


class Mechanism:
    """A frequency oracle: client-side ``privatize`` plus server-side ``estimate``.

    Subclasses set ``name``, ``report_kind`` and ``uniforms_per_report`` and
    implement ``_sample`` (uniforms -> report data) and ``_estimate``.
    """

    name = ""
    report_kind = ""

    def __init__(self, d, epsilon):
        self.domain = d if isinstance(d, Domain) else Domain(d)
        self.d = self.domain.size_d
        self.epsilon = validate_budget(epsilon).epsilon

    @property
    def tally_size(self):
        return self.d

    @property
    def uniforms_per_report(self):
        raise NotImplementedError

    def params(self):
        """Derived channel parameters, for display."""
        return {}

    def __repr__(self):
        extra = "".join(f", {k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}(d={self.d}, epsilon={self.epsilon!r}{extra})"

    def _check_values(self, values):
        values = np.asarray(values)
        if values.ndim != 1:
            raise ValueError("values must be a 1-d sequence of category indices")
        if values.size and (values.min() < 0 or values.max() >= self.d
                            or not np.issubdtype(values.dtype, np.integer)):
            raise IndexOutOfDomain(f"value outside domain of size {self.d}")
        return values.astype(np.int64, copy=False)

    def _chunks(self, n):
        step = max(1, _CHUNK_DOUBLES // self.uniforms_per_report)
        for start in range(0, n, step):
            yield start, min(n, start + step)

    def privatize_many(self, values, rng, backend=None):
        """Privatize every value in ``values`` with generator ``rng``."""
        values = self._check_values(values)
        k = kernels.get_backend(backend)
        parts = [
            self._sample(k, values[a:b], rng.random((b - a, self.uniforms_per_report)))
            for a, b in self._chunks(values.shape[0])
        ]
        data = np.concatenate(parts) if parts else self._sample(k, values, np.empty((0, self.uniforms_per_report)))
        return ReportBatch(self.report_kind, data, self.tally_size)

    def privatize(self, v, rng, backend=None):
        """Privatize a single value; same draws as ``privatize_many([v], rng)``."""
        self.domain.check(v)
        return self.privatize_many(np.array([v], dtype=np.int64), rng, backend)[0]

    def privatize_tally(self, values, rng, backend=None):
        """Privatize ``values`` and return only the tally of the reports.

        Consumes the generator exactly as ``privatize_many`` does, so
        ``privatize_tally(x, rng) == tally(privatize_many(x, rng))`` for equal
        generator states.
        """
        return tally(self.privatize_many(values, rng, backend), self.tally_size)

    def check_tally(self, t):
        if not isinstance(t, TallyVector):
            raise TypeError("estimate expects a TallyVector")
        if t.kind != self.report_kind or len(t.counts) != self.tally_size:
            raise DomainMismatch(
                f"{self.name} expects a {self.report_kind} tally of width {self.tally_size}, "
                f"got {t.kind} of width {len(t.counts)}"
            )
        if t.n <= 0:
            raise EmptyTally("tally holds no reports")

    def estimate(self, t):
        """Frequency estimate (length d, unconstrained) from a tally of reports."""
        self.check_tally(t)
        return self._estimate(t)

