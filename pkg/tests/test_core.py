import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ldpfreq.core import (
    BitVectorReport,
    Domain,
    DomainMismatch,
    EmptyInput,
    IndexOutOfDomain,
    LdpError,
    MixedReportKinds,
    NonPositiveEpsilon,
    PrivacyBudget,
    ReportBatch,
    SubsetReport,
    TallyVector,
    ValueReport,
    tally,
    true_distribution,
    validate_budget,
)


def test_validate_budget_passes_positive_values():
    assert validate_budget(0.5) == PrivacyBudget(0.5)
    assert validate_budget(0.5).epsilon == 0.5


@pytest.mark.parametrize("raw", [0.0, -1.0, math.nan, math.inf, -math.inf, "abc", None])
def test_validate_budget_rejects(raw):
    with pytest.raises(NonPositiveEpsilon):
        validate_budget(raw)


def test_domain_invariants():
    assert Domain(3, ["a", "b", "c"]).label(1) == "b"
    with pytest.raises(LdpError):
        Domain(1)
    with pytest.raises(LdpError):
        Domain(2, ["a", "a"])
    with pytest.raises(LdpError):
        Domain(3, ["a", "b"])
    with pytest.raises(IndexOutOfDomain):
        Domain(3).check(3)


def test_tally_value_reports():
    t = tally([ValueReport(0), ValueReport(0), ValueReport(2)], Domain(3))
    assert t.counts.tolist() == [2, 0, 1]
    assert t.n == 3


def test_tally_subset_reports():
    t = tally([SubsetReport((0, 1)), SubsetReport((1, 2))], 3)
    assert t.counts.tolist() == [1, 2, 1]
    assert t.n == 2
    assert t.counts.sum() == t.n * t.k == 4


def test_tally_bit_reports():
    t = tally([BitVectorReport((1, 0, 1)), BitVectorReport((1, 0, 0))], 3)
    assert t.counts.tolist() == [2, 0, 1]
    assert t.n == 2


def test_tally_errors():
    with pytest.raises(MixedReportKinds):
        tally([ValueReport(0), SubsetReport((0, 1))], 3)
    with pytest.raises(DomainMismatch):
        tally([ValueReport(3)], 3)
    with pytest.raises(DomainMismatch):
        tally([BitVectorReport((1, 0))], 3)
    with pytest.raises(LdpError):
        SubsetReport((2, 1))


def test_tally_counts_are_read_only():
    t = tally([ValueReport(1)], 2)
    with pytest.raises(ValueError):
        t.counts[0] = 5


@pytest.mark.parametrize(
    "values, d, expected",
    [([0, 0, 1], 2, [2 / 3, 1 / 3]), ([1, 1, 1, 1], 2, [0, 1]), ([0, 1, 2, 3], 4, [0.25] * 4)],
)
def test_true_distribution(values, d, expected):
    np.testing.assert_allclose(true_distribution(values, Domain(d)), expected, rtol=0, atol=1e-15)


def test_true_distribution_errors():
    with pytest.raises(EmptyInput):
        true_distribution([], 2)
    with pytest.raises(IndexOutOfDomain):
        true_distribution([0, 2], 2)


value_lists = st.lists(st.integers(0, 5), min_size=1, max_size=60)


@given(value_lists, st.randoms())
def test_tally_is_permutation_invariant(values, random):
    shuffled = list(values)
    random.shuffle(shuffled)
    a = tally(ReportBatch("value", np.array(values), 6), 6)
    b = tally(ReportBatch("value", np.array(shuffled), 6), 6)
    assert a == b


@given(value_lists, value_lists)
def test_tally_merge_matches_concatenation(xs, ys):
    whole = tally(ReportBatch("value", np.array(xs + ys), 6), 6)
    parts = tally(ReportBatch("value", np.array(xs), 6), 6) + tally(ReportBatch("value", np.array(ys), 6), 6)
    assert whole == parts


@given(st.lists(st.lists(st.integers(0, 1), min_size=4, max_size=4), min_size=1, max_size=30))
def test_bit_tally_merge(rows):
    arr = np.array(rows, dtype=np.uint8)
    half = len(rows) // 2
    whole = tally(ReportBatch("bits", arr, 4), 4)
    if half:
        merged = tally(ReportBatch("bits", arr[:half], 4), 4) + tally(ReportBatch("bits", arr[half:], 4), 4)
        assert merged == whole
    assert (whole.counts <= whole.n).all()


@given(value_lists)
def test_true_distribution_on_simplex(values):
    f = true_distribution(values, 6)
    assert (f >= 0).all()
    assert abs(f.sum() - 1) <= 1e-9


def test_tally_vector_checks_sum():
    with pytest.raises(LdpError):
        TallyVector([1, 1], 3, "value")
    with pytest.raises(LdpError):
        TallyVector([4, 0], 3, "bits")


def test_batch_round_trips_single_reports():
    batch = ReportBatch("subset", np.array([[0, 2], [1, 3]]), 4)
    assert list(batch) == [SubsetReport((0, 2)), SubsetReport((1, 3))]
    again = ReportBatch.from_reports(list(batch), 4)
    assert np.array_equal(again.data, batch.data)
