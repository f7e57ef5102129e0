import csv
import io
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ldpfreq.bench import (
    ExperimentPlan,
    LengthMismatch,
    mae,
    run_plan,
    run_trial,
    summary_dict,
    trial_seed,
    write_results,
    write_series,
    write_summary,
)
from ldpfreq.core import LdpError
from ldpfreq.data import SyntheticSpec, generate_synthetic
from ldpfreq.mechanisms import BENCH_ORDER, make_mechanism


@pytest.fixture(scope="module")
def small():
    return generate_synthetic(SyntheticSpec(n=2000, d=5, rho=0.3, seed=1))


def test_mae_examples():
    assert mae([0.2, 0.8], [0.2, 0.8]) == 0
    assert mae([1, 0], [0, 1]) == 1.0
    assert mae([0.6, 0.4], [0.5, 0.5]) == pytest.approx(0.1)
    with pytest.raises(LengthMismatch):
        mae([0.5, 0.5], [1.0])


vectors = st.lists(st.floats(-2, 2), min_size=1, max_size=12)


@given(vectors, st.data())
def test_mae_symmetric_and_permutation_equivariant(a, data):
    b = data.draw(st.lists(st.floats(-2, 2), min_size=len(a), max_size=len(a)))
    perm = data.draw(st.permutations(range(len(a))))
    assert mae(a, b) == mae(b, a) >= 0
    assert mae(np.array(a)[perm], np.array(b)[perm]) == pytest.approx(mae(a, b), abs=1e-15)
    assert (mae(a, b) == 0) == (a == b)


def test_trial_seed_is_stable_and_distinct():
    s = trial_seed(0, "krr", 1.0, 0)
    assert s == trial_seed(0, "krr", 1.0, 0)
    assert 0 <= s < 2**64
    others = {trial_seed(0, "krr", 1.0, 1), trial_seed(0, "hr", 1.0, 0), trial_seed(0, "krr", 2.0, 0), trial_seed(1, "krr", 1.0, 0)}
    assert s not in others and len(others) == 4


@pytest.mark.parametrize("name", BENCH_ORDER)
def test_no_noise_limit(name):
    ds = generate_synthetic(SyntheticSpec(n=10**4, d=5, rho=0.3, seed=2))
    r = run_trial(ds, make_mechanism(name, 5, 50.0), seed=9)
    assert r.mae < 0.01


def test_trial_determinism(small):
    mech = make_mechanism("ksubset", small.d, 1.0)
    assert run_trial(small, mech, 5).mae == run_trial(small, mech, 5).mae


def test_single_trial_has_zero_std(small):
    summary = run_plan(ExperimentPlan(small, mechanisms=("krr", "cms"), epsilons=(1.0,), trials=1))
    assert [c.mae_std for c in summary.cells] == [0.0, 0.0]


def test_doubling_trials_keeps_prefix(small):
    a = run_plan(ExperimentPlan(small, trials=3, master_seed=4))
    b = run_plan(ExperimentPlan(small, trials=6, master_seed=4))
    prefix = [(r.mechanism, r.epsilon, r.trial, r.mae) for r in b.results if r.trial < 3]
    assert prefix == [(r.mechanism, r.epsilon, r.trial, r.mae) for r in a.results]


def test_workers_do_not_change_results(small):
    plan = ExperimentPlan(small, trials=4, master_seed=7)
    a, b = run_plan(plan, workers=1), run_plan(plan, workers=2)
    assert [(r.seed, r.mae) for r in a.results] == [(r.seed, r.mae) for r in b.results]
    assert [(c.mae_mean, c.mae_std) for c in a.cells] == [(c.mae_mean, c.mae_std) for c in b.cells]


def test_summary_statistics(small):
    summary = run_plan(ExperimentPlan(small, mechanisms=("hr",), epsilons=(0.5,), trials=5))
    maes = np.array([r.mae for r in summary.results])
    cell = summary.cell("hr", 0.5)
    assert cell.mae_mean == pytest.approx(maes.mean())
    assert cell.mae_std == pytest.approx(maes.std(ddof=0))
    assert cell.trials == 5
    with pytest.raises(KeyError):
        summary.cell("hr", 1.0)


def test_plan_validation(small):
    with pytest.raises(LdpError):
        ExperimentPlan(small, trials=0)
    with pytest.raises(LdpError):
        ExperimentPlan(small, epsilons=(1.0, -1.0))
    with pytest.raises(LdpError):
        ExperimentPlan(small, mechanisms=("krr", "nope"))
    with pytest.raises(LdpError):
        ExperimentPlan(small, mechanisms=("krr",), options={"krr": {"k": 2}})
    plan = ExperimentPlan(small, mechanisms=("ksubset",), epsilons=(1.0,), trials=1, options={"ksubset": {"k": 2}})
    assert run_plan(plan).cells[0].trials == 1


def test_accuracy_improves_with_budget():
    ds = generate_synthetic(SyntheticSpec(n=10**4, d=10, rho=0.3, seed=5))
    summary = run_plan(ExperimentPlan(ds, epsilons=(0.5, 2.0), trials=100))
    for name in BENCH_ORDER:
        lo, hi = summary.cell(name, 0.5), summary.cell(name, 2.0)
        assert hi.mae_mean <= lo.mae_mean + 2 * (lo.mae_std + hi.mae_std)
        assert hi.mae_mean < lo.mae_mean


def test_output_formats(small):
    summary = run_plan(ExperimentPlan(small, mechanisms=("krr", "brappor"), epsilons=(0.5, 2.0), trials=2))

    buf = io.StringIO()
    write_results([summary], buf)
    rows = list(csv.reader(io.StringIO(buf.getvalue())))
    assert rows[0] == ["dataset", "attribute", "mechanism", "epsilon", "trial", "mae", "seed"]
    assert len(rows) == 1 + 8
    assert float(rows[1][5]) == summary.results[0].mae

    buf = io.StringIO()
    write_results([summary], buf, "json")
    assert json.loads(buf.getvalue())[0]["mechanism"] == "krr"

    buf = io.StringIO()
    write_summary([summary], buf)
    text = buf.getvalue()
    assert "MAE, epsilon = 0.5" in text and "MAE, epsilon = 2" in text
    assert "krr Mean" in text and "brappor Std." in text

    buf = io.StringIO()
    write_summary([summary], buf, "csv")
    assert len(buf.getvalue().splitlines()) == 1 + 4

    buf = io.StringIO()
    write_summary([summary], buf, "json")
    assert {row["mechanism"] for row in json.loads(buf.getvalue())} == {"krr", "brappor"}

    buf = io.StringIO()
    write_series([summary], buf)
    series = list(csv.reader(io.StringIO(buf.getvalue())))
    assert series[0] == ["d", "n", "epsilon", "mechanism", "mae_mean", "mae_std"]
    assert [r[2:4] for r in series[1:]] == [["0.5", "brappor"], ["0.5", "krr"], ["2.0", "brappor"], ["2.0", "krr"]]

    assert summary_dict(summary)["cells"][0]["mechanism"] == "krr"
