"""Experiment harness: mechanism x epsilon x trial runs scored by mean absolute error.

Every trial privatizes the whole dataset with its own generator, tallies the
reports and estimates the distribution from the tally alone. Trial seeds are
hashed from (master seed, mechanism, epsilon, trial index), so results do not
depend on execution order or on the number of worker processes.
"""

import csv
import hashlib
import io
import json
import struct
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import LdpError, validate_budget
from .mechanisms import BENCH_ORDER, make_mechanism

DEFAULT_EPSILONS = (0.5, 1.0, 2.0)


class LengthMismatch(LdpError):
    pass


def mae(estimate, truth):
    """Mean absolute error between two frequency vectors."""
    estimate = np.asarray(estimate, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if estimate.shape != truth.shape:
        raise LengthMismatch(f"lengths differ: {estimate.shape} vs {truth.shape}")
    return float(np.mean(np.abs(estimate - truth)))


def trial_seed(master_seed, mechanism, epsilon, trial):
    key = struct.pack("<q", int(master_seed)) + mechanism.encode() + struct.pack("<dq", float(epsilon), int(trial))
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


@dataclass(frozen=True)
class TrialResult:
    mechanism: str
    epsilon: float
    trial: int
    seed: int
    mae: float
    elapsed: float


def run_trial(dataset, mech, seed, backend=None, truth=None):
    """Privatize ``dataset`` once with ``mech`` and score the estimate."""
    if truth is None:
        truth = dataset.distribution()
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    # the estimator only sees the tally of reports, never dataset.values
    t = mech.privatize_tally(dataset.values, rng, backend)
    estimate = mech.estimate(t)
    elapsed = time.perf_counter() - start
    return TrialResult(mech.name, mech.epsilon, -1, seed, mae(estimate, truth), elapsed)


@dataclass(frozen=True)
class ExperimentPlan:
    dataset: object
    mechanisms: tuple = BENCH_ORDER
    epsilons: tuple = DEFAULT_EPSILONS
    trials: int = 100
    master_seed: int = 0
    options: dict = field(default_factory=dict)  # mechanism -> override kwargs

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise LdpError(f"trials must be a positive integer, got {self.trials!r}")
        object.__setattr__(self, "epsilons", tuple(validate_budget(e).epsilon for e in self.epsilons))
        object.__setattr__(self, "mechanisms", tuple(self.mechanisms))
        for name in self.mechanisms:
            # fail fast on bad names or options
            make_mechanism(name, self.dataset.d, self.epsilons[0], **self.options.get(name, {}))


@dataclass
class CellSummary:
    mechanism: str
    epsilon: float
    mae_mean: float
    mae_std: float
    trials: int


@dataclass
class BenchSummary:
    dataset: str
    attribute: str
    n: int
    d: int
    cells: list
    results: list

    def cell(self, mechanism, epsilon):
        for c in self.cells:
            if c.mechanism == mechanism and c.epsilon == float(epsilon):
                return c
        raise KeyError((mechanism, epsilon))


def _run_cell(args):
    dataset, name, eps, options, trials, master_seed, backend = args
    mech = make_mechanism(name, dataset.d, eps, **options)
    truth = dataset.distribution()
    out = []
    for i in trials:
        seed = trial_seed(master_seed, name, eps, i)
        r = run_trial(dataset, mech, seed, backend, truth)
        out.append(TrialResult(name, eps, i, seed, r.mae, r.elapsed))
    return out


def run_plan(plan, workers=1, backend=None):
    """Run every (mechanism, epsilon) cell of ``plan`` for ``plan.trials`` trials."""
    jobs = [
        (plan.dataset, name, eps, plan.options.get(name, {}), range(plan.trials), plan.master_seed, backend)
        for name in plan.mechanisms
        for eps in plan.epsilons
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(_run_cell, jobs))
    else:
        batches = [_run_cell(job) for job in jobs]
    results = [r for batch in batches for r in batch]
    results.sort(key=lambda r: (plan.mechanisms.index(r.mechanism), plan.epsilons.index(r.epsilon), r.trial))
    cells = []
    for batch in batches:
        maes = np.array([r.mae for r in batch])
        cells.append(CellSummary(batch[0].mechanism, batch[0].epsilon, float(maes.mean()), float(maes.std()), len(maes)))
    ds = plan.dataset
    return BenchSummary(ds.name, ds.attribute, ds.n, ds.d, cells, results)


# --- output -----------------------------------------------------------------

RESULT_COLUMNS = ("dataset", "attribute", "mechanism", "epsilon", "trial", "mae", "seed")


def result_rows(summary):
    for r in summary.results:
        yield (summary.dataset, summary.attribute, r.mechanism, r.epsilon, r.trial, repr(r.mae), r.seed)


def write_results(summaries, fh, fmt="csv"):
    """Per-trial results for one or more summaries."""
    rows = [row for s in summaries for row in result_rows(s)]
    if fmt == "json":
        json.dump([dict(zip(RESULT_COLUMNS, row)) for row in rows], fh, indent=1)
        fh.write("\n")
        return
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(RESULT_COLUMNS)
    w.writerows(rows)


def summary_table(summaries, epsilon, digits=3):
    """Text table, one row per dataset attribute, Mean/Std column pair per mechanism."""
    mechs = []
    for s in summaries:
        for c in s.cells:
            if c.mechanism not in mechs:
                mechs.append(c.mechanism)
    head = ["Dataset", "Attribute"] + [f"{m} {stat}" for m in mechs for stat in ("Mean", "Std.")]
    body = []
    for s in summaries:
        row = [s.dataset, s.attribute]
        for m in mechs:
            try:
                c = s.cell(m, epsilon)
                row += [f"{c.mae_mean:.{digits}f}", f"{c.mae_std:.{digits}f}"]
            except KeyError:
                row += ["-", "-"]
        body.append(row)
    widths = [max(len(str(x)) for x in col) for col in zip(head, *body)]
    buf = io.StringIO()
    buf.write(f"MAE, epsilon = {epsilon:g}\n")
    for row in [head] + body:
        buf.write("  ".join(str(x).rjust(w) for x, w in zip(row, widths)).rstrip() + "\n")
    return buf.getvalue()


SUMMARY_COLUMNS = ("dataset", "attribute", "n", "d", "mechanism", "epsilon", "mae_mean", "mae_std", "trials")


def summary_rows(summaries):
    for s in summaries:
        for c in s.cells:
            yield (s.dataset, s.attribute, s.n, s.d, c.mechanism, c.epsilon, c.mae_mean, c.mae_std, c.trials)


def write_summary(summaries, fh, fmt="table"):
    if fmt == "table":
        epsilons = sorted({c.epsilon for s in summaries for c in s.cells})
        fh.write("\n".join(summary_table(summaries, e) for e in epsilons))
    elif fmt == "json":
        json.dump([dict(zip(SUMMARY_COLUMNS, row)) for row in summary_rows(summaries)], fh, indent=1)
        fh.write("\n")
    else:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        w.writerows((*row[:6], repr(row[6]), repr(row[7]), row[8]) for row in summary_rows(summaries))


SERIES_COLUMNS = ("d", "n", "epsilon", "mechanism", "mae_mean", "mae_std")


def write_series(summaries, fh):
    """Plot-ready series: one row per (d, n, epsilon, mechanism), sorted."""
    rows = sorted(
        ((s.d, s.n, c.epsilon, c.mechanism, c.mae_mean, c.mae_std) for s in summaries for c in s.cells),
        key=lambda r: (r[0], r[2], r[3], r[1]),
    )
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SERIES_COLUMNS)
    w.writerows((*r[:4], repr(r[4]), repr(r[5])) for r in rows)


def summary_dict(summary):
    return {
        "dataset": summary.dataset,
        "attribute": summary.attribute,
        "n": summary.n,
        "d": summary.d,
        "cells": [asdict(c) for c in summary.cells],
    }
