"""``ldpfreq`` command line: privatize, estimate, audit, synth, ingest, fetch, bench.

Exit codes: 0 success, 1 I/O error, 2 configuration error, 3 capability limit
(output space too large to enumerate).
"""

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import audit as audit_mod
from . import bench, data
from .core import BITS, EXTENDED, SUBSET, VALUE, LdpError, OutputSpaceTooLarge, ReportBatch, tally
from .mechanisms import BENCH_ORDER, MECHANISMS, make_mechanism, project_simplex

REPORTS_FORMAT = "ldpfreq-reports/1"

DEFAULTS_HELP = """\
defaults for parameters the mechanisms leave open:
  ksubset  k = round(d / (e^eps + 1)), clamped to [1, d]
  brappor  q = e^(eps/2) / (e^(eps/2) + 1) keeps a 1-bit, p = 1 / (e^(eps/2) + 1) raises a 0-bit
  cms      flip probability 1 / (e^(eps/2) + 1), debias constant (e^(eps/2) + 1) / (e^(eps/2) - 1)
  hr       d' = smallest power of two >= d + 1, s = d'/2 (S_v = +1 columns of Hadamard row v + 1)
  synth    rho = 2 / d (weights (1 - rho)^i)
"""


class ConfigError(Exception):
    pass


class CapabilityError(Exception):
    pass


def _float_list(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _int_list(text):
    return [int(x) for x in text.split(",") if x.strip()]


def _mechanism_args(p, required=True):
    p.add_argument("--mech", required=required, choices=sorted(MECHANISMS), help="mechanism id")
    p.add_argument("--eps", type=float, help="privacy budget epsilon (> 0)")
    p.add_argument("--k", type=int, help="ksubset only: subset size")
    p.add_argument("--p", type=float, dest="p_bit", help="brappor only: probability a 0-bit reads 1")
    p.add_argument("--q", type=float, dest="q_bit", help="brappor only: probability a 1-bit reads 1")
    p.add_argument("--dprime", type=int, help="hr only: extended domain size (power of two)")
    p.add_argument("--verbatim", action="store_true", help="cms only: use the (e^eps+1)/(e^eps-1) constant")


def _options(args):
    return {"k": args.k, "p": args.p_bit, "q": args.q_bit, "dprime": args.dprime, "verbatim": args.verbatim}


def _input_args(p):
    p.add_argument("--in", dest="input", required=True, help="CSV file, or a .ldpd dataset file")
    p.add_argument("--col", help="column index (0-based) or header name; omit for .ldpd files")
    p.add_argument("--delimiter", default=",", help="field delimiter; 'ws' splits on whitespace (default ',')")
    p.add_argument("--header", action="store_true", help="first row holds column names")


def _load_input(args):
    path = Path(args.input)
    if args.col is None:
        if not path.is_file():
            raise FileNotFoundError(f"no such file: {path}")
        return data.read_dataset(path)
    delimiter = None if args.delimiter == "ws" else args.delimiter
    return data.ingest_csv(path, args.col, delimiter=delimiter, has_header=args.header)


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout
    return open(path, "w", newline="", encoding="utf-8")


# --- report files -------------------------------------------------------------


def _report_header(mech, labels, n):
    head = {"format": REPORTS_FORMAT, "mechanism": mech.name, "kind": mech.report_kind, "d": mech.d,
            "epsilon": mech.epsilon, "n": n, "labels": labels}
    if mech.name == "ksubset":
        head["k"] = mech.k
    elif mech.name == "brappor" and mech.custom:
        # defaults are rebuilt from epsilon; q near 1 does not survive a round trip through 1 - q
        head.update(p=mech.p, q=mech.q)
    elif mech.name == "cms":
        head["verbatim"] = mech.verbatim
    elif mech.name == "hr":
        head["dprime"] = mech.dprime
    return head


def format_reports(mech, batch, labels):
    lines = [json.dumps(_report_header(mech, labels, len(batch)), sort_keys=True, separators=(",", ":"))]
    if batch.kind == BITS:
        lines += ["".join("1" if b else "0" for b in row) for row in batch.data.tolist()]
    elif batch.kind == SUBSET:
        lines += [",".join(map(str, row)) for row in batch.data.tolist()]
    else:
        lines += [str(x) for x in batch.data.tolist()]
    return "\n".join(lines) + "\n"


def parse_reports(text):
    """Return ``(header, ReportBatch)`` from the text of a report file."""
    first, _, rest = text.partition("\n")
    try:
        head = json.loads(first)
    except ValueError:
        raise ConfigError("report file lacks its JSON header line") from None
    if not isinstance(head, dict):
        raise ConfigError("report file lacks its JSON header line")
    if head.get("format") != REPORTS_FORMAT:
        raise ConfigError(f"unsupported report format {head.get('format')!r}")
    lines = [line for line in rest.split("\n") if line]
    if not lines:
        raise ConfigError("report file holds no reports")
    kind = head["kind"]
    try:
        if kind == BITS:
            arr = np.array([[c == "1" for c in line] for line in lines], dtype=np.uint8).reshape(len(lines), -1)
            size = head["d"]
        elif kind == SUBSET:
            arr = np.array([[int(x) for x in line.split(",")] for line in lines], dtype=np.int64)
            arr = arr.reshape(len(lines), head["k"])
            size = head["d"]
        elif kind in (VALUE, EXTENDED):
            arr = np.array([int(x) for x in lines], dtype=np.int64)
            size = head["dprime"] if kind == EXTENDED else head["d"]
        else:
            raise ConfigError(f"unknown report kind {kind!r}")
    except ValueError as exc:
        raise ConfigError(f"malformed report line: {exc}") from None
    if len(lines) != head["n"]:
        raise ConfigError(f"header says n={head['n']}, file holds {len(lines)} reports")
    return head, ReportBatch(kind, arr, size)


def _mech_from_header(head):
    opts = {key: head.get(key) for key in ("k", "p", "q", "dprime", "verbatim") if key in head}
    return make_mechanism(head["mechanism"], head["d"], head["epsilon"], **opts)


# --- subcommands ------------------------------------------------------------------


def cmd_privatize(args):
    if args.eps is None:
        raise ConfigError("--eps is required")
    ds = _load_input(args)
    mech = make_mechanism(args.mech, ds.d, args.eps, **_options(args))
    batch = mech.privatize_many(ds.values, np.random.default_rng(args.seed))
    out = _open_out(args.out)
    try:
        out.write(format_reports(mech, batch, ds.labels))
    finally:
        if out is not sys.stdout:
            out.close()


def cmd_estimate(args):
    head, batch = parse_reports(Path(args.reports).read_text(encoding="utf-8"))
    if args.mech != head["mechanism"]:
        raise ConfigError(f"reports were produced by {head['mechanism']}, not {args.mech}")
    if args.eps is not None and args.eps != head["epsilon"]:
        raise ConfigError(f"reports were produced with epsilon={head['epsilon']}, not {args.eps}")
    mech = _mech_from_header(head)
    est = mech.estimate(tally(batch, mech.tally_size))
    if args.project_simplex:
        est = project_simplex(est)
    labels = head.get("labels") or [str(i) for i in range(mech.d)]
    out = _open_out(args.out)
    try:
        if args.format == "json":
            json.dump({"mechanism": mech.name, "epsilon": mech.epsilon, "n": len(batch),
                       "estimate": dict(zip(labels, est.tolist()))}, out, indent=1)
            out.write("\n")
        else:
            sep = "," if args.format == "csv" else "\t"
            if args.format == "csv":
                out.write("label,estimate\n")
            for label, value in zip(labels, est.tolist()):
                out.write(f"{label}{sep}{value!r}\n")
    finally:
        if out is not sys.stdout:
            out.close()


def cmd_audit(args):
    if args.eps is None or args.d is None:
        raise ConfigError("--d and --eps are required")
    mech = make_mechanism(args.mech, args.d, args.eps, **_options(args))
    try:
        res = audit_mod.audit_ldp(mech, mode=args.mode)
    except OutputSpaceTooLarge as exc:
        hint = " (try --mode decompose)" if mech.report_kind == BITS else ""
        raise CapabilityError(f"{exc}{hint}") from None
    if args.format == "json":
        print(json.dumps(res.as_dict(), indent=1))
        return
    print(f"mechanism   {res.mechanism}  d={res.d}  epsilon={res.epsilon:g}  ({res.method})")
    print(f"max_ratio   {res.max_ratio!r}")
    print(f"e^epsilon   {res.bound!r}")
    print(f"verdict     {'SATISFIED' if res.satisfied else 'VIOLATED'}, {'TIGHT' if res.tight else 'NOT TIGHT'}")
    print(f"witness     v1={res.v1} v2={res.v2} output={res.as_dict()['witness']['output']}")


def cmd_synth(args):
    ds = data.generate_synthetic(data.SyntheticSpec(args.n, args.d, args.rho, args.seed))
    out = _open_out(args.out)
    try:
        out.write(data.dumps_dataset(ds))
    finally:
        if out is not sys.stdout:
            out.close()


def cmd_ingest(args):
    if args.dataset:
        names = [args.attr] if args.attr else list(data.KNOWN[args.dataset].attributes)
        datasets = [data.load_known(args.dataset, a, download=not args.offline) for a in names]
    else:
        if args.input is None or args.col is None:
            raise ConfigError("give --dataset, or --in together with --col")
        datasets = [_load_input(args)]
    if args.out:
        if len(datasets) != 1:
            raise ConfigError("--out needs a single attribute (--attr)")
        data.write_dataset(datasets[0], args.out)
    for name, n, attribute, d in data.dataset_sizes_table(datasets):
        print(f"{name}\t{n}\t{attribute}\t{d}")


def cmd_fetch(args):
    keys = list(data.KNOWN) if args.dataset == "all" else [args.dataset]
    for key in keys:
        print(data.fetch(key, args.dir, force=args.force))


def _bench_datasets(args):
    if args.dataset == "synthetic":
        sizes = _int_list(args.n) if args.n else [20000]
        return [data.generate_synthetic(data.SyntheticSpec(n, args.d, args.rho, args.data_seed)) for n in sizes]
    if args.dataset in data.KNOWN:
        attrs = args.attrs.split(",") if args.attrs else list(data.KNOWN[args.dataset].attributes)
        return [data.load_known(args.dataset, a, download=not args.offline) for a in attrs]
    return [data.read_dataset(args.dataset)]


def cmd_bench(args):
    mechs = tuple(args.mechs.split(",")) if args.mechs else BENCH_ORDER
    options = {}
    if args.k is not None:
        options["ksubset"] = {"k": args.k}
    if args.dprime is not None:
        options["hr"] = {"dprime": args.dprime}
    summaries = []
    for ds in _bench_datasets(args):
        plan = bench.ExperimentPlan(ds, mechs, tuple(_float_list(args.eps)), args.trials, args.seed, options)
        summaries.append(bench.run_plan(plan, workers=args.workers))
    out_dir = Path(args.out_dir or os.environ.get("LDPFREQ_OUT_DIR") or "ldpfreq-out")
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "results.csv", "w", newline="") as fh:
        bench.write_results(summaries, fh)
    ext = {"table": "txt", "csv": "csv", "json": "json"}[args.format]
    with open(out_dir / f"summary.{ext}", "w", newline="") as fh:
        bench.write_summary(summaries, fh, args.format)
    with open(out_dir / "series.csv", "w", newline="") as fh:
        bench.write_series(summaries, fh)
    bench.write_summary(summaries, sys.stdout, "table")
    print(f"wrote {out_dir}/results.csv, summary.{ext}, series.csv")


# --- parser -------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ldpfreq",
        description="Locally differentially private frequency estimation.",
        epilog=DEFAULTS_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = dict(formatter_class=argparse.RawDescriptionHelpFormatter, epilog=DEFAULTS_HELP)

    p = sub.add_parser("privatize", help="privatize a column of values into a report file", **fmt)
    _mechanism_args(p)
    _input_args(p)
    p.add_argument("--seed", type=int, default=0, help="generator seed (default 0)")
    p.add_argument("--out", help="report file (default stdout)")
    p.set_defaults(func=cmd_privatize)

    p = sub.add_parser("estimate", help="estimate frequencies from a report file", **fmt)
    _mechanism_args(p)
    p.add_argument("--reports", required=True, help="report file written by privatize")
    p.add_argument("--project-simplex", action="store_true", help="clamp negatives to 0 and renormalise")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("audit", help="exact worst-case privacy ratio of a mechanism", **fmt)
    _mechanism_args(p)
    p.add_argument("--d", type=int, help="domain size")
    p.add_argument("--mode", choices=("enumerate", "decompose", "auto"), default="enumerate",
                   help="enumerate the output space, or use the per-bit closed form (bit-vector mechanisms)")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("synth", help="generate a truncated-geometric dataset", **fmt)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--rho", type=float, help="geometric ratio parameter in (0, 1) (default 2/d)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="dataset file (default stdout)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ingest", help="encode a categorical column as a dataset file")
    p.add_argument("--dataset", choices=sorted(data.KNOWN), help="a known benchmark dataset")
    p.add_argument("--attr", help="attribute of --dataset (default: all)")
    p.add_argument("--offline", action="store_true", help="do not download missing datasets")
    p.add_argument("--in", dest="input")
    p.add_argument("--col")
    p.add_argument("--delimiter", default=",", help="field delimiter; 'ws' splits on whitespace")
    p.add_argument("--header", action="store_true")
    p.add_argument("--out", help="dataset file to write")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("fetch", help="download and verify benchmark datasets")
    p.add_argument("--dataset", choices=sorted(data.KNOWN) + ["all"], default="all")
    p.add_argument("--dir", help="cache directory (default $LDPFREQ_DATA_DIR or ~/.cache/ldpfreq/datasets)")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_fetch)

    p = sub.add_parser("bench", help="MAE benchmark over mechanisms and budgets", **fmt)
    p.add_argument("--dataset", required=True,
                   help=f"one of {', '.join(data.KNOWN)}, 'synthetic', or a .ldpd dataset file")
    p.add_argument("--attrs", help="comma-separated attributes of a known dataset (default: all)")
    p.add_argument("--mechs", help=f"comma-separated mechanisms (default {','.join(BENCH_ORDER)})")
    p.add_argument("--eps", default="0.5,1,2", help="comma-separated budgets (default 0.5,1,2)")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0, help="master seed for trial seeds")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--k", type=int, help="ksubset subset size")
    p.add_argument("--dprime", type=int, help="hr extended domain size")
    p.add_argument("--n", help="synthetic: comma-separated dataset sizes (default 20000)")
    p.add_argument("--d", type=int, default=100, help="synthetic: domain size (default 100)")
    p.add_argument("--rho", type=float, help="synthetic: geometric parameter (default 2/d)")
    p.add_argument("--data-seed", type=int, default=0, help="synthetic: dataset seed")
    p.add_argument("--offline", action="store_true")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table", help="summary file format")
    p.add_argument("--out-dir", help="output directory (default $LDPFREQ_OUT_DIR or ./ldpfreq-out)")
    p.set_defaults(func=cmd_bench)
    return parser


def _fail(exc, code):
    print(f"ldpfreq: {exc}", file=sys.stderr)
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except CapabilityError as exc:
        return _fail(exc, 3)
    except (OSError, data.DatasetUnavailable) as exc:
        return _fail(exc, 1)
    except (ConfigError, LdpError, KeyError) as exc:
        return _fail(exc, 2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
