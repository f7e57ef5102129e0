"""Compare the compiled and pure-numpy sampling backends.

Usage: python benchmarks/bench_kernels.py [--n 1000000] [--d 100] [--eps 1] [--repeat 3]

Both backends consume identical uniforms, so the script also checks that
their reports agree before timing them.
"""

import argparse
import time

import numpy as np

from ldpfreq import kernels
from ldpfreq.mechanisms import BENCH_ORDER, make_mechanism


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=10**6)
    parser.add_argument("--d", type=int, default=100)
    parser.add_argument("--eps", type=float, default=1.0)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    backends = sorted(kernels.BACKENDS)
    if "cython" not in backends:
        print("compiled backend not built; only the python backend is available")
    values = np.random.default_rng(0).integers(0, args.d, args.n)
    print(f"n={args.n} d={args.d} eps={args.eps} (best of {args.repeat})")
    print(f"{'mechanism':<10} {'path':<9}" + "".join(f"{b:>10}" for b in backends) + "   speedup")
    for name in BENCH_ORDER:
        mech = make_mechanism(name, args.d, args.eps)
        outs = [mech.privatize_many(values[:20000], np.random.default_rng(1), b).data for b in backends]
        assert all(np.array_equal(outs[0], o) for o in outs[1:]), f"{name}: backends disagree"
        for path in ("reports", "tally"):
            fn = mech.privatize_many if path == "reports" else mech.privatize_tally
            secs = [best_time(lambda: fn(values, np.random.default_rng(1), b), args.repeat) for b in backends]
            speedup = f"{secs[backends.index('python')] / secs[0]:9.2f}x" if len(secs) > 1 else ""
            print(f"{name:<10} {path:<9}" + "".join(f"{s:9.3f}s" for s in secs) + " " + speedup)


if __name__ == "__main__":
    main()
