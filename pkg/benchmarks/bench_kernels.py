"""Compare the compiled and reference kernel backends on the hot loop.

Run from the repository root:

    python3 benchmarks/bench_kernels.py [--sizes 513,1025,2049] [--repeats 5]

Times the per-row fractional kernel (the O(n^2) loop behind every Gagliardo
seminorm and every bisection step) on the 1-D tent for each available
backend, and cross-checks that both backends agree to near machine
precision.  Numbers are wall-clock medians on whatever machine this runs
on; single-core containers will not show any thread scaling.
"""

import argparse
import time

import numpy as np

import musielak as mk
from musielak import _kernels


def _inputs(n):
    spec = mk.GridSpec((-3.05,), (1.05,), n)
    u = mk.sample(mk.tent(center=-1.0), spec)
    grads = np.gradient(u.values, spec.h).reshape(-1, 1)
    return spec, u, grads


def _time_backend(backend, spec, u, grads, nf, repeats, threads):
    args = (spec.positions(), u.values.ravel(), grads, 1.0, 0.25, spec.h,
            nf.kernel_id, nf.kernel_params, 4, threads)
    rows = backend.frac_rows(*args)  # warm up and keep for the agreement check
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        backend.frac_rows(*args)
        times.append(time.perf_counter() - t0)
    return float(np.median(times)), _kernels.tree_sum(rows)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="513,1025,2049",
                        help="comma-separated grid sizes")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()
    sizes = [int(v) for v in args.sizes.split(",")]

    nf = mk.variable_exponent(("cosine", 2.5, 0.4, 1.0))
    names = mk.available_backends()
    print("backends:", ", ".join(names))
    header = "%8s" % "n" + "".join("%14s" % nm for nm in names)
    if len(names) == 2:
        # ratio > 1 means the second backend is faster
        header += "%12s %12s" % ("t0/t1", "rel diff")
    print(header)

    for n in sizes:
        spec, u, grads = _inputs(n)
        row = "%8d" % n
        medians = []
        values = []
        for nm in names:
            med, val = _time_backend(_kernels.get_backend(nm), spec, u,
                                     grads, nf, args.repeats, args.threads)
            medians.append(med)
            values.append(val)
            row += "%12.1f ms" % (med * 1e3)
        if len(values) == 2:
            rel = abs(values[1] - values[0]) / max(abs(values[0]), 1e-300)
            row += "%11.2fx %12.2e" % (medians[0] / medians[1], rel)
            assert rel < 5e-13, "backends disagree: rel diff %g" % rel
        print(row)

    print("\nvalues cross-checked to rel 5e-13 at every size")


if __name__ == "__main__":
    main()
