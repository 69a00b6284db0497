"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Times the raw kernels on synthetic batches, then whole slice closures with
each backend swapped in, and checks that both backends agree.
"""
import argparse
import time

import numpy as np

from minclones import _kernels_py, clone, constructions, group, kernels

try:
    from minclones import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def kernel_cases(rng):
    for n, k, length, rows, batch in ((2, 3, 64, 200, 200_000), (4, 3, 256, 300, 100_000),
                                      (6, 2, 1296, 200, 40_000)):
        f = rng.integers(n, size=n ** k, dtype=np.uint8)
        tables = rng.integers(n, size=(rows, length), dtype=np.uint8)
        idx = rng.integers(rows, size=(batch, k), dtype=np.int64)
        yield f"compose n={n} k={k} len={length} batch={batch}", (f, n, tables, idx,
                                                                   kernels.hash_multipliers(length))


def slice_cases():
    z2 = group.free_boolean_action(3, 1)
    k4 = group.free_boolean_action(1, 2)
    z3 = group.regular_cyclic_action(3, 2)
    yield "odd majority, Z2 s=3, r=3", z2, [constructions.odd_majority(z2)], 3
    yield "Klein sum, r=5", k4, [constructions.boolean_sum(k4)], 5
    yield "orbit-semiprojection, Z3 s=2, r=3", z3, [constructions.palfy_op(
        constructions.PalfyParams(z3, 2, 0))], 3


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kernels_c is None:
        print("compiled kernels not built; nothing to compare")
        return
    rng = np.random.default_rng(1)
    print(f"{'case':48s} {'numpy s':>9s} {'cython s':>9s} {'speedup':>8s}")
    for name, (f, n, tables, idx, mult) in kernel_cases(rng):
        tp, (op, hp) = best_of(lambda: _kernels_py.compose_batch(f, n, tables, idx, mult), args.repeat)
        tc, (oc, hc) = best_of(lambda: _kernels_c.compose_batch(f, n, tables, idx, mult), args.repeat)
        assert np.array_equal(op, np.asarray(oc)) and np.array_equal(hp, np.asarray(hc))
        print(f"{name:48s} {tp:9.4f} {tc:9.4f} {tp / tc:7.1f}x")
    saved = kernels._impl
    try:
        for name, action, ops, r in slice_cases():
            res = {}
            for label, impl in (("numpy", _kernels_py), ("cython", _kernels_c)):
                kernels._impl = impl
                res[label] = best_of(lambda: clone.generate_slice(action, ops, r), args.repeat)
            (tp, sp), (tc, sc) = res["numpy"], res["cython"]
            assert sp.fingerprint() == sc.fingerprint()
            label = f"slice {name} ({len(sp)} tables)"
            print(f"{label:48s} {tp:9.4f} {tc:9.4f} {tp / tc:7.1f}x")
    finally:
        kernels._impl = saved


if __name__ == "__main__":
    main()
