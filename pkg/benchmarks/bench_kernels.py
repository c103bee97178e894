"""Compare the compiled and pure-Python kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5]

Times the tridiagonal QL eigensolver and the time-series expectation kernel on
sector blocks of increasing size, plus one end-to-end sweep through each
backend, and checks the two backends agree.
"""
import argparse
import time

import numpy as np

from qbattery import kernels
from qbattery.dicke import InitialState, ModelParams, build_sector
from qbattery.dynamics import _observable_weights, run, summarize
from qbattery.hamiltonian import build_block, coupling_elements


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_blocks(repeat, samples):
    print(f"{'dim':>5} {'kernel':>12} {'python [ms]':>12} {'cython [ms]':>12} {'speedup':>8}")
    for nb in (4, 16, 50, 120):
        params = ModelParams(N_B=nb, N=300)
        sector = build_sector(params, nb)
        block = build_block(params, sector)
        d, e = block.diagonal.copy(), block.offdiagonal.copy()
        w, v = kernels.tridiagonal_eigh(d, e, backend="python")
        c = v[0].astype(complex)
        times = np.linspace(0.0, 1.0, samples)
        weights = _observable_weights(params, sector)
        off = coupling_elements(params, sector)
        cases = {
            "eigh": lambda b: kernels.tridiagonal_eigh(d, e, backend=b),
            "expect": lambda b: kernels.sector_expectations(
                w, v, c.real.copy(), c.imag.copy(), times, weights, off, backend=b),
        }
        for name, fn in cases.items():
            tp = best_of(lambda: fn("python"), repeat)
            if "cython" in kernels.BACKENDS:
                tc = best_of(lambda: fn("cython"), repeat)
                a, b = fn("python"), fn("cython")
                a, b = (a[0], b[0]) if name == "eigh" else (a, b)
                assert np.allclose(a, b, rtol=1e-10, atol=1e-10), f"{name} backends disagree"
                print(f"{sector.dim:5d} {name:>12} {1e3 * tp:12.3f} {1e3 * tc:12.3f} "
                      f"{tp / tc:8.1f}")
            else:
                print(f"{sector.dim:5d} {name:>12} {1e3 * tp:12.3f} {'n/a':>12} {'':>8}")


def bench_sweep(repeat):
    cells = [(nb, 60) for nb in range(1, 41)]

    def sweep(backend):
        for nb, N in cells:
            series = run(ModelParams(N_B=nb, N=N), InitialState(0, N), backend=backend)
            summarize(series)

    print(f"\nend-to-end: {len(cells)} charging runs (N=60, N_B=1..40, 4001 samples)")
    for b in kernels.BACKENDS:
        print(f"  {b:>7}: {best_of(lambda: sweep(b), repeat):.3f} s")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--samples", type=int, default=4001)
    args = ap.parse_args()
    print(f"active backend: {kernels.BACKEND}\n")
    bench_blocks(args.repeat, args.samples)
    bench_sweep(max(1, args.repeat // 2))


if __name__ == "__main__":
    main()
