"""Compiled vs pure-Python kernels.

Times each kernel on a fixed random workload under both backends, checks
that they agree, and times a full phase-shift table build. Usage::

    python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import math
import time

import numpy as np

from abspin import _backend
from abspin.amplitude import build_phase_shift_table
from abspin.filament import Prescription


def workloads(seed=0):
    rng = np.random.default_rng(seed)
    nus = rng.uniform(-10, 10, 2000)
    small_x = rng.uniform(0.01, 2.0, 2000)
    mid_x = rng.uniform(4.0, 30.0, 500)
    big_x = rng.uniform(30.0, 50.0, 2000)
    coeffs = rng.normal(size=801) + 1j * rng.normal(size=801)
    phis = np.linspace(0.1, math.pi, 256)
    return {
        "series_sums": lambda k: [k.series_sums(v, x) for v, x in zip(nus, small_x)],
        "miller_pair": lambda k: [
            k.miller_pair(v - math.floor(v), int(math.floor(v)), x) for v, x in zip(nus, mid_x)
        ],
        "hankel_pair": lambda k: [k.hankel_pair(v, x) for v, x in zip(nus, big_x)],
        "partial_wave_sum": lambda k: [k.partial_wave_sum(coeffs, -400, phis)],
    }


def best_of(fn, repeat):
    best = math.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def flatten(result):
    vals = []
    for item in result:
        vals.extend(np.ravel(np.asarray(item, dtype=complex)))
    return np.array(vals)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--alpha", type=float, default=0.3)
    ap.add_argument("--m-max", type=int, default=400)
    args = ap.parse_args()

    names = _backend.available()
    if "cython" not in names:
        print("compiled kernels not built; only the pure-Python backend is available")
    backends = {name: _backend.load(name) for name in names}

    print(f"{'kernel':<18}" + "".join(f"{n:>12}" for n in backends) + f"{'speedup':>10}{'max diff':>12}")
    for label, job in workloads().items():
        times = {}
        outs = {}
        for name, k in backends.items():
            times[name], res = best_of(lambda: job(k), args.repeat)
            outs[name] = flatten(res)
        row = f"{label:<18}" + "".join(f"{times[n]:>11.4f}s" for n in backends)
        if len(backends) == 2:
            a, b = outs["python"], outs["cython"]
            scale = np.maximum(np.abs(a), 1e-300)
            diff = np.max(np.abs(a - b) / np.maximum(scale, np.max(np.abs(a)) * 1e-12))
            row += f"{times['python'] / times['cython']:>9.1f}x{diff:>12.1e}"
        print(row)

    saved = _backend.kernels
    try:
        tables = {}
        line = f"{'table build':<18}"
        for name, k in backends.items():
            _backend.kernels = k
            t, tables[name] = best_of(
                lambda: build_phase_shift_table(
                    args.alpha, Prescription.SINGULAR_ALLOWED, args.m_max, threads=1
                ),
                1,
            )
            line += f"{t:>11.4f}s"
        if len(backends) == 2:
            d = np.max(np.abs(tables["python"].deltas(1) - tables["cython"].deltas(1)))
            line += f"{'':>10}{d:>12.1e}"
        print(line)
    finally:
        _backend.kernels = saved


if __name__ == "__main__":
    main()
