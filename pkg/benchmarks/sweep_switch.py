"""Accuracy sweep of each Bessel regime against 50-digit mpmath.

Prints the worst scaled error per (regime, x-band) so the switch points in
``abspin.specfun`` can be checked. Error is scaled by
max(|J_nu|, |J_{nu+1}|) to stay meaningful near zeros.
"""

import math
import sys

import mpmath
import numpy as np

from abspin import _backend

mpmath.mp.dps = 50


def ref(nu, x):
    return float(mpmath.besselj(nu, x)), float(mpmath.besselj(nu + 1, x))


def by_series(nu, x):
    s, _ = _backend.kernels.series_sums(nu, x)
    g = 1.0 if nu + 1 > 0 else (1.0 if math.floor(nu + 1) % 2 == 0 else -1.0)
    return g * s * math.exp(nu * math.log(0.5 * x) - math.lgamma(nu + 1.0))


def by_miller(nu, x):
    n = math.floor(nu)
    return _backend.kernels.miller_pair(nu - n, int(n), x)[0]


def by_hankel(nu, x):
    ok, j, _ = _backend.kernels.hankel_pair(nu, x)
    return j if ok else float("nan")


def main(seed=0, n=400):
    rng = np.random.default_rng(seed)
    bands = [(0.01, 1), (1, 2), (2, 4), (4, 8), (8, 16), (16, 30), (30, 50)]
    for lo, hi in bands:
        worst = {"series": 0.0, "miller": 0.0, "hankel": 0.0}
        for _ in range(n):
            nu = float(rng.uniform(-10, 10))
            x = float(rng.uniform(lo, hi))
            j0, j1 = ref(nu, x)
            scale = max(abs(j0), abs(j1))
            for name, f in (("series", by_series), ("miller", by_miller), ("hankel", by_hankel)):
                v = f(nu, x)
                if math.isnan(v):
                    continue
                worst[name] = max(worst[name], abs(v - j0) / scale)
        print(f"x in [{lo:5.2f},{hi:5.2f}]  " + "  ".join(f"{k}={v:.2e}" for k, v in worst.items()))


if __name__ == "__main__":
    main(*(int(a) for a in sys.argv[1:]))
