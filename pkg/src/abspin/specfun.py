"""Bessel functions of the first kind for real order on x > 0.

Three regimes, all implemented in :mod:`abspin._pykernels` / ``_ckernels``:

* ascending power series (compensated), for ``x**2/4 <= SERIES_RATIO * (|nu| + 1)``
  or ``x <= SERIES_XMIN``;
* Hankel asymptotic expansion, for ``x >= HANKEL_XMIN`` when the expansion
  reaches 1e-17 before diverging;
* Miller backward recurrence with the Neumann-sum normalization otherwise.

The switch points come from a sweep against 50-digit mpmath values
(``benchmarks/sweep_switch.py``): with these settings the worst relative
error over 0 < x <= 50, |nu| <= 10 (away from zeros of J) is below 1e-13.
"""

import math

from abspin import _backend
from abspin.errors import DomainError

MAX_ORDER = 500.0
SERIES_XMIN = 2.0
SERIES_RATIO = 0.5
HANKEL_XMIN = 30.0


def _validate(nu, x):
    if not (math.isfinite(nu) and math.isfinite(x)):
        raise DomainError(f"non-finite argument nu={nu!r}, x={x!r}")
    if x <= 0.0:
        raise DomainError(f"bessel_j needs x > 0, got {x!r}")
    if abs(nu) > MAX_ORDER:
        raise DomainError(f"|nu| = {abs(nu)} exceeds {MAX_ORDER}")


def _gamma_sign(y):
    if y > 0.0:
        return 1.0
    return 1.0 if math.floor(y) % 2 == 0 else -1.0


def regime(nu, x):
    """Name of the evaluation regime used for ``(nu, x)``."""
    if x <= SERIES_XMIN or 0.25 * x * x <= SERIES_RATIO * (abs(nu) + 1.0):
        return "series"
    if x >= HANKEL_XMIN:
        return "hankel"
    return "miller"


def _pair(nu, x):
    """``(J_nu, J_{nu+1})`` outside the series regime."""
    k = _backend.kernels
    if x >= HANKEL_XMIN:
        ok, j0, j1 = k.hankel_pair(nu, x)
        if ok:
            return j0, j1
    n = math.floor(nu)
    return k.miller_pair(nu - n, int(n), x)


def bessel_j_scaled(nu, x):
    """Scale-free evaluation.

    Returns ``(value, xderiv, log_scale)`` with
    ``J_nu(x) = value * exp(log_scale)`` and
    ``x * J'_nu(x) = xderiv * exp(log_scale)``. Never overflows for
    ``|nu| <= 500``, which is what the shell matching relies on.
    """
    nu = float(nu)
    x = float(x)
    _validate(nu, x)
    sign = 1.0
    if nu < 0.0 and nu == math.floor(nu):
        # J_{-n} = (-1)^n J_n
        n = int(-nu)
        sign = -1.0 if n % 2 else 1.0
        nu = float(n)
    if regime(nu, x) == "series":
        s, t = _backend.kernels.series_sums(nu, x)
        g = _gamma_sign(nu + 1.0) * sign
        log_scale = nu * math.log(0.5 * x) - math.lgamma(nu + 1.0)
        return g * s, g * (nu * s + t), log_scale
    j0, j1 = _pair(nu, x)
    return sign * j0, sign * (nu * j0 - x * j1), 0.0


def _finite_exp(mant, log_scale, what):
    if mant == 0.0:
        return 0.0
    la = log_scale + math.log(abs(mant))
    if la > 709.0:
        raise DomainError(f"{what} overflows double precision (log|value| = {la:.1f})")
    return math.copysign(math.exp(la), mant)


def bessel_j(nu, x):
    """J_nu(x) for real order ``nu`` and ``x > 0``.

    Negative non-integer orders are evaluated directly (series or downward
    recurrence), negative integer orders through J_{-n} = (-1)^n J_n.
    """
    v, _, ls = bessel_j_scaled(nu, x)
    return _finite_exp(v, ls, "J")


def bessel_j_deriv(nu, x):
    """dJ_nu/dx, same accuracy contract as :func:`bessel_j`."""
    _, d, ls = bessel_j_scaled(nu, x)
    return _finite_exp(d, ls - math.log(x), "J'")


def bessel_j_and_deriv(nu, x):
    v, d, ls = bessel_j_scaled(nu, x)
    return _finite_exp(v, ls, "J"), _finite_exp(d, ls - math.log(x), "J'")


def bessel_logderiv(nu, x):
    """x J'_nu(x) / J_nu(x)."""
    v, d, _ = bessel_j_scaled(nu, x)
    return d / v


def bessel_logderiv_excess(nu, x):
    """x J'_nu(x) / J_nu(x) - nu, without the cancellation of forming it.

    O(x^2) at small x; the shell matching subtracts the order parts exactly
    and needs this remainder to full relative precision.
    """
    nu = float(nu)
    x = float(x)
    _validate(nu, x)
    if nu < 0.0 and nu == math.floor(nu):
        # J_{-n} = (-1)^n J_n, so x J'/J is that of order n
        return bessel_logderiv_excess(-nu, x) - 2.0 * nu
    if regime(nu, x) == "series":
        s, t = _backend.kernels.series_sums(nu, x)
        return t / s
    v, d, _ = bessel_j_scaled(nu, x)
    return d / v - nu


def bessel_log_abs(nu, x):
    """log |J_nu(x)|."""
    v, _, ls = bessel_j_scaled(nu, x)
    return ls + math.log(abs(v))
