import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abspin import specfun
from abspin.errors import DomainError
from abspin.specfun import bessel_j, bessel_j_and_deriv, bessel_j_deriv, bessel_logderiv_excess

mpmath.mp.dps = 40


def series_oracle(nu, x, dps=60):
    """Direct power series in extended precision."""
    with mpmath.workdps(dps):
        nu = mpmath.mpf(nu)
        t = -(mpmath.mpf(x) / 2) ** 2
        total = mpmath.mpf(0)
        term = 1 / mpmath.gamma(nu + 1)
        k = 0
        while True:
            total += term
            k += 1
            term *= t / (k * (nu + k))
            if abs(term) < mpmath.mpf(10) ** (-dps + 5) * abs(total):
                break
        return float((mpmath.mpf(x) / 2) ** nu * total)


def scale(nu, x):
    return max(abs(float(mpmath.besselj(nu, x))), abs(float(mpmath.besselj(nu + 1, x))))


nu_small = st.floats(-10, 10, allow_nan=False)
x_range = st.floats(1e-3, 50.0, allow_nan=False)


def away_from_integer(nu, gap=1e-2):
    return abs(nu - round(nu)) > gap


# --- examples ----------------------------------------------------------------


def test_j0_at_tiny_argument(backend):
    assert abs(bessel_j(0, 1e-12) - 1.0) < 1e-10


def test_half_order_closed_form(backend):
    expected = math.sqrt(2 / (math.pi * 2.0)) * math.sin(2.0)
    assert bessel_j(0.5, 2.0) == pytest.approx(expected, rel=1e-13)
    assert expected == pytest.approx(0.5130161, abs=1e-7)


def test_negative_noninteger_order_matches_series(backend):
    assert bessel_j(-0.7, 0.5) == pytest.approx(series_oracle(-0.7, 0.5), rel=1e-13)


def test_j0_derivative_is_minus_j1(backend):
    for x0 in (0.3, 2.5, 11.0, 37.0):
        assert bessel_j_deriv(0, x0) == pytest.approx(-bessel_j(1, x0), rel=1e-12, abs=1e-15)


def test_j1_derivative_at_tiny_argument(backend):
    assert abs(bessel_j_deriv(1, 1e-12) - 0.5) < 1e-8


def test_derivative_finite_difference_example(backend):
    h = 1e-6
    fd = (bessel_j(0.3, 1.7 + h) - bessel_j(0.3, 1.7 - h)) / (2 * h)
    assert abs(bessel_j_deriv(0.3, 1.7) - fd) < 1e-6


@pytest.mark.parametrize("n", [1, 2, 3, 7])
def test_negative_integer_order_reflection(backend, n):
    for x in (0.2, 3.3, 18.0, 42.0):
        assert bessel_j(-n, x) == pytest.approx((-1) ** n * bessel_j(n, x), rel=1e-14)


@pytest.mark.parametrize(
    "nu, x",
    [(0, 0.0), (0, -1.0), (float("nan"), 1.0), (0.5, float("inf")), (0.5, float("nan")), (500.5, 1.0)],
)
def test_domain_errors(nu, x):
    with pytest.raises(DomainError):
        bessel_j(nu, x)
    with pytest.raises(DomainError):
        bessel_j_deriv(nu, x)


def test_overflow_is_reported_not_returned():
    with pytest.raises(DomainError):
        bessel_j(-499.5, 1e-3)


def test_regime_switch_points():
    assert specfun.regime(0.3, 1.0) == "series"
    assert specfun.regime(0.3, 10.0) == "miller"
    assert specfun.regime(0.3, 40.0) == "hankel"
    assert specfun.regime(40.0, 8.0) == "series"


def test_regime_handover_is_continuous(backend):
    # values just either side of each switch point agree with the oracle
    for nu in (-3.3, 0.25, 4.6):
        for x in (specfun.SERIES_XMIN, specfun.HANKEL_XMIN):
            for xx in (x * (1 - 1e-9), x * (1 + 1e-9)):
                ref = float(mpmath.besselj(nu, xx))
                assert abs(bessel_j(nu, xx) - ref) <= 1e-12 * scale(nu, xx)


# --- properties --------------------------------------------------------------


@settings(max_examples=300, deadline=None)
@given(nu=nu_small, x=x_range)
def test_matches_mpmath(nu, x):
    ref = float(mpmath.besselj(nu, x))
    assert abs(bessel_j(nu, x) - ref) <= 1e-10 * scale(nu, x)


@settings(max_examples=200, deadline=None)
@given(nu=nu_small, x=x_range)
def test_backends_agree(nu, x):
    from abspin import _backend

    if "cython" not in _backend.available():
        pytest.skip("compiled kernels not built")
    vals = []
    for name in ("python", "cython"):
        saved = _backend.kernels
        _backend.kernels = _backend.load(name)
        try:
            vals.append(bessel_j_and_deriv(nu, x))
        finally:
            _backend.kernels = saved
    (a, da), (b, db) = vals
    assert abs(a - b) <= 1e-12 * max(abs(a), abs(da), 1e-300)
    assert abs(da - db) <= 1e-12 * max(abs(a), abs(da), 1e-300)


@settings(max_examples=300, deadline=None)
@given(nu=st.floats(-5, 5), x=st.floats(0.1, 50.0))
def test_wronskian(nu, x):
    if not away_from_integer(nu):
        return
    j, dj = bessel_j_and_deriv(nu, x)
    jm, djm = bessel_j_and_deriv(-nu, x)
    rhs = -2.0 * math.sin(nu * math.pi) / (math.pi * x)
    assert abs(j * djm - dj * jm - rhs) <= 1e-10 * abs(rhs)


@settings(max_examples=300, deadline=None)
@given(nu=st.floats(-5, 5), x=st.floats(0.1, 50.0))
def test_three_term_recurrence(nu, x):
    a = bessel_j(nu - 1, x)
    b = bessel_j(nu + 1, x)
    c = 2 * nu / x * bessel_j(nu, x)
    assert abs(a + b - c) <= 1e-9 * max(abs(a), abs(b), abs(c))


@settings(max_examples=300, deadline=None)
@given(nu=st.floats(-5, 5), x=st.floats(0.1, 50.0))
def test_derivative_vs_finite_difference(nu, x):
    h = 1e-6
    fd = (bessel_j(nu, x + h) - bessel_j(nu, x - h)) / (2 * h)
    d = bessel_j_deriv(nu, x)
    # absolute for O(1) values; scaled where J itself is large
    assert abs(d - fd) <= 1e-6 * max(1.0, abs(bessel_j(nu, x)), abs(d))


@settings(max_examples=200, deadline=None)
@given(nu=st.floats(-10, 10), x=st.floats(1e-6, 20.0))
def test_logderiv_excess(nu, x):
    if nu < 0 and not away_from_integer(nu, 1e-6):
        return
    j, dj = bessel_j_and_deriv(nu, x)
    if abs(j) < 1e-3 * scale(nu, x):
        return  # near a zero the log derivative itself is ill-conditioned
    assert bessel_logderiv_excess(nu, x) == pytest.approx(x * dj / j - nu, rel=1e-8, abs=1e-12)


def test_logderiv_excess_small_argument_leading_term(backend):
    # x J'/J - nu = -x^2 / (2 (nu + 1)) + O(x^4)
    for nu in (0.3, -0.7, 2.5):
        x = 1e-5
        assert bessel_logderiv_excess(nu, x) == pytest.approx(-x * x / (2 * (nu + 1)), rel=1e-9)


def test_thread_safety():
    from concurrent.futures import ThreadPoolExecutor

    rng = np.random.default_rng(3)
    args = list(zip(rng.uniform(-5, 5, 400), rng.uniform(0.1, 50, 400)))
    serial = [bessel_j(v, x) for v, x in args]
    with ThreadPoolExecutor(8) as pool:
        parallel = list(pool.map(lambda a: bessel_j(*a), args))
    assert serial == parallel
