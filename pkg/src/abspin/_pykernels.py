"""Pure-Python reference kernels.

Same call signatures as the compiled ``_ckernels`` module; selected at import
when the extension is missing or ``ABSPIN_PURE_PYTHON`` is set.
"""

import math

import numpy as np

NAME = "python"

# Miller recurrence: rescale threshold and seed
_BIG = 1e200
_SEED = 1e-30


def series_sums(nu, x):
    """Normalized ascending series of J_nu.

    Returns ``(S, T)`` with ``t = -x**2/4`` and

        S = sum_k t**k / (k! (nu+1)_k)
        T = sum_k 2k t**k / (k! (nu+1)_k)

    so that ``J_nu(x) = (x/2)**nu / Gamma(nu+1) * S`` and
    ``x J'_nu(x) = (x/2)**nu / Gamma(nu+1) * (nu*S + T)``.
    Neumaier-compensated accumulation.
    """
    t = -0.25 * x * x
    term = 1.0
    s = 1.0
    s_c = 0.0
    d = 0.0
    d_c = 0.0
    k = 0
    while True:
        k += 1
        term *= t / (k * (nu + k))
        dt = 2.0 * k * term
        # Neumaier update for S
        y = s + term
        if abs(s) >= abs(term):
            s_c += (s - y) + term
        else:
            s_c += (term - y) + s
        s = y
        # ... and for T
        y = d + dt
        if abs(d) >= abs(dt):
            d_c += (d - y) + dt
        else:
            d_c += (dt - y) + d
        d = y
        if k > 2 and abs(term) <= 1e-17 * abs(s) and abs(dt) <= 1e-17 * abs(d):
            break
        if k > 10000:
            break
    return s + s_c, d + d_c


def miller_pair(nu0, n, x):
    """``(J_{nu0+n}(x), J_{nu0+n+1}(x))`` by backward recurrence.

    ``0 <= nu0 < 1``; ``n`` may be negative, in which case the pair at
    ``nu0`` is continued downward (the growing direction for negative order).
    Normalized with  (x/2)**nu0 = sum_j (nu0+2j) Gamma(nu0+j)/j! J_{nu0+2j}(x).
    """
    top = max(n + 1, 1)
    start = int(max(top, x)) + 20 + int(4.0 * math.sqrt(max(top, x)))
    if start % 2:
        start += 1
    j_next = 0.0
    j_cur = _SEED
    norm = 0.0
    want_lo = 0.0
    want_hi = 0.0
    j0 = j1 = 0.0
    for kk in range(start, -1, -1):
        # j_cur holds J_{nu0+kk}, j_next holds J_{nu0+kk+1}
        if kk % 2 == 0:
            jj = kk // 2
            if jj == 0:
                w = math.gamma(nu0 + 1.0)
            else:
                w = (nu0 + 2 * jj) * math.exp(math.lgamma(nu0 + jj) - math.lgamma(jj + 1.0))
            norm += w * j_cur
        if kk == n:
            want_lo = j_cur
            want_hi = j_next
        if kk == 0:
            j0 = j_cur
            j1 = j_next
            break
        j_prev = (2.0 * (nu0 + kk) / x) * j_cur - j_next
        j_next = j_cur
        j_cur = j_prev
        if abs(j_cur) > _BIG:
            j_cur /= _BIG
            j_next /= _BIG
            norm /= _BIG
            want_lo /= _BIG
            want_hi /= _BIG
    scale = math.exp(nu0 * math.log(0.5 * x)) / norm
    if n >= 0:
        return want_lo * scale, want_hi * scale
    lo = j0 * scale
    hi = j1 * scale
    mu = nu0
    for _ in range(-n):
        lo, hi = (2.0 * mu / x) * lo - hi, lo
        mu -= 1.0
    return lo, hi


def _hankel_pq(nu, x):
    mu = 4.0 * nu * nu
    p = 1.0
    q = 0.0
    term = 1.0
    prev = math.inf
    k = 0
    while True:
        k += 1
        term *= (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        a = abs(term)
        if a > prev:
            return None
        if k % 2:
            q += term if (k // 2) % 2 == 0 else -term
        else:
            p += -term if (k // 2) % 2 else term
        if a < 1e-17:
            return p, q
        if term == 0.0:
            return p, q
        prev = a
        if k > 200:
            return None


def hankel_pair(nu, x):
    """``(ok, J_nu, J_{nu+1})`` from the large-argument Hankel expansion.

    ``ok`` is false when the asymptotic series stops decreasing before its
    terms reach 1e-17.
    """
    pq0 = _hankel_pq(nu, x)
    pq1 = _hankel_pq(nu + 1.0, x)
    if pq0 is None or pq1 is None:
        return False, 0.0, 0.0
    amp = math.sqrt(2.0 / (math.pi * x))
    out = []
    for order, (p, q) in ((nu, pq0), (nu + 1.0, pq1)):
        w = x - (0.5 * order + 0.25) * math.pi
        out.append(amp * (p * math.cos(w) - q * math.sin(w)))
    return True, out[0], out[1]


def partial_wave_sum(coeffs, m_min, phis):
    """``sum_j coeffs[j] * exp(i (m_min + j) phi)`` for every phi."""
    coeffs = np.asarray(coeffs, dtype=complex)
    phis = np.asarray(phis, dtype=float)
    ms = m_min + np.arange(coeffs.size)
    return np.exp(1j * np.multiply.outer(phis, ms)) @ coeffs
