# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same signatures and algorithms as ``_pykernels``."""

from libc.math cimport cos, sin, sqrt, exp, log, lgamma, tgamma, fabs, M_PI, INFINITY

import numpy as np

NAME = "cython"

cdef double _BIG = 1e200
cdef double _SEED = 1e-30


cdef void _series(double nu, double x, double* s_out, double* d_out) noexcept nogil:
    cdef double t = -0.25 * x * x
    cdef double term = 1.0, s = 1.0, s_c = 0.0, d = 0.0, d_c = 0.0, y, dt
    cdef long k = 0
    while True:
        k += 1
        term *= t / (k * (nu + k))
        dt = 2.0 * k * term
        y = s + term
        if fabs(s) >= fabs(term):
            s_c += (s - y) + term
        else:
            s_c += (term - y) + s
        s = y
        y = d + dt
        if fabs(d) >= fabs(dt):
            d_c += (d - y) + dt
        else:
            d_c += (dt - y) + d
        d = y
        if k > 2 and fabs(term) <= 1e-17 * fabs(s) and fabs(dt) <= 1e-17 * fabs(d):
            break
        if k > 10000:
            break
    s_out[0] = s + s_c
    d_out[0] = d + d_c


def series_sums(double nu, double x):
    cdef double s, d
    with nogil:
        _series(nu, x, &s, &d)
    return s, d


cdef void _miller(double nu0, long n, double x, double* lo_out, double* hi_out) noexcept nogil:
    cdef long top = n + 1 if n + 1 > 1 else 1
    cdef double big = top if top > x else x
    cdef long start = <long>big + 20 + <long>(4.0 * sqrt(big))
    cdef long kk, jj, i
    cdef double j_next = 0.0, j_cur = _SEED, j_prev, norm = 0.0
    cdef double want_lo = 0.0, want_hi = 0.0, j0 = 0.0, j1 = 0.0, w, scale, mu, lo, hi, tmp
    if start % 2:
        start += 1
    kk = start
    while kk >= 0:
        if kk % 2 == 0:
            jj = kk // 2
            if jj == 0:
                w = tgamma(nu0 + 1.0)
            else:
                w = (nu0 + 2 * jj) * exp(lgamma(nu0 + jj) - lgamma(jj + 1.0))
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
        if fabs(j_cur) > _BIG:
            j_cur /= _BIG
            j_next /= _BIG
            norm /= _BIG
            want_lo /= _BIG
            want_hi /= _BIG
        kk -= 1
    scale = exp(nu0 * log(0.5 * x)) / norm
    if n >= 0:
        lo_out[0] = want_lo * scale
        hi_out[0] = want_hi * scale
        return
    lo = j0 * scale
    hi = j1 * scale
    mu = nu0
    for i in range(-n):
        tmp = (2.0 * mu / x) * lo - hi
        hi = lo
        lo = tmp
        mu -= 1.0
    lo_out[0] = lo
    hi_out[0] = hi


def miller_pair(double nu0, long n, double x):
    cdef double lo, hi
    with nogil:
        _miller(nu0, n, x, &lo, &hi)
    return lo, hi


cdef int _hankel_pq(double nu, double x, double* p_out, double* q_out) noexcept nogil:
    cdef double mu = 4.0 * nu * nu
    cdef double p = 1.0, q = 0.0, term = 1.0, prev = INFINITY, a
    cdef long k = 0
    while True:
        k += 1
        term *= (mu - (2 * k - 1) * (2 * k - 1)) / (k * 8.0 * x)
        a = fabs(term)
        if a > prev:
            return 0
        if k % 2:
            if (k // 2) % 2 == 0:
                q += term
            else:
                q -= term
        else:
            if (k // 2) % 2:
                p -= term
            else:
                p += term
        if a < 1e-17 or term == 0.0:
            p_out[0] = p
            q_out[0] = q
            return 1
        prev = a
        if k > 200:
            return 0


def hankel_pair(double nu, double x):
    cdef double p0, q0, p1, q1, amp, w0, w1
    cdef int ok0, ok1
    with nogil:
        ok0 = _hankel_pq(nu, x, &p0, &q0)
        ok1 = _hankel_pq(nu + 1.0, x, &p1, &q1)
    if not (ok0 and ok1):
        return False, 0.0, 0.0
    amp = sqrt(2.0 / (M_PI * x))
    w0 = x - (0.5 * nu + 0.25) * M_PI
    w1 = x - (0.5 * (nu + 1.0) + 0.25) * M_PI
    return True, amp * (p0 * cos(w0) - q0 * sin(w0)), amp * (p1 * cos(w1) - q1 * sin(w1))


def partial_wave_sum(coeffs, long m_min, phis):
    cdef double complex[::1] c = np.ascontiguousarray(coeffs, dtype=complex)
    cdef double[::1] ph = np.ascontiguousarray(np.atleast_1d(phis), dtype=float)
    out_arr = np.empty(ph.shape[0], dtype=complex)
    cdef double complex[::1] out = out_arr
    cdef Py_ssize_t i, j, nm = c.shape[0], nphi = ph.shape[0]
    cdef double re, im, arg, cr, sr
    with nogil:
        for i in range(nphi):
            re = 0.0
            im = 0.0
            for j in range(nm):
                arg = (m_min + j) * ph[i]
                cr = cos(arg)
                sr = sin(arg)
                re += c[j].real * cr - c[j].imag * sr
                im += c[j].real * sr + c[j].imag * cr
            out[i] = re + 1j * im
    return out_arr
