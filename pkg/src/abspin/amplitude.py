"""Partial-wave resummation and the spin amplitude matrix.

Conventions (frozen by tests):

* incident plane wave along +x, ``phi`` is the scattering angle measured
  from the forward direction, in radians, wrapped to (-pi, pi];
* f_s(phi) = (2 pi i k)**-1/2 * sum_m (exp(2 i delta_{m,s}) - 1) exp(i m phi).

For |m| > m_max every phase shift equals its saturated value -/+ pi alpha / 2,
so the two tails are geometric series and are summed in closed form.
"""

import functools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from abspin import _backend
from abspin.errors import (
    ConsistencyError,
    DomainError,
    ForwardSingularityError,
    InsufficientCutoffError,
)
from abspin.filament import (
    DEFAULT_KR,
    Channel,
    Prescription,
    extrapolate_channel,
    regular_phase_shift,
    tube_family,
)

PHI_MIN = 1e-3
MIN_M_MAX = 50
TAIL_TOL = 1e-10


def resolve_threads(threads=None):
    """Worker count: explicit value, else ``ABSPIN_THREADS``, 0 meaning auto."""
    if threads is None:
        raw = os.environ.get("ABSPIN_THREADS", "0").strip() or "0"
        try:
            threads = int(raw)
        except ValueError:
            raise DomainError(f"ABSPIN_THREADS must be an integer, got {raw!r}") from None
    if threads < 0:
        raise DomainError(f"thread count must be >= 0, got {threads}")
    if threads == 0:
        threads = os.cpu_count() or 1
    return threads


def wrap_angle(phi):
    """Map an angle (scalar or array) to (-pi, pi]."""
    w = np.pi - np.mod(np.pi - np.asarray(phi, dtype=float), 2.0 * np.pi)
    # rounding in the mod can land exactly on -pi
    w = np.where(w <= -np.pi, w + 2.0 * np.pi, w)
    return float(w) if np.ndim(w) == 0 else w


def check_forward(phi, phi_min=PHI_MIN):
    w = np.abs(wrap_angle(phi))
    if np.any(w < phi_min):
        raise ForwardSingularityError(f"angle inside the forward cone |phi| < {phi_min}")


def is_integer_flux(alpha):
    return float(alpha) == math.floor(alpha)


@dataclass(frozen=True)
class PhaseShiftTable:
    """R -> 0 phase shifts for all |m| <= m_max and both spin signs.

    ``delta_plus[j]`` / ``delta_minus[j]`` belong to m = j - m_max.
    """

    alpha: float
    prescription: Prescription
    m_max: int
    k: float
    delta_plus: tuple
    delta_minus: tuple
    critical: Optional[Channel] = None
    survives: frozenset = field(default_factory=frozenset)

    @property
    def ms(self):
        return np.arange(-self.m_max, self.m_max + 1)

    def deltas(self, s):
        return np.array(self.delta_plus if s == 1 else self.delta_minus)

    def s_matrix(self, s):
        return np.exp(2j * self.deltas(s))

    @property
    def entries(self):
        out = {}
        for s in (1, -1):
            for m, d in zip(self.ms, self.deltas(s)):
                out[Channel(int(m), s)] = (float(d), complex(np.exp(2j * d)))
        return out


def build_phase_shift_table(alpha, prescription=Prescription.SINGULAR_ALLOWED, m_max=200, k=1.0,
                            kr_values=DEFAULT_KR, threads=None):
    """Solve every channel |m| <= m_max, both spins, in the R -> 0 limit.

    Channel solves are independent and run on a thread pool; the result
    does not depend on the worker count.
    """
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise DomainError("alpha must be finite")
    if int(m_max) != m_max or m_max < 1:
        raise DomainError(f"m_max must be a positive integer, got {m_max!r}")
    m_max = int(m_max)
    ms = range(-m_max, m_max + 1)
    if is_integer_flux(alpha):
        d = tuple(regular_phase_shift(alpha, m) for m in ms)
        return PhaseShiftTable(alpha, prescription, m_max, k, d, d)

    tubes = tube_family(alpha, kr_values, k)
    channels = [Channel(m, s) for s in (1, -1) for m in ms]

    def solve(ch):
        return extrapolate_channel(tubes, ch, k, prescription)

    workers = resolve_threads(threads)
    if workers == 1:
        results = [solve(ch) for ch in channels]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(solve, channels))
    n = len(ms)
    dp = tuple(r.phase_shift for r in results[:n])
    dm = tuple(r.phase_shift for r in results[n:])
    survivors = [ch for ch, r in zip(channels, results) if r.singular_survives]
    if len(survivors) > 1:
        raise ConsistencyError(f"several surviving singular channels: {survivors}")
    critical = survivors[0] if survivors else None
    return PhaseShiftTable(alpha, prescription, m_max, k, dp, dm, critical, frozenset(survivors))


@functools.lru_cache(maxsize=64)
def cached_table(alpha, prescription, m_max=200, k=1.0, kr_values=DEFAULT_KR):
    """Memoized :func:`build_phase_shift_table` (tables are immutable)."""
    return build_phase_shift_table(alpha, prescription, m_max, k, tuple(kr_values))


def _check_cutoff(table, s):
    m_max = table.m_max
    if m_max < MIN_M_MAX:
        raise InsufficientCutoffError(f"m_max = {m_max} < {MIN_M_MAX}")
    if m_max <= abs(table.alpha) + 1:
        raise InsufficientCutoffError(f"m_max = {m_max} does not exceed |alpha| + 1")
    smat = table.s_matrix(s)
    hi = np.exp(-1j * np.pi * table.alpha)
    lo = np.exp(1j * np.pi * table.alpha)
    err = max(abs(smat[-1] - hi), abs(smat[-2] - hi), abs(smat[0] - lo), abs(smat[1] - lo))
    if err > TAIL_TOL:
        raise InsufficientCutoffError(
            f"edge channels deviate from the saturated tail by {err:.2e} (> {TAIL_TOL})"
        )


def partial_wave_sum(table, s, phis):
    """sum_m (S_m - 1) e^{i m phi} over all m, tails in closed form."""
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    m_max = table.m_max
    coeffs = table.s_matrix(s) - 1.0
    head = np.asarray(_backend.kernels.partial_wave_sum(coeffs, -m_max, phis))
    e = np.exp(1j * phis)
    hi = np.exp(-1j * np.pi * table.alpha) - 1.0
    lo = np.exp(1j * np.pi * table.alpha) - 1.0
    tail_hi = hi * np.exp(1j * (m_max + 1) * phis) / (1.0 - e)
    tail_lo = lo * np.exp(-1j * (m_max + 1) * phis) / (1.0 - np.conj(e))
    return head + tail_hi + tail_lo


def amplitude_prefactor(k):
    """(2 pi i k)**-1/2 on the principal branch."""
    return np.exp(-0.25j * np.pi) / math.sqrt(2.0 * math.pi * k)


def scattering_amplitudes(table, s, phis, k=None, phi_min=PHI_MIN):
    """Vectorized f_s over an array of angles."""
    k = table.k if k is None else k
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    check_forward(phis, phi_min)
    if is_integer_flux(table.alpha):
        return np.zeros(phis.shape, dtype=complex)
    _check_cutoff(table, s)
    return amplitude_prefactor(k) * partial_wave_sum(table, s, phis)


def scattering_amplitude(table, s, phi, k=None):
    """f_s(phi) for one spin sign from a phase-shift table."""
    return complex(scattering_amplitudes(table, s, [phi], k)[0])


def ab_cross_section_closed_form(alpha, k, phi):
    """sin^2(pi alpha) / (2 pi k sin^2(phi/2)), phi from the forward direction."""
    check_forward(phi)
    phi = np.asarray(phi, dtype=float)
    if is_integer_flux(alpha):
        # sin(pi * alpha) is not exactly 0 in floating point
        out = np.zeros_like(phi)
        return float(out) if out.ndim == 0 else out
    out = np.sin(np.pi * alpha) ** 2 / (2.0 * np.pi * k * np.sin(0.5 * phi) ** 2)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SpinAmplitude:
    """F(phi) = diag(f_plus, f_minus) in the flux-axis spin basis."""

    f_plus: complex
    f_minus: complex
    phi: float
    k: float

    @property
    def matrix(self):
        return np.diag([self.f_plus, self.f_minus])


def spin_amplitudes(table, phis, k=None):
    """SpinAmplitude at every angle of ``phis``."""
    k = table.k if k is None else k
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    fp = scattering_amplitudes(table, 1, phis, k)
    fm = scattering_amplitudes(table, -1, phis, k)
    return [SpinAmplitude(complex(a), complex(b), float(p), k) for a, b, p in zip(fp, fm, phis)]


def spin_amplitude_matrix(alpha, k, phi, prescription=Prescription.SINGULAR_ALLOWED, m_max=200):
    table = cached_table(float(alpha), prescription, int(m_max), float(k))
    return spin_amplitudes(table, [phi], k)[0]


def unpolarized_cross_section(table, phis, k=None):
    """(|f_+|^2 + |f_-|^2) / 2."""
    fp = scattering_amplitudes(table, 1, phis, k)
    fm = scattering_amplitudes(table, -1, phis, k)
    return 0.5 * (np.abs(fp) ** 2 + np.abs(fm) ** 2)


def spin_dependence_metric(amplitudes, min_points=32):
    """max over the grid of |f+ - f-| / (|f+| + |f-| + 1e-300)."""
    amplitudes = list(amplitudes)
    if not amplitudes:
        raise DomainError("empty angle grid")
    if len(amplitudes) < min_points:
        raise DomainError(f"need at least {min_points} angles, got {len(amplitudes)}")
    for a in amplitudes:
        check_forward(a.phi)
    return max(
        abs(a.f_plus - a.f_minus) / (abs(a.f_plus) + abs(a.f_minus) + 1e-300) for a in amplitudes
    )
