"""Radial matching for a flux tube with all of its field on the surface.

Inside the tube (r < R) there is neither field nor enclosed flux, so the
radial solution of channel ``m`` is J_|m|(kr). Outside, the full flux
shifts the order to nu = |m + alpha| and the general solution is
``a J_nu(kr) + b J_-nu(kr)``. The spin coupling to the surface field is a
delta shell at r = R and produces the derivative jump

    u'(R+) - u'(R-) = (gamma / R) u(R),   gamma = -s * alpha.

Everything is expressed through the dimensionless x = kR; lengths are in
units of 1/k.
"""

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from abspin import specfun
from abspin.errors import (
    ConsistencyError,
    DegenerateOrderError,
    DomainError,
    MatchingSingularError,
    NonConvergenceError,
)

DEGENERACY_TOL = 1e-9
COND_MAX = 1e12
DEFAULT_KR = (1e-3, 1e-4, 1e-5, 1e-6)
# Residuals below this are treated as converged (phases are O(1) radians).
RESIDUAL_FLOOR = 1e-12
RICHARDSON_TOL = 1e-8
SURVIVAL_THRESHOLD = 0.5


class Prescription(enum.Enum):
    """Boundary condition imposed on the exterior solution as R -> 0."""

    REGULAR_ONLY = "regular"
    SINGULAR_ALLOWED = "singular"


@dataclass(frozen=True)
class FluxTube:
    alpha: float
    radius: float

    def __post_init__(self):
        if not math.isfinite(self.alpha):
            raise DomainError(f"alpha must be finite, got {self.alpha!r}")
        if not (math.isfinite(self.radius) and self.radius > 0.0):
            raise DomainError(f"radius must be positive, got {self.radius!r}")


@dataclass(frozen=True, order=True)
class Channel:
    m: int
    s: int

    def __post_init__(self):
        if self.s not in (1, -1):
            raise DomainError(f"spin sign must be +1 or -1, got {self.s!r}")
        if int(self.m) != self.m:
            raise DomainError(f"m must be an integer, got {self.m!r}")


@dataclass(frozen=True)
class MatchResult:
    """Exterior decomposition ``a J_nu + b J_-nu`` for interior J_|m|.

    ``log_ratio`` is ln|b/a|, kept separately because the coefficients
    themselves under- or overflow for large orders at small kR.
    """

    coeff_regular: float
    coeff_singular: float
    nu: float
    phase_shift: float
    s_matrix: complex
    log_ratio: float

    @property
    def singular_fraction(self):
        """|b| / sqrt(a^2 + b^2), computed from ``log_ratio``."""
        if self.log_ratio == -math.inf:
            return 0.0
        if self.log_ratio > 0:
            return 1.0 / math.sqrt(1.0 + math.exp(-2.0 * self.log_ratio))
        r = math.exp(self.log_ratio)
        return r / math.sqrt(1.0 + r * r)


@dataclass(frozen=True)
class LimitResult:
    """Outcome of the R -> 0 extrapolation of one channel.

    ``method`` is ``"richardson"`` when the polynomial extrapolation in
    t = (kR)**exponent converged, ``"power-law"`` when the approach is too
    slow for the radius schedule and the limit follows from the measured
    decay of the subdominant coefficient.
    """

    phase_shift: float
    singular_fraction: float
    exponent: float
    measured_exponent: float
    residuals: tuple
    samples: tuple
    method: str

    @property
    def singular_survives(self):
        return self.singular_fraction > SURVIVAL_THRESHOLD


def is_near_integer(v, tol=DEGENERACY_TOL):
    return abs(v - round(v)) < tol


def shell_jump_coefficient(tube, ch):
    """Dimensionless strength of the spin-field delta shell.

    Negative values are attractive.
    """
    return -ch.s * tube.alpha


def _phase_from_ratio(m, nu, log_ratio, sign_ratio):
    """Asymptotic phase of ``a J_nu + b J_-nu`` relative to J_|m|.

    J_{+-nu}(kr) ~ cos(kr -+ nu pi/2 - pi/4), so only b/a matters.
    """
    snp = math.sin(nu * math.pi)
    cnp = math.cos(nu * math.pi)
    if log_ratio <= 0.0:
        rho = sign_ratio * math.exp(log_ratio) if log_ratio > -745.0 else 0.0
        eps = math.atan2(-rho * snp, 1.0 + rho * cnp)
        return 0.5 * math.pi * (abs(m) - nu) - eps
    rho = sign_ratio * math.exp(-log_ratio) if log_ratio < 745.0 else 0.0
    eps = math.atan2(rho * snp, 1.0 + rho * cnp)
    return 0.5 * math.pi * (abs(m) + nu) - eps


def _check_alpha_channel(alpha, m):
    nu = abs(m + alpha)
    if is_near_integer(m + alpha):
        raise DegenerateOrderError(
            f"m + alpha = {m + alpha!r} is within {DEGENERACY_TOL} of an integer"
        )
    return nu


def match_at_shell(tube, ch, k=1.0):
    """Match interior and exterior solutions at r = R.

    The interior solution is normalized to J_|m|(kr). Raises
    :class:`DegenerateOrderError` when m + alpha is (nearly) an integer and
    :class:`MatchingSingularError` when the column-scaled 2x2 system has
    condition number above 1e12.
    """
    if not (math.isfinite(k) and k > 0.0):
        raise DomainError(f"k must be positive, got {k!r}")
    x = k * tube.radius
    if x >= 1.0:
        raise DomainError(f"kR = {x} must be < 1 for stable matching")
    m = ch.m
    if tube.alpha == 0.0:
        return MatchResult(1.0, 0.0, float(abs(m)), 0.0, 1.0 + 0.0j, -math.inf)
    nu = _check_alpha_channel(tube.alpha, m)

    gamma = shell_jump_coefficient(tube, ch)
    vi, _, lsi = specfun.bessel_j_scaled(abs(m), x)
    vp, _, lsp = specfun.bessel_j_scaled(nu, x)
    vm, _, lsm = specfun.bessel_j_scaled(-nu, x)
    # log-derivatives x J'/J = order + excess; order parts combined exactly
    ei = specfun.bessel_logderiv_excess(abs(m), x)
    ep = specfun.bessel_logderiv_excess(nu, x)
    em = specfun.bessel_logderiv_excess(-nu, x)
    lp = nu + ep
    lm = -nu + em

    # columns scaled by J_{+-nu}(x): [[1, 1], [lp, lm]] (at, bt) = (1, target)
    cond = np.linalg.cond(np.array([[1.0, 1.0], [lp, lm]]))
    if not cond <= COND_MAX:
        raise MatchingSingularError(f"matching condition number {cond:.3g} for {ch}")
    lead = abs(m) + gamma
    det = -2.0 * nu + (em - ep)
    at = (-(lead + nu) + (em - ei)) / det
    bt = ((lead - nu) + (ei - ep)) / det

    # a = at J_|m| / J_nu, b = bt J_|m| / J_-nu, kept in log form
    log_i = lsi + math.log(abs(vi))
    log_p = lsp + math.log(abs(vp))
    log_m = lsm + math.log(abs(vm))
    sgn_i = math.copysign(1.0, vi)
    if at == 0.0:
        log_a, sgn_a = -math.inf, 1.0
    else:
        log_a = math.log(abs(at)) + log_i - log_p
        sgn_a = math.copysign(1.0, at) * sgn_i * math.copysign(1.0, vp)
    if bt == 0.0:
        log_b, sgn_b = -math.inf, 1.0
    else:
        log_b = math.log(abs(bt)) + log_i - log_m
        sgn_b = math.copysign(1.0, bt) * sgn_i * math.copysign(1.0, vm)

    if log_b == -math.inf:
        log_ratio = -math.inf
    elif log_a == -math.inf:
        log_ratio = math.inf
    else:
        log_ratio = log_b - log_a
    delta = _phase_from_ratio(m, nu, log_ratio, sgn_a * sgn_b)
    return MatchResult(
        coeff_regular=_safe_exp(sgn_a, log_a),
        coeff_singular=_safe_exp(sgn_b, log_b),
        nu=nu,
        phase_shift=delta,
        s_matrix=complex(math.cos(2 * delta), math.sin(2 * delta)),
        log_ratio=log_ratio,
    )


def _safe_exp(sign, log_v):
    if log_v < -745.0:
        return 0.0
    if log_v > 709.0:
        return math.copysign(math.inf, sign)
    return sign * math.exp(log_v)


def regular_phase_shift(alpha, m):
    """R -> 0 phase shift with the singular solution excluded."""
    return 0.5 * math.pi * (abs(m) - abs(m + alpha))


def approach_exponent(alpha, ch):
    """Power p with (subdominant / dominant coefficient) ~ (kR)**p as kR -> 0.

    Follows from J_{+-nu}(x) ~ x**(+-nu) (1 + O(x^2)) and the interior
    log-derivative |m| + O(x^2): the exterior log-derivative must approach
    L0 = |m| + gamma. If L0 = -nu the leading singular term is unopposed.
    """
    nu = abs(ch.m + alpha)
    l0 = abs(ch.m) - ch.s * alpha
    if abs(l0 + nu) < 1e-12:
        return abs(2.0 - 2.0 * nu)
    if abs(l0 - nu) < 1e-12:
        return 2.0 * nu + 2.0
    return 2.0 * nu


def _log_slope(lr1, lr2, x1, x2):
    """d ln|b/a| / d ln(kR) between two radii."""
    if math.isinf(lr1) or math.isinf(lr2):
        if lr1 == lr2:
            return 0.0
        return math.inf if lr2 < lr1 else -math.inf
    return (lr2 - lr1) / (math.log(x2) - math.log(x1))


def tube_family(alpha, kr_values=DEFAULT_KR, k=1.0):
    """Flux tubes of fixed alpha with radii kR/k, largest first."""
    return [FluxTube(alpha, kr / k) for kr in kr_values]


def _neville_zero(ts, ys):
    """Diagonal of the Neville table evaluated at t = 0.

    Element j is the interpolating polynomial through points 0..j.
    """
    n = len(ts)
    p = list(ys)
    diag = [ys[0]]
    for level in range(1, n):
        for i in range(n - level):
            t_lo, t_hi = ts[i], ts[i + level]
            p[i] = (t_hi * p[i] - t_lo * p[i + 1]) / (t_hi - t_lo)
        diag.append(p[0])
    # p[0] after each level uses points 0..level
    return diag


def _validate_family(tubes, k):
    if len(tubes) < 4:
        raise DomainError("radius sequence needs at least 4 points")
    alpha = tubes[0].alpha
    if any(t.alpha != alpha for t in tubes):
        raise DomainError("all tubes in a family must share alpha")
    radii = [t.radius for t in tubes]
    if any(r2 >= r1 for r1, r2 in zip(radii, radii[1:])):
        raise DomainError("radius sequence must be strictly decreasing")
    if k * radii[-1] > 1e-6 * (1 + 1e-12):
        raise DomainError("smallest kR must be <= 1e-6")
    return alpha


def extrapolate_channel(tubes: Sequence[FluxTube], ch, k=1.0, prescription=Prescription.SINGULAR_ALLOWED):
    """R -> 0 limit of the phase shift and singular fraction of ``ch``.

    Richardson (Neville) extrapolation in t = (kR)**p, p from
    :func:`approach_exponent`. It is accepted when the residuals over the
    last three estimates decrease and the final one is below
    ``RICHARDSON_TOL``. Otherwise the measured power law of |b/a| over the
    two smallest radii must reproduce p within 10%, and the limit is the
    phase with the decaying component removed. Anything else raises
    :class:`NonConvergenceError`.
    """
    alpha = _validate_family(tubes, k)
    n = len(tubes)
    if alpha == 0.0:
        return LimitResult(0.0, 0.0, 0.0, 0.0, (0.0,) * (n - 1), (0.0,) * n, "trivial")
    if prescription is Prescription.REGULAR_ONLY:
        nu = _check_alpha_channel(alpha, ch.m)
        # regularity at the origin discards J_-nu exactly, at every radius
        d = regular_phase_shift(alpha, ch.m)
        return LimitResult(d, 0.0, 2.0 * nu, 2.0 * nu, (0.0,) * (n - 1), (d,) * n, "regular")

    results = [match_at_shell(t, ch, k) for t in tubes]
    phases = [r.phase_shift for r in results]
    ref = phases[-1]
    phases = [d - math.pi * round((d - ref) / math.pi) for d in phases]
    fracs = [r.singular_fraction for r in results]
    xs = [k * t.radius for t in tubes]

    p = approach_exponent(alpha, ch)
    slope = _log_slope(results[-2].log_ratio, results[-1].log_ratio, xs[-2], xs[-1])
    # d ln|b/a| / d ln(kR) > 0: singular part dies as kR -> 0
    survives = slope < 0.0

    ts = [x ** p for x in xs]
    if ts[0] < 1e-150:
        # subdominant part below double resolution at every radius
        residuals = tuple(abs(b - a) for a, b in zip(phases, phases[1:]))
        frac = 1.0 if survives else 0.0
        return LimitResult(phases[-1], frac, p, abs(slope), residuals, tuple(phases), "richardson")
    diag = _neville_zero(ts, phases)
    residuals = tuple(abs(b - a) for a, b in zip(diag, diag[1:]))
    last = residuals[-3:]
    decreasing = all(r <= RESIDUAL_FLOOR for r in last[1:]) or all(
        b <= a or b <= RESIDUAL_FLOOR for a, b in zip(last, last[1:])
    )
    if decreasing and last[-1] <= RICHARDSON_TOL:
        frac = min(1.0, max(0.0, _neville_zero(ts, fracs)[-1]))
        return LimitResult(diag[-1], frac, p, abs(slope), residuals, tuple(phases), "richardson")

    if math.isinf(slope) or abs(abs(slope) - p) > 0.1 * p:
        raise NonConvergenceError(
            f"residuals {last} do not decrease for {ch}, alpha={alpha}, "
            f"and measured exponent {abs(slope):.4g} disagrees with {p:.4g}"
        )
    nu = abs(ch.m + alpha)
    sign = 1.0 if survives else -1.0
    d = 0.5 * math.pi * (abs(ch.m) + sign * nu)
    d -= math.pi * round((d - ref) / math.pi)
    return LimitResult(d, 1.0 if survives else 0.0, p, abs(slope), residuals, tuple(phases), "power-law")


def limit_phase_shift(tubes, ch, k=1.0, prescription=Prescription.SINGULAR_ALLOWED):
    """Extrapolated R -> 0 phase shift of channel ``ch``."""
    return extrapolate_channel(tubes, ch, k, prescription).phase_shift


def singular_survives(alpha, ch, k=1.0, kr_values=DEFAULT_KR):
    """Whether the J_-nu component survives R -> 0 (SingularAllowed)."""
    if alpha == 0.0:
        return False
    return extrapolate_channel(tube_family(alpha, kr_values, k), ch, k).singular_survives


def critical_channel(alpha, s, k=1.0, kr_values=DEFAULT_KR) -> Optional[Channel]:
    """The partial wave that keeps its singular solution, if any, for spin ``s``.

    Candidates must be attractive (gamma < 0) and normalizable
    (|m + alpha| < 1); survival is then decided by the solver itself.
    """
    if alpha == 0.0 or is_near_integer(alpha):
        return None
    if -s * alpha >= 0.0:
        return None
    candidates = {-math.floor(alpha), -math.ceil(alpha)}
    found = []
    for m in sorted(candidates):
        if abs(m + alpha) >= 1.0 or is_near_integer(m + alpha):
            continue
        ch = Channel(m, s)
        if singular_survives(alpha, ch, k, kr_values):
            found.append(ch)
    if len(found) > 1:
        raise ConsistencyError(f"several critical channels for alpha={alpha}, s={s}: {found}")
    return found[0] if found else None
