"""Polarized cross section: closed-form bracket and density-matrix oracle.

Two angle conventions meet here.

* ``phi`` in :func:`bracket`, :func:`corotated_detector` and
  :func:`cross_section_polarized` is the azimuth of the outgoing direction
  (cos phi, sin phi, 0) for a beam incident from the right, i.e. moving
  along -x. Forward scattering is phi = pi.
* The solver (:mod:`abspin.amplitude`) uses the scattering angle theta
  measured from the forward direction of a beam moving along +x.

Rotating the lab by pi about z maps one onto the other up to the sense of
rotation, theta = PHI_SIGN * wrap(phi - pi). ``PHI_SIGN`` is the one
calibrated constant (see :func:`calibrate_phi_sign`). It does not depend on
the sign of the flux: the spin follows the momentum either way.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from abspin.amplitude import (
    PHI_MIN,
    SpinAmplitude,
    ab_cross_section_closed_form,
    cached_table,
    check_forward,
    spin_amplitudes,
    wrap_angle,
)
from abspin.errors import NonFiniteAmplitudeError, NonUnitVectorError, ZeroIntensityError
from abspin.filament import Prescription

UNIT_TOL = 1e-12
Z_HAT = np.array([0.0, 0.0, 1.0])
PHI_SIGN = -1

SIGMA = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
IDENTITY = np.eye(2, dtype=complex)


def as_unit_vector(v, name="vector"):
    v = np.asarray(v, dtype=float).reshape(3)
    if not np.all(np.isfinite(v)) or abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
        raise NonUnitVectorError(f"{name} = {v.tolist()} is not a unit vector")
    return v


@dataclass(frozen=True)
class PolarizationSetup:
    """Incident polarization ``n`` and detector acceptance ``n_prime``."""

    n: tuple
    n_prime: tuple
    z_hat: tuple = field(default=(0.0, 0.0, 1.0))

    def __post_init__(self):
        object.__setattr__(self, "n", tuple(as_unit_vector(self.n, "n")))
        object.__setattr__(self, "n_prime", tuple(as_unit_vector(self.n_prime, "n_prime")))
        z = as_unit_vector(self.z_hat, "z_hat")
        if not np.allclose(z, Z_HAT, rtol=0, atol=UNIT_TOL):
            raise NonUnitVectorError("the flux axis is fixed to (0, 0, 1)")
        object.__setattr__(self, "z_hat", tuple(z))


@dataclass(frozen=True)
class CrossSectionCurve:
    angles: np.ndarray
    values: np.ndarray
    alpha: float
    k: float
    prescription: Prescription
    setup: PolarizationSetup

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if a.shape != v.shape:
            raise ValueError("angles and values differ in shape")
        if np.any(np.diff(a) <= 0):
            raise ValueError("angles must be strictly increasing")
        if np.any(v < 0):
            raise ValueError("cross sections are nonnegative")


def bracket(setup, phi):
    """Polarization factor of the cross section, Cartesian form.

    1/2 [1 + (n.z)(n'.z) - (n x z).(n' x z) cos phi - z.(n x n') sin phi]
    """
    n = np.asarray(setup.n)
    npr = np.asarray(setup.n_prime)
    z = Z_HAT
    return 0.5 * (
        1.0
        + np.dot(n, z) * np.dot(npr, z)
        - np.dot(np.cross(n, z), np.cross(npr, z)) * np.cos(phi)
        - np.dot(z, np.cross(n, npr)) * np.sin(phi)
    )


def _polar(v):
    return math.acos(max(-1.0, min(1.0, v[2]))), math.atan2(v[1], v[0])


def bracket_spherical(setup, phi):
    """Same factor from polar angles: 1/2 [1 + c c' - s s' cos(psi' - psi - phi)]."""
    th, ps = _polar(setup.n)
    th2, ps2 = _polar(setup.n_prime)
    return 0.5 * (
        1.0
        + math.cos(th) * math.cos(th2)
        - math.sin(th) * math.sin(th2) * np.cos(ps2 - ps - phi)
    )


def scattering_angle(phi):
    """Deflection from the forward direction for the incident-from-right angle."""
    return wrap_angle(np.asarray(phi, dtype=float) - np.pi)


def solver_angle(phi, sign=PHI_SIGN):
    """Solver scattering angle theta corresponding to ``phi``."""
    return sign * scattering_angle(phi)


def cross_section_polarized(setup, phi, alpha, k):
    """Unpolarized AB cross section times :func:`bracket`.

    The AB factor is evaluated at the deflection angle of the same geometry,
    so the forward singularity sits at phi = pi.
    """
    theta = scattering_angle(phi)
    return ab_cross_section_closed_form(alpha, k, theta) * bracket(setup, phi)


def corotated_detector(n, phi):
    """Rotate ``n`` about z by phi + pi (incident along -x, outgoing along phi)."""
    n = as_unit_vector(n, "n")
    a = phi + math.pi
    c, s = math.cos(a), math.sin(a)
    return np.array([c * n[0] - s * n[1], s * n[0] + c * n[1], n[2]])


def density_matrix(n):
    """rho = (I + n.sigma) / 2."""
    n = np.asarray(n, dtype=float)
    return 0.5 * (IDENTITY + np.einsum("i,ijk->jk", n, SIGMA))


def _check_amplitude(F):
    if not (np.isfinite(F.f_plus) and np.isfinite(F.f_minus)):
        raise NonFiniteAmplitudeError(f"non-finite amplitude {F}")
    return np.diag([F.f_plus, F.f_minus])


def cross_section_oracle(setup, phi, F):
    """Tr[Pi(n') F rho(n) F^dagger] for the amplitude ``F`` at this angle.

    ``phi`` only labels the point; ``F`` carries the angle dependence and
    must already be evaluated at :func:`solver_angle` of ``phi``.
    """
    M = _check_amplitude(F)
    out = M @ density_matrix(setup.n) @ M.conj().T
    return float(np.real(np.trace(density_matrix(setup.n_prime) @ out)))


def scattered_intensity(n, F):
    """Tr[F rho(n) F^dagger] (detector blind to spin)."""
    M = _check_amplitude(F)
    return float(np.real(np.trace(M @ density_matrix(n) @ M.conj().T)))


def scattered_polarization(n, phi, F):
    """Bloch vector of the scattered beam for incident polarization ``n``."""
    n = as_unit_vector(n, "n")
    M = _check_amplitude(F)
    out = M @ density_matrix(n) @ M.conj().T
    norm = float(np.real(np.trace(out)))
    if not norm > 0.0:
        raise ZeroIntensityError(f"no scattered intensity at phi={phi}")
    return np.array([float(np.real(np.trace(s @ out))) for s in SIGMA]) / norm


def oracle_amplitudes(alpha, k, phis, prescription=Prescription.SINGULAR_ALLOWED, m_max=200, sign=PHI_SIGN):
    """SpinAmplitude at the solver angle of every incident-from-right angle."""
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    table = cached_table(float(alpha), prescription, int(m_max), float(k))
    return spin_amplitudes(table, solver_angle(phis, sign), k)


def calibrate_phi_sign(alpha=0.3, k=1.0, m_max=200, n_setups=8, seed=7):
    """Find the sense of rotation that makes the oracle reproduce the bracket.

    Returns +1 or -1, or 0 if neither works to relative 1e-6.
    """
    rng = np.random.default_rng(seed)
    phis = np.linspace(-np.pi + 0.1, np.pi - 0.1, 16)
    setups = [PolarizationSetup(random_unit(rng), random_unit(rng)) for _ in range(n_setups)]
    for sign in (1, -1):
        amps = oracle_amplitudes(alpha, k, phis, m_max=m_max, sign=sign)
        ok = True
        for setup in setups:
            for phi, F in zip(phis, amps):
                e = cross_section_polarized(setup, phi, alpha, k)
                o = cross_section_oracle(setup, phi, F)
                if abs(o - e) > 1e-6 * abs(e):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return sign
    return 0


def random_unit(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def polarized_curve(setup, phis, alpha, k, prescription=Prescription.SINGULAR_ALLOWED):
    phis = np.asarray(phis, dtype=float)
    check_forward(scattering_angle(phis), PHI_MIN)
    values = np.array([cross_section_polarized(setup, p, alpha, k) for p in phis])
    return CrossSectionCurve(phis, values, alpha, k, prescription, setup)


__all__ = [
    "PHI_SIGN",
    "CrossSectionCurve",
    "PolarizationSetup",
    "SpinAmplitude",
    "bracket",
    "bracket_spherical",
    "calibrate_phi_sign",
    "corotated_detector",
    "cross_section_oracle",
    "cross_section_polarized",
    "density_matrix",
    "oracle_amplitudes",
    "scattered_intensity",
    "scattered_polarization",
    "scattering_angle",
    "solver_angle",
]
