"""Spin-1/2 Aharonov-Bohm scattering from a finite-radius magnetized filament.

Submodules
----------
specfun
    Bessel functions J_nu of real order.
filament
    Shell matching and R -> 0 phase shifts per partial wave.
amplitude
    Partial-wave resummation and the 2x2 spin amplitude.
polarimetry
    Polarized cross section and its density-matrix oracle.
cli
    Command-line front end.
"""

from abspin._backend import kernels as _kernels
from abspin.amplitude import (
    PhaseShiftTable,
    SpinAmplitude,
    ab_cross_section_closed_form,
    build_phase_shift_table,
    scattering_amplitude,
    spin_amplitude_matrix,
    spin_dependence_metric,
    unpolarized_cross_section,
)
from abspin.errors import AbspinError
from abspin.filament import (
    Channel,
    FluxTube,
    MatchResult,
    Prescription,
    critical_channel,
    limit_phase_shift,
    match_at_shell,
    shell_jump_coefficient,
)
from abspin.polarimetry import (
    PolarizationSetup,
    bracket,
    corotated_detector,
    cross_section_oracle,
    cross_section_polarized,
    scattered_polarization,
)
from abspin.specfun import bessel_j, bessel_j_deriv

__version__ = "0.1.0"
BACKEND = _kernels.NAME

__all__ = [
    "AbspinError",
    "BACKEND",
    "Channel",
    "FluxTube",
    "MatchResult",
    "PhaseShiftTable",
    "PolarizationSetup",
    "Prescription",
    "SpinAmplitude",
    "ab_cross_section_closed_form",
    "bessel_j",
    "bessel_j_deriv",
    "bracket",
    "build_phase_shift_table",
    "corotated_detector",
    "critical_channel",
    "cross_section_oracle",
    "cross_section_polarized",
    "limit_phase_shift",
    "match_at_shell",
    "scattered_polarization",
    "scattering_amplitude",
    "shell_jump_coefficient",
    "spin_amplitude_matrix",
    "spin_dependence_metric",
    "unpolarized_cross_section",
]
