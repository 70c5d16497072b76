"""Command-line front end.

Subcommands ``phase-shifts`` and ``cross-section`` write tables (CSV or a JSON
array of records); ``limits-report`` and ``compare-prescriptions`` write a
JSON report to ``--out`` and a short text summary to stderr.

Angle grid flags give the deflection angle from the forward direction, in
radians. Exit status: 0 success/PASS, 1 invalid input, 2 report FAIL.
"""

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from typing import Optional

import numpy as np

from abspin.amplitude import (
    PHI_MIN,
    ab_cross_section_closed_form,
    build_phase_shift_table,
    is_integer_flux,
    resolve_threads,
    spin_amplitudes,
    spin_dependence_metric,
    wrap_angle,
)
from abspin.errors import AbspinError, ConfigError
from abspin.filament import DEFAULT_KR, Channel, FluxTube, Prescription, shell_jump_coefficient
from abspin.polarimetry import (
    PHI_SIGN,
    PolarizationSetup,
    bracket,
    calibrate_phi_sign,
    corotated_detector,
    cross_section_oracle,
    cross_section_polarized,
    random_unit,
    scattered_polarization,
    solver_angle,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SIG_DIGITS = 12
LIMIT_A_TOL = 1e-14
LIMIT_B_TOL = 1e-12
REGULAR_METRIC_MAX = 1e-10
SINGULAR_METRIC_MIN = 0.1
EXIT_OK, EXIT_INVALID, EXIT_FAIL = 0, 1, 2

TABLE_COMMANDS = ("phase-shifts", "cross-section")
REPORT_COMMANDS = ("limits-report", "compare-prescriptions")


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Validated settings of one run; see :func:`resolve_config`."""

    alpha: float = 0.3
    k: float = 1.0
    m_max: int = 200
    radius_schedule: tuple = DEFAULT_KR
    phi_count: int = 64
    phi_min: float = math.pi / 6
    phi_max: float = math.pi
    prescription: Prescription = Prescription.SINGULAR_ALLOWED
    n: Optional[tuple] = None
    nprime: Optional[tuple] = None
    output_format: Optional[str] = None
    out: str = "-"
    seed: int = 2024
    samples: int = 1000

    def __post_init__(self):
        for name in ("alpha", "k", "phi_min", "phi_max"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.k <= 0:
            raise ConfigError(f"k must be positive, got {self.k}")
        if self.m_max < 1:
            raise ConfigError(f"m_max must be a positive integer, got {self.m_max}")
        kr = self.radius_schedule
        if len(kr) < 4 or any(not (math.isfinite(v) and 0 < v < 1) for v in kr):
            raise ConfigError("radius_schedule needs at least 4 values of kR in (0, 1)")
        if any(b >= a for a, b in zip(kr, kr[1:])):
            raise ConfigError("radius_schedule must be strictly decreasing")
        if kr[-1] > 1e-6:
            raise ConfigError("radius_schedule must reach kR <= 1e-6")
        if self.phi_count < 1:
            raise ConfigError("phi_count must be >= 1")
        if self.output_format not in (None, "csv", "json"):
            raise ConfigError(f"unknown format {self.output_format!r}")
        if self.samples < 1:
            raise ConfigError("samples must be >= 1")
        self.phi_grid()
        self.setup()

    def phi_grid(self):
        """Deflection angles, strictly increasing, outside the forward cone."""
        if self.phi_count == 1:
            if self.phi_min != self.phi_max:
                raise ConfigError("a one-point grid needs phi_min == phi_max")
            grid = np.array([self.phi_min])
        else:
            if not self.phi_min < self.phi_max:
                raise ConfigError("phi_min must be below phi_max")
            grid = np.linspace(self.phi_min, self.phi_max, self.phi_count)
        if grid[0] <= -math.pi or grid[-1] > math.pi:
            raise ConfigError(
                "grid must lie in (-pi, pi]; angles are in radians (degrees are not accepted)"
            )
        if np.any(np.abs(grid) < PHI_MIN):
            raise ConfigError(f"grid enters the forward cone |phi| < {PHI_MIN}")
        return grid

    def setup(self):
        if self.n is None and self.nprime is None:
            return None
        if self.n is None or self.nprime is None:
            raise ConfigError("--n and --nprime must be given together")
        try:
            return PolarizationSetup(self.n, self.nprime)
        except AbspinError as exc:
            raise ConfigError(str(exc)) from None


# --- parsing -----------------------------------------------------------------

_DEGREE_MARKS = ("deg", "°", "grad")


def parse_angle(text):
    """Radians as a float; accepts ``pi``, ``-pi/6``, ``2*pi/3``."""
    raw = str(text).strip().lower()
    if any(mark in raw for mark in _DEGREE_MARKS):
        raise ConfigError(f"angle {text!r}: degrees are not accepted, give radians")
    expr = raw.replace(" ", "")
    sign = 1.0
    if expr.startswith("-"):
        sign, expr = -1.0, expr[1:]
    num, _, den = expr.partition("/")
    try:
        if "pi" in num:
            coeff = num.replace("pi", "").rstrip("*") or "1"
            value = float(coeff) * math.pi
        else:
            value = float(num)
        if den:
            value /= float(den)
    except ValueError:
        raise ConfigError(f"cannot parse angle {text!r}") from None
    return sign * value


def parse_vector(text):
    if isinstance(text, (list, tuple)):
        parts = list(text)
    else:
        parts = str(text).split(",")
    try:
        v = tuple(float(p) for p in parts)
    except (TypeError, ValueError):
        raise ConfigError(f"cannot parse vector {text!r}; expected x,y,z") from None
    if len(v) != 3:
        raise ConfigError(f"vector {text!r} needs 3 components")
    return v


def parse_prescription(text):
    try:
        return Prescription(str(text).strip().lower())
    except ValueError:
        raise ConfigError(f"prescription must be 'regular' or 'singular', got {text!r}") from None


def _as_int(name, v):
    if isinstance(v, bool) or (isinstance(v, float) and v != int(v)):
        raise ConfigError(f"{name} must be an integer, got {v!r}")
    try:
        return int(v)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be an integer, got {v!r}") from None


def _as_float(name, v):
    if isinstance(v, bool):
        raise ConfigError(f"{name} must be a number, got {v!r}")
    try:
        return float(v)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number, got {v!r}") from None


_CONVERTERS = {
    "alpha": _as_float,
    "k": _as_float,
    "m_max": _as_int,
    "radius_schedule": lambda name, v: tuple(_as_float(name, x) for x in v),
    "phi_count": _as_int,
    "phi_min": lambda name, v: parse_angle(v),
    "phi_max": lambda name, v: parse_angle(v),
    "prescription": lambda name, v: parse_prescription(v),
    "n": lambda name, v: parse_vector(v),
    "nprime": lambda name, v: parse_vector(v),
    "output_format": lambda name, v: str(v),
    "out": lambda name, v: str(v),
    "seed": _as_int,
    "samples": _as_int,
}
_ALIASES = {"format": "output_format", "n_prime": "nprime", "kr": "radius_schedule"}


def load_config_file(path):
    """Flat TOML table of RunConfig fields (``-`` and ``_`` are interchangeable)."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"bad TOML in {path}: {exc}") from None
    out = {}
    for key, value in data.items():
        name = key.replace("-", "_")
        name = _ALIASES.get(name, name)
        if name not in _CONVERTERS:
            raise ConfigError(f"unknown config key {key!r}")
        out[name] = _CONVERTERS[name](name, value)
    return out


def resolve_config(args):
    """Defaults, then the TOML file, then explicit flags."""
    values = {}
    if args.config:
        values.update(load_config_file(args.config))
    flags = {
        "alpha": args.alpha,
        "k": args.k,
        "m_max": args.m_max,
        "phi_count": args.phi_count,
        "phi_min": args.phi_min,
        "phi_max": args.phi_max,
        "prescription": args.prescription,
        "n": args.n,
        "nprime": args.nprime,
        "output_format": args.format,
        "out": args.out,
        "seed": args.seed,
        "samples": args.samples,
    }
    for name, raw in flags.items():
        if raw is not None:
            values[name] = _CONVERTERS[name](name, raw)
    return RunConfig(**values)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--alpha", help="flux in units of the flux quantum (default 0.3)")
    common.add_argument("--k", help="wavenumber (default 1)")
    common.add_argument("--m-max", dest="m_max", help="partial-wave cutoff (default 200)")
    common.add_argument("--phi-count", dest="phi_count", help="grid size (default 64)")
    common.add_argument("--phi-min", dest="phi_min", help="first deflection angle, radians (default pi/6)")
    common.add_argument("--phi-max", dest="phi_max", help="last deflection angle, radians (default pi)")
    common.add_argument("--n", help="incident polarization x,y,z (unit vector)")
    common.add_argument("--nprime", help="detector acceptance x,y,z (unit vector)")
    common.add_argument("--prescription", help="regular | singular (default singular)")
    common.add_argument("--format", help="csv | json (tables default csv, reports json)")
    common.add_argument("--config", help="TOML file; explicit flags take precedence")
    common.add_argument("--out", help="output file, or - for stdout (default)")
    common.add_argument("--seed", help="RNG seed for randomized setups (default 2024)")
    common.add_argument("--samples", help="random setups per limit check (default 1000)")

    parser = _Parser(prog="abspin", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    sub.add_parser("phase-shifts", parents=[common], help="R -> 0 phase shift per (m, s)")
    sub.add_parser("cross-section", parents=[common], help="polarized cross section and its oracle")
    sub.add_parser("limits-report", parents=[common], help="check the two reductions of the bracket")
    sub.add_parser("compare-prescriptions", parents=[common], help="spin dependence, regular vs singular")
    return parser


# --- output ------------------------------------------------------------------


def round_sig(v, digits=SIG_DIGITS):
    """Round floats to ``digits`` significant digits; other types unchanged."""
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    v = float(v)
    if not math.isfinite(v):
        raise AbspinError(f"non-finite value {v} in output")
    r = float(f"{v:.{digits}g}")
    return 0.0 if r == 0.0 else r


def round_tree(obj):
    if isinstance(obj, dict):
        return {k: round_tree(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_tree(v) for v in obj]
    if isinstance(obj, np.generic):
        return round_sig(obj.item())
    return round_sig(obj)


def _csv_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.{SIG_DIGITS}g}"
    return str(v)


def format_records(records, fmt):
    """Serialize already-rounded records; deterministic bytes."""
    if fmt == "json":
        return json.dumps(records, indent=2, ensure_ascii=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if records:
        header = list(records[0])
        writer.writerow(header)
        for rec in records:
            writer.writerow([_csv_cell(rec[h]) for h in header])
    return buf.getvalue()


def write_output(text, out):
    if out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# --- commands ----------------------------------------------------------------


def _table(cfg, prescription=None, threads=None):
    return build_phase_shift_table(
        cfg.alpha,
        cfg.prescription if prescription is None else prescription,
        cfg.m_max,
        cfg.k,
        cfg.radius_schedule,
        threads=resolve_threads(threads),
    )


def cmd_phase_shifts(cfg, threads=None):
    """One record per (m, s): m ascending, s = +1 first."""
    table = _table(cfg, threads=threads)
    rows = []
    dp, dm = table.deltas(1), table.deltas(-1)
    for j, m in enumerate(table.ms):
        m = int(m)
        for s, d in ((1, dp[j]), (-1, dm[j])):
            ch = Channel(m, s)
            rows.append(
                {
                    "m": m,
                    "s": s,
                    "nu": abs(m + cfg.alpha),
                    "phase_shift": float(d),
                    "singular_survives": ch in table.survives,
                    "critical": ch == table.critical,
                }
            )
    return round_tree(rows)


def cmd_cross_section(cfg, threads=None):
    setup = cfg.setup()
    if setup is None:
        raise ConfigError("cross-section needs --n and --nprime")
    theta = cfg.phi_grid()
    phi_lab = wrap_angle(theta + math.pi)
    table = _table(cfg, threads=threads)
    amps = spin_amplitudes(table, solver_angle(phi_lab), cfg.k)
    rows = []
    for th, ph, F in zip(theta, phi_lab, amps):
        xs = cross_section_polarized(setup, ph, cfg.alpha, cfg.k)
        rows.append(
            {
                "phi": float(th),
                "phi_lab": float(ph),
                "dsigma_polarized": float(xs),
                "dsigma_oracle": cross_section_oracle(setup, ph, F),
                "dsigma_ab": float(ab_cross_section_closed_form(cfg.alpha, cfg.k, th)),
                "bracket": float(bracket(setup, ph)),
            }
        )
    return round_tree(rows)


def _limit_a_reference(n, phi):
    z = np.array([0.0, 0.0, 1.0])
    nz = float(np.dot(n, z))
    c = np.cross(n, z)
    return 0.5 * (1.0 + nz * nz - float(np.dot(c, c)) * math.cos(phi))


def cmd_limits_report(cfg, bracket_fn=None):
    """Both reductions of the bracket over random setups.

    ``bracket_fn`` (default: the module-level :func:`bracket`, looked up at
    call time) is injectable so that a tampered bracket can be shown to fail.
    """
    if bracket_fn is None:
        bracket_fn = bracket
    rng = np.random.default_rng(cfg.seed)
    dev_a = 0.0
    dev_b = 0.0
    for _ in range(cfg.samples):
        n = random_unit(rng)
        phi = float(rng.uniform(-math.pi, math.pi))
        same = PolarizationSetup(n, n)
        dev_a = max(dev_a, abs(bracket_fn(same, phi) - _limit_a_reference(n, phi)))
        co = PolarizationSetup(n, corotated_detector(n, phi))
        dev_b = max(dev_b, abs(bracket_fn(co, phi) - 1.0))
    pass_a = dev_a <= LIMIT_A_TOL
    pass_b = dev_b <= LIMIT_B_TOL
    calibrated = None
    if not is_integer_flux(cfg.alpha):
        calibrated = calibrate_phi_sign(cfg.alpha, cfg.k, cfg.m_max)
    report = {
        "command": "limits-report",
        "alpha": cfg.alpha,
        "samples": cfg.samples,
        "seed": cfg.seed,
        "limit_equal_polarizations": {
            "max_deviation": dev_a,
            "tolerance": LIMIT_A_TOL,
            "status": "PASS" if pass_a else "FAIL",
        },
        "limit_corotated_detector": {
            "max_deviation": dev_b,
            "tolerance": LIMIT_B_TOL,
            "status": "PASS" if pass_b else "FAIL",
        },
        "conventions": {
            "phi_sign": PHI_SIGN,
            "phi_sign_recalibrated": calibrated,
            "beam": "incident from the right; forward direction at phi_lab = pi",
            "coupling": "gamma = -s * alpha (convention)",
            "detector": "projector (1 + n'.sigma)/2; outcomes n' and -n' sum to the spin-blind intensity",
        },
        "status": "PASS" if (pass_a and pass_b) else "FAIL",
    }
    return round_tree(report)


def _rotation_angle(n, p):
    """Signed angle about z taking the in-plane part of ``n`` to that of ``p``."""
    return math.atan2(n[0] * p[1] - n[1] * p[0], n[0] * p[0] + n[1] * p[1])


def cmd_compare_prescriptions(cfg, threads=None):
    theta = cfg.phi_grid()
    metrics = {}
    tables = {}
    for p in Prescription:
        tables[p] = _table(cfg, prescription=p, threads=threads)
        metrics[p] = spin_dependence_metric(spin_amplitudes(tables[p], theta, cfg.k))
    reg = metrics[Prescription.REGULAR_ONLY]
    sing = metrics[Prescription.SINGULAR_ALLOWED]
    trivial = is_integer_flux(cfg.alpha)
    pass_reg = reg < REGULAR_METRIC_MAX
    pass_sing = True if trivial else sing > SINGULAR_METRIC_MIN
    table = tables[Prescription.SINGULAR_ALLOWED]
    crit = table.critical
    critical = None
    if crit is not None:
        j = crit.m + table.m_max
        critical = {
            "m": crit.m,
            "s": crit.s,
            "nu": abs(crit.m + cfg.alpha),
            "gamma": shell_jump_coefficient(FluxTube(cfg.alpha, cfg.radius_schedule[-1]), crit),
            "phase_shift": float(table.deltas(crit.s)[j]),
        }
    n_in = (1.0, 0.0, 0.0)
    rotation = []
    if not trivial:
        for th, F in zip(theta, spin_amplitudes(table, theta, cfg.k)):
            pol = scattered_polarization(n_in, th, F)
            rotation.append(
                {
                    "phi": float(th),
                    "rotation": _rotation_angle(n_in, pol),
                    "arg_fplus_over_fminus": float(np.angle(F.f_plus / F.f_minus)),
                }
            )
    report = {
        "command": "compare-prescriptions",
        "alpha": cfg.alpha,
        "m_max": cfg.m_max,
        "metric_regular": reg,
        "metric_singular": sing,
        "regular_threshold": REGULAR_METRIC_MAX,
        "singular_threshold": SINGULAR_METRIC_MIN,
        "regular_check": "PASS" if pass_reg else "FAIL",
        "singular_check": "n/a (integer flux)" if trivial else ("PASS" if pass_sing else "FAIL"),
        "critical_channel": critical,
        "coupling_convention": "gamma = -s * alpha",
        "incident_polarization": list(n_in),
        "polarization_rotation": rotation,
        "status": "PASS" if (pass_reg and pass_sing) else "FAIL",
    }
    return round_tree(report)


def _summary(report):
    lines = [f"{report['command']}: {report['status']}"]
    for key, val in report.items():
        if isinstance(val, dict) and "status" in val:
            lines.append(f"  {key}: {val['status']} (max deviation {val['max_deviation']:.3g})")
    if report["command"] == "compare-prescriptions":
        lines.append(f"  metric regular  = {report['metric_regular']:.3g}")
        lines.append(f"  metric singular = {report['metric_singular']:.3g}")
        lines.append(f"  critical channel: {report['critical_channel']}")
    return "\n".join(lines) + "\n"


def run(argv=None, threads=None):
    """Parse, execute and write; returns the exit status."""
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve_config(args)
        command = args.command
        fmt = cfg.output_format
        if command in TABLE_COMMANDS:
            fmt = fmt or "csv"
            if command == "phase-shifts":
                records = cmd_phase_shifts(cfg, threads)
            else:
                records = cmd_cross_section(cfg, threads)
            write_output(format_records(records, fmt), cfg.out)
            return EXIT_OK
        if fmt == "csv":
            raise ConfigError(f"{command} writes a JSON report; --format csv is not available")
        if command == "limits-report":
            report = cmd_limits_report(cfg)
        else:
            report = cmd_compare_prescriptions(cfg, threads)
        write_output(format_records(report, "json"), cfg.out)
        sys.stderr.write(_summary(report))
        return EXIT_OK if report["status"] == "PASS" else EXIT_FAIL
    except AbspinError as exc:
        msg = " ".join(str(exc).split())
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": msg}) + "\n")
        return EXIT_INVALID


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
