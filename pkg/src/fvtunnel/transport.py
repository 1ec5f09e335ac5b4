"""Scenario runner and field sweep.

One scenario walks the whole chain for a single applied field:

    potential -> vacua -> gap -> pair -> bound -> functionals -> width shift
    -> matrix element -> current

and every failure is re-raised as :class:`ScenarioError` naming the stage.
"""

from __future__ import annotations

import csv
import io
import math
import os
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import __version__
from .config import ScenarioConfig, canonical_json, config_hash
from .errors import DegenerateVacuumError, FieldTheoryError, NoLocalMinimaError
from .lattice import FieldConfig, constant, make_grid
from .potentials import DrivenSineGordon, VacuumReport, classify_vacua, phi4_roundoff, quadratic_expansion
from .solitons import BoundReport, KinkSolution, bogomolnyi_bound, energy_density, pair_profile
from .tunneling import Regime, current_density, functional_matrix_element, midpoint_trajectory
from .wavefunctionals import (
    GaussianFunctional,
    alpha_from_gap,
    build_functional,
    normalize,
    overlap_exponent_integrals,
    stationarity_residual,
    width_shift,
)

STAGES = (
    "potential", "vacua", "gap", "pair", "bound",
    "functionals", "width_shift", "matrix_element", "current",
)


class ScenarioError(FieldTheoryError):
    """A pipeline failure tagged with the stage that raised it."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


def field_to_tilt(E: float, config: ScenarioConfig) -> float:
    """Map the applied field onto the washboard tilt; linear with unit slope by default."""
    return config.overrides.tilt_per_field * E


@dataclass(frozen=True, eq=False)
class ScenarioReport:
    field: float
    epsilon: float
    vacua: VacuumReport
    alpha: float
    L: float
    pair: KinkSolution
    profile: FieldConfig
    Q_pair: float
    bound: BoundReport
    residual: float
    overlapping: bool
    psi_initial: GaussianFunctional
    psi_final: GaussianFunctional
    dV: float
    alpha_tilde: float
    I1: float
    I2: float
    trajectory: np.ndarray
    T: float
    J: float
    regime: Regime
    spec: DrivenSineGordon

    def to_text(self) -> str:
        v = self.vacua
        rows = [
            ("potential", "A", self.spec.A),
            ("potential", "epsilon", self.epsilon),
            ("vacua", "phi_false", v.phi_false),
            ("vacua", "phi_true", v.phi_true),
            ("vacua", "V_false", v.V_false),
            ("vacua", "V_true", v.V_true),
            ("gap", "delta_E_gap", v.gap),
            ("gap", "alpha", self.alpha),
            ("gap", "L", self.L),
            ("gap", "alpha_times_L", self.alpha * self.L),
            ("pair", "Q_pair", self.Q_pair),
            ("pair", "mass", self.pair.mass),
            ("pair", "stationarity_residual", self.residual),
            ("pair", "overlapping", self.overlapping),
            ("bound", "mass_quartic", self.bound.mass),
            ("bound", "bound", self.bound.bound),
            ("bound", "bound_slack", self.bound.slack),
            ("functionals", "n_sites", self.psi_initial.n_sites),
            ("functionals", "log_norm_initial", self.psi_initial.log_norm),
            ("functionals", "log_norm_final", self.psi_final.log_norm),
            ("width_shift", "dV", self.dV),
            ("width_shift", "alpha_tilde", self.alpha_tilde),
            ("width_shift", "I1", self.I1),
            ("width_shift", "I2", self.I2),
            ("matrix_element", "T_if", self.T),
            ("current", "regime", self.regime.value),
            ("current", "J", self.J),
        ]
        lines = [f"fvtunnel {__version__} scenario report", f"field E = {self.field!r}"]
        for stage, name, value in rows:
            if isinstance(value, float):
                value = format(value, ".17g")
            lines.append(f"[{stage}] {name} = {value}")
        return "\n".join(lines) + "\n"


@contextmanager
def _stage(name: str):
    """Re-raise any field-theory failure as a ScenarioError tagged with ``name``."""
    try:
        yield
    except ScenarioError:
        raise
    except FieldTheoryError as exc:
        raise ScenarioError(name, exc) from exc


def _trajectory(config: ScenarioConfig, psi_i, psi_f):
    ov = config.overrides
    if ov.trajectory_mode == "midpoint":
        return midpoint_trajectory(psi_i, psi_f)
    return np.broadcast_to(np.asarray(ov.trajectory, dtype=float), psi_i.center.shape).copy()


def run_scenario(config: ScenarioConfig, field: Optional[float] = None) -> ScenarioReport:
    """Run the full chain once.

    With ``field`` given the tilt comes from :func:`field_to_tilt`; otherwise
    ``config.potential.epsilon`` is used directly.
    """
    pc, ov = config.potential, config.overrides
    with _stage("potential"):
        eps = pc.epsilon if field is None else field_to_tilt(field, config)
        spec = DrivenSineGordon(pc.A, eps, pc.offset)
        grid = make_grid(config.grid.x_min, config.grid.x_max, config.grid.n_points)
    with _stage("vacua"):
        vac = classify_vacua(spec, config.vacuum_interval)
    with _stage("gap"):
        alpha, L = alpha_from_gap(vac.gap, ov.alpha_constant, ov.L_constant)
    with _stage("pair"):
        # a dip of one period out of the false vacuum, bottoming out near the true one
        untilted = DrivenSineGordon(pc.A)
        pair = pair_profile(
            untilted, L, grid, center=0.5 * (grid.x_min + grid.x_max),
            inverted=True, check_overlap=False,
        )
        profile = pair.profile.shifted(vac.phi_false - 2.0 * math.pi)
        Q_pair = pair.charge
        residual = stationarity_residual(profile, spec)
        overlapping = L <= 4.0 / math.sqrt(pc.A)
    with _stage("bound"):
        quartic = phi4_roundoff(untilted, math.pi)
        phi4, center, _ = quartic.as_phi4()
        # map the untilted vacua 0 and 2π onto the quartic well's ∓φ₀
        scaled = (pair.profile.values - center) * (phi4.phi0 / math.pi)
        bound = bogomolnyi_bound(pair.profile.with_values(scaled), phi4)
    with _stage("functionals"):
        flat = constant(vac.phi_false, grid)
        psi_i = normalize(build_functional(flat, flat, alpha))
        psi_f = normalize(build_functional(profile, flat, alpha))
    with _stage("width_shift"):
        # quartic coefficient and displacement measured from the nearest untilted minimum
        C2 = quadratic_expansion(spec, vac.phi_false).c4
        delta = vac.phi_false - 2.0 * math.pi * round(vac.phi_false / (2.0 * math.pi))
        dV, alpha_tilde = width_shift(alpha, delta, delta, C2)
        I1, I2 = overlap_exponent_integrals(profile, flat, alpha, alpha_tilde)
    with _stage("matrix_element"):
        trajectory = _trajectory(config, psi_i, psi_f)
        T = functional_matrix_element(psi_i, psi_f, trajectory, config.mu)
        if not (math.isfinite(T) and T != 0.0):
            raise FieldTheoryError(f"matrix element is {T!r}; the lattice is too long for double precision")
    with _stage("current"):
        regime = Regime.parse(config.regime)
        J = current_density(T, regime, ov.kappa_J)
    return ScenarioReport(
        field if field is not None else eps, eps, vac, alpha, L, pair, profile, Q_pair, bound,
        residual, overlapping, psi_i, psi_f, dV, alpha_tilde, I1, I2, trajectory, T, J, regime, spec,
    )


# -- sweep --------------------------------------------------------------------

COLUMNS = (
    "E", "epsilon", "gap", "L", "alpha", "alpha_tilde", "T", "J", "regime",
    "Q_pair", "bound_slack", "stationarity_residual", "status",
)


@dataclass(frozen=True)
class SweepRow:
    E: float
    epsilon: float
    status: str
    regime: str
    gap: Optional[float] = None
    L: Optional[float] = None
    alpha: Optional[float] = None
    alpha_tilde: Optional[float] = None
    T: Optional[float] = None
    J: Optional[float] = None
    Q_pair: Optional[float] = None
    bound_slack: Optional[float] = None
    stationarity_residual: Optional[float] = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _status(err: ScenarioError) -> str:
    if isinstance(err.cause, DegenerateVacuumError):
        return "degenerate"
    if isinstance(err.cause, NoLocalMinimaError):
        return "no local minima"
    return f"failed at {err.stage}: {type(err.cause).__name__}"


def sweep_fields(config: ScenarioConfig) -> np.ndarray:
    sw = config.field_sweep
    return np.linspace(sw.E_min, sw.E_max, sw.n_steps)


def sweep_row(config: ScenarioConfig, E: float) -> SweepRow:
    E = float(E)
    eps = field_to_tilt(E, config)
    regime = Regime.parse(config.regime).value
    try:
        r = run_scenario(config, field=E)
    except ScenarioError as err:
        return SweepRow(E, eps, _status(err), regime)
    return SweepRow(
        E, eps, "ok", regime, r.vacua.gap, r.L, r.alpha, r.alpha_tilde, r.T, r.J,
        r.Q_pair, r.bound.slack, r.residual,
    )


def sweep_field(config: ScenarioConfig) -> list[SweepRow]:
    """One row per field value; failures are recorded in the row's status."""
    return [sweep_row(config, E) for E in sweep_fields(config)]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def table_csv(rows, config: ScenarioConfig) -> str:
    buf = io.StringIO()
    buf.write(f"# fvtunnel {__version__}\n")
    buf.write(f"# config_sha256 {config_hash(config)}\n")
    buf.write(f"# config {canonical_json(config)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([_cell(getattr(row, c)) for c in COLUMNS])
    return buf.getvalue()


def write_csv(rows, config: ScenarioConfig, path) -> str:
    text = table_csv(rows, config)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return text


def read_csv(path) -> tuple[list[SweepRow], dict]:
    """Parse a table written by :func:`write_csv`; returns the rows and the metadata lines."""
    meta = {}
    body = []
    with open(path, encoding="utf-8", newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition(" ")
                meta[key] = value
            else:
                body.append(line)
    reader = csv.DictReader(body)
    if reader.fieldnames is None or list(reader.fieldnames) != list(COLUMNS):
        raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
    rows = []
    for rec in reader:
        kwargs = {}
        for c in COLUMNS:
            if c in ("status", "regime"):
                kwargs[c] = rec[c]
            else:
                kwargs[c] = float(rec[c]) if rec[c] != "" else None
        rows.append(SweepRow(**kwargs))
    return rows, meta


# -- plot script --------------------------------------------------------------


def _datablock(name: str, columns) -> str:
    lines = [f"${name} << EOD"]
    for values in zip(*columns):
        lines.append(" ".join(format(float(v), ".17g") for v in values))
    lines.append("EOD")
    return "\n".join(lines)


def emit_plot(rows, config: ScenarioConfig, table_path, out_path) -> str:
    """Write a gnuplot script with three panels: J(E), the pair profile, and the potential.

    The J(E) panel reads the CSV by its path relative to the script; the
    other two embed their data for a representative successful row.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("cannot plot an empty table")
    good = [r for r in rows if r.ok]
    if not good:
        raise ValueError("no successful rows to plot")
    rep = good[len(good) // 2]
    report = run_scenario(config, field=rep.E)
    x = report.profile.x
    v = report.vacua
    density = energy_density(report.profile, report.spec).values - v.V_false
    phis = np.linspace(v.phi_true - math.pi, v.phi_false + math.pi, 401)
    out_dir = os.path.dirname(os.path.abspath(out_path))
    rel = os.path.relpath(os.path.abspath(table_path), out_dir).replace(os.sep, "/")
    cols = {c: i + 1 for i, c in enumerate(COLUMNS)}

    text = "\n".join([
        f"# fvtunnel {__version__} plot script",
        f"# config_sha256 {config_hash(config)}",
        "set datafile separator ','",
        "set datafile commentschars '#'",
        "set terminal pngcairo size 1500,450",
        "set output 'fvtunnel.png'",
        _datablock("profile", [x, report.profile.values, density]),
        _datablock("potential", [phis, report.spec.V(phis)]),
        "set multiplot layout 1,3",
        "set title 'current vs applied field'",
        "set xlabel 'E'",
        "set ylabel 'J'",
        "set logscale y",
        f"plot '{rel}' skip 4 using {cols['E']}:{cols['J']} with linespoints title 'J'",
        "unset logscale y",
        f"set title sprintf('pair profile at E = %g', {rep.E!r})",
        "set xlabel 'x'",
        "set ylabel 'phi'",
        "set y2label 'energy density'",
        "set y2tics",
        f"set label 1 sprintf('Q = %.1f', {abs(report.Q_pair):.1f}) at graph 0.05, graph 0.9",
        "plot $profile using 1:2 with lines title 'phi(x)', "
        "$profile using 1:3 axes x1y2 with lines title 'energy density above false vacuum'",
        "unset label 1",
        "unset y2tics",
        "unset y2label",
        "set title 'washboard potential'",
        "set xlabel 'phi'",
        "set ylabel 'V'",
        f"set arrow 1 from {v.phi_false!r}, graph 0 to {v.phi_false!r}, graph 1 nohead dashtype 2",
        f"set arrow 2 from {v.phi_true!r}, graph 0 to {v.phi_true!r}, graph 1 nohead dashtype 3",
        f"set label 2 'phi_F' at {v.phi_false!r}, graph 0.95",
        f"set label 3 'phi_T' at {v.phi_true!r}, graph 0.95",
        f"set label 4 sprintf('gap = %.4g', {v.gap!r}) at graph 0.05, graph 0.85",
        "plot $potential using 1:2 with lines title 'V(phi)'",
        "unset multiplot",
        "",
    ])
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return text
