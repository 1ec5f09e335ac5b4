"""Acceptance criteria, one test per criterion, each logging a PASS/FAIL line."""

import math
import time

import numpy as np

from fvtunnel.config import ScenarioConfig
from fvtunnel.lattice import FieldConfig, constant, derivative, make_grid
from fvtunnel.oracles import brute_force_matrix_element, brute_force_norm, rectangular_transmission
from fvtunnel.potentials import DrivenSineGordon, Phi4, Quadratic
from fvtunnel.solitons import bogomolnyi_bound, pair_profile, phi4_kink, sg_kink
from fvtunnel.transport import run_scenario, sweep_field, table_csv
from fvtunnel.tunneling import (
    BarrierSpec,
    bardeen_matrix_element,
    current_density,
    functional_matrix_element,
    golden_rule_transmission,
    midpoint_trajectory,
)
from fvtunnel.wavefunctionals import (
    apply_hamiltonian,
    build_functional,
    energy_expectation,
    evaluate,
    functional_derivative,
    functional_from_sites,
    ground_state_kernel,
    normalize,
)

KINK_GRID = make_grid(-20, 20, 4001)
PAIR_GRID = make_grid(-40, 40, 8001)
M_BPS = 4.0 / (3.0 * math.sqrt(2.0))
TRIPLES = [(0.5, 1.0, 3.0), (1.2, 2.0, 1.5), (0.3, 4.0, 0.8)]


def smooth_perturbation(grid, rng, scale=0.1):
    u = (grid.points - grid.x_min) / (grid.x_max - grid.x_min)
    out = np.zeros_like(u)
    for k in range(1, 7):
        out += rng.normal(0.0, scale / k) * np.sin(k * math.pi * u)
    x0 = rng.uniform(-3, 3)
    out += rng.normal(0.0, scale) * np.exp(-((grid.points - x0) ** 2) / (2 * rng.uniform(0.3, 2.0) ** 2))
    out[0] = out[-1] = 0.0
    return out


def random_pair(rng, n):
    dx = float(rng.uniform(0.2, 1.0))
    c_i = rng.uniform(-1.0, 1.0, n)
    c_f = c_i + rng.uniform(0.3, 1.5, n) * rng.choice([-1.0, 1.0], n)
    psi_i = normalize(functional_from_sites(c_i, rng.uniform(0.5, 3.0, n), dx))
    psi_f = normalize(functional_from_sites(c_f, rng.uniform(0.5, 3.0, n), dx))
    return psi_i, psi_f


def test_criterion_01_kink_mass(record):
    t0 = time.perf_counter()
    k = phi4_kink(1.0, 1.0, KINK_GRID)
    elapsed = time.perf_counter() - t0
    rel = abs(k.mass - M_BPS) / M_BPS
    assert record(1, "phi4 kink mass", rel < 1e-6 and elapsed < 1.0, f"M = {k.mass:.9f}, rel err {rel:.2e}, {elapsed:.2f} s")


def test_criterion_02_bogomolnyi_inequality(record):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    spec = Phi4(1.0, 1.0)
    base = phi4_kink(1.0, 1.0, KINK_GRID).profile
    worst_slack, min_mass, violations = math.inf, math.inf, 0
    for _ in range(1000):
        delta = smooth_perturbation(KINK_GRID, rng)
        r = bogomolnyi_bound(base.with_values(base.values + delta), spec)
        worst_slack = min(worst_slack, r.mass - r.bound)
        min_mass = min(min_mass, r.mass)
        if not (r.mass >= r.bound - 1e-9 and (not np.any(delta) or r.mass > M_BPS)):
            violations += 1
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and elapsed < 30.0
    assert record(
        2, "Bogomol'nyi inequality", ok,
        f"1000 draws, {violations} violations, min M - bound {worst_slack:.3e}, min M {min_mass:.7f}, {elapsed:.1f} s",
    )


def test_criterion_03_topological_charge(record):
    charges = {
        "kink": (phi4_kink(1.0, 1.0, KINK_GRID).charge, 1.0),
        "antikink": (phi4_kink(1.0, 1.0, KINK_GRID, sign=-1).charge, -1.0),
        "phi4 pair": (pair_profile(Phi4(1.0, 1.0), 10.0, PAIR_GRID).charge, 0.0),
        "sine-Gordon pair": (pair_profile(DrivenSineGordon(1.0), 10.0, PAIR_GRID, inverted=True).charge, 0.0),
    }
    worst = max(abs(q - want) for q, want in charges.values())
    detail = ", ".join(f"{k} {q:+.9f}" for k, (q, _) in charges.items())
    assert record(3, "topological charge", worst < 1e-6, detail)


def test_criterion_04_sine_gordon_mass(record):
    errs = {A: abs(sg_kink(A, KINK_GRID).mass - 8.0 * math.sqrt(A)) / (8.0 * math.sqrt(A)) for A in (1.0, 4.0)}
    detail = ", ".join(f"A={A:g} rel err {e:.2e}" for A, e in errs.items())
    assert record(4, "sine-Gordon kink mass", max(errs.values()) < 1e-6, detail)


def test_criterion_05_bardeen_surface_independence(record):
    spreads = []
    for E, V0, w in TRIPLES:
        b = BarrierSpec(0.0, w, V0, E)
        vals = np.array([bardeen_matrix_element(b, x) for x in np.linspace(0, w, 52)[1:-1]])
        spreads.append((vals.max() - vals.min()) / abs(vals.mean()))
    assert record(5, "Bardeen surface independence", max(spreads) < 1e-10, f"max relative spread {max(spreads):.2e}")


def test_criterion_06_bardeen_vs_transfer_matrix(record):
    V0, w = 2.0, 6.0
    worst, min_opacity = 0.0, math.inf
    for E in np.linspace(0.2, 1.4, 10):
        b = BarrierSpec(0.0, w, V0, float(E))
        min_opacity = min(min_opacity, b.kappa * w)
        exact = rectangular_transmission(b)
        worst = max(worst, abs(golden_rule_transmission(b) - exact) / exact)
    ok = worst < 0.05 and min_opacity >= 5
    assert record(6, "golden rule vs transfer matrix", ok, f"10 energies, min kappa*w {min_opacity:.2f}, max rel err {worst:.3e}")


def test_criterion_07_matrix_element_factorisation(record):
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    worst = 0.0
    for n in (2, 3):
        for _ in range(5):
            psi_i, psi_f = random_pair(rng, n)
            traj = midpoint_trajectory(psi_i, psi_f)
            fast = functional_matrix_element(psi_i, psi_f, traj)
            slow = brute_force_matrix_element(psi_i, psi_f, traj, nodes=100 if n == 2 else 60)
            worst = max(worst, abs(fast - slow) / abs(slow))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-6 and elapsed < 60.0
    assert record(7, "factorised matrix element", ok, f"N=2,3 x 5 draws, max rel err {worst:.2e}, {elapsed:.1f} s")


def test_criterion_08_normalisation_and_overlap(record):
    rng = np.random.default_rng(8)
    worst_norm, worst_anti, self_overlap = 0.0, 0.0, 0.0
    for n in (1, 2, 3):
        for _ in range(3):
            psi_i, psi_f = random_pair(rng, n)
            worst_norm = max(worst_norm, abs(brute_force_norm(psi_i) - 1.0), abs(brute_force_norm(psi_f) - 1.0))
            self_overlap = max(self_overlap, abs(functional_matrix_element(psi_i, psi_i)))
            traj = midpoint_trajectory(psi_i, psi_f)
            t = functional_matrix_element(psi_i, psi_f, traj)
            worst_anti = max(worst_anti, abs(t + functional_matrix_element(psi_f, psi_i, traj)) / abs(t))
    ok = worst_norm < 1e-10 and self_overlap == 0.0 and worst_anti <= 4 * np.finfo(float).eps
    detail = f"max |norm-1| {worst_norm:.2e}, T(psi,psi) = {self_overlap:g}, antisymmetry rel {worst_anti:.1e}"
    assert record(8, "normalisation and overlap", ok, detail)


def test_criterion_09_gap_to_width_identities(record):
    cfg = ScenarioConfig()
    rows = sweep_field(cfg)
    worst_aL = max(abs(r.alpha * r.L - 1.0) for r in rows)
    shift_exact, worst_ratio = True, 0.0
    for r in rows:
        rep = run_scenario(cfg, field=r.E)
        shift_exact &= rep.alpha_tilde == rep.alpha - abs(rep.dV)
        worst_ratio = max(worst_ratio, abs(rep.I2 / rep.I1 - rep.alpha_tilde / rep.alpha))
    # exact up to the one rounding of the product alpha*L in double precision
    ok = worst_aL <= np.finfo(float).eps and shift_exact and worst_ratio < 1e-12
    detail = f"max |alpha*L-1| {worst_aL:.1e}, alpha_tilde bit-exact {shift_exact}, max |I2/I1 - ratio| {worst_ratio:.1e}"
    assert record(9, "gap-to-width identities", ok, detail)


def _partials(psi, phi, i, h):
    e = np.zeros_like(phi)
    e[i] = h
    return [evaluate(psi, phi + k * e) for k in (-2, -1, 0, 1, 2)]


def test_criterion_10_functional_derivative_and_hamiltonian(record):
    spec = DrivenSineGordon(1.0, 0.1)
    worst_d, worst_h = 0.0, 0.0
    for seed in range(20):
        rng = np.random.default_rng(1000 + seed)
        dx = rng.uniform(0.2, 1.0)
        psi = normalize(functional_from_sites(rng.uniform(-1, 1, 5), rng.uniform(0.5, 3.0, 5), dx))
        phi = psi.center + rng.normal(size=5) / np.sqrt(2.0 * psi.site_weights)
        m = rng.uniform(0.5, 2.0)
        lap = 0.0
        for i in range(5):
            _, m1, _, p1, _ = _partials(psi, phi, i, 1e-6)
            fd1 = (p1 - m1) / 2e-6 / dx
            worst_d = max(worst_d, abs(functional_derivative(psi, phi, i) - fd1) / abs(fd1))
            m2, m1, c, p1, p2 = _partials(psi, phi, i, 1e-3)
            lap += (-p2 + 16 * p1 - 30 * c + 16 * m1 - m2) / 12e-6 / dx**2
        grad = derivative(FieldConfig(psi.grid, phi)).values
        local = np.sum(spec.V(phi)) + 0.5 * np.sum(grad**2)
        fd_h = dx * (-0.5 / m * lap + local * evaluate(psi, phi))
        worst_h = max(worst_h, abs(apply_hamiltonian(psi, spec, phi, m) - fd_h) / abs(fd_h))
    ok = worst_d < 1e-6 and worst_h < 1e-6
    assert record(10, "functional derivative and Hamiltonian", ok, f"20 configs, max rel err d {worst_d:.2e}, H {worst_h:.2e}")


def test_criterion_11_variational_harmonic(record):
    C0, m = 1.7, 1.3
    g = make_grid(0, 10, 41)
    spec = Quadratic(C0, 0.4)
    center = constant(0.4, g)
    kernel = ground_state_kernel(spec, center, m)
    energies = {
        s: energy_expectation(normalize(build_functional(center, None, s * kernel.widths)), spec, m, gradient=False)
        for s in (0.5, 1.0, 2.0)
    }
    per_site = energies[1.0] / g.n_points
    expected = 0.5 * math.sqrt(2 * C0 / m)
    rel = abs(per_site - expected) / expected
    ok = energies[1.0] < min(energies[0.5], energies[2.0]) and rel < 1e-6
    detail = ", ".join(f"<H>({s:g}x) = {e:.6f}" for s, e in energies.items()) + f", per-site rel err {rel:.1e}"
    assert record(11, "variational harmonic width", ok, detail)


def test_criterion_12_end_to_end_sweep(record):
    cfg = ScenarioConfig()
    t0 = time.perf_counter()
    rows = sweep_field(cfg)
    elapsed = time.perf_counter() - t0
    identical = table_csv(rows, cfg) == table_csv(sweep_field(cfg), cfg)
    J = np.array([r.J for r in rows])
    increasing = bool(np.all(np.diff(J) > 0))
    consistent = all(
        r.ok
        and r.J == current_density(r.T, r.regime, cfg.overrides.kappa_J)
        and abs(r.Q_pair) < 1e-6
        and r.bound_slack >= -1e-9
        for r in rows
    )
    ok = len(rows) == 15 and elapsed < 120.0 and identical and increasing and consistent
    detail = (
        f"{len(rows)} rows in {elapsed:.1f} s, byte-identical {identical}, J increasing {increasing}, "
        f"rows consistent {consistent}, J {J[0]:.3e} .. {J[-1]:.3e}"
    )
    assert record(12, "end-to-end sweep", ok, detail)
