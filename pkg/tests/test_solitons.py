import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fvtunnel.errors import AnsatzValidityError, BoundarySaturationError, FieldTheoryError, UnsupportedFamilyError
from fvtunnel.lattice import FieldConfig, constant, integrate, make_grid
from fvtunnel.potentials import DrivenSineGordon, Phi4, Quadratic
from fvtunnel.solitons import (
    BOUND_PREFACTOR,
    bogomolnyi_bound,
    energy_density,
    mass,
    pair_profile,
    phi4_kink,
    sg_kink,
    topological_charge,
    topological_charge_density,
)

GRID = make_grid(-20, 20, 4001)
M_BPS = 4.0 / (3.0 * math.sqrt(2.0))


def smooth_perturbation(grid, rng, scale=0.1):
    """Random smooth field vanishing at both grid ends."""
    u = (grid.points - grid.x_min) / (grid.x_max - grid.x_min)
    out = np.zeros_like(u)
    for k in range(1, 7):
        out += rng.normal(0.0, scale / k) * np.sin(k * math.pi * u)
    x0 = rng.uniform(-3, 3)
    out += rng.normal(0.0, scale) * np.exp(-((grid.points - x0) ** 2) / (2 * rng.uniform(0.3, 2.0) ** 2))
    out[0] = out[-1] = 0.0
    return out


def test_phi4_kink_mass_closed_form():
    k = phi4_kink(1.0, 1.0, GRID)
    assert k.mass == pytest.approx(M_BPS, rel=1e-6)
    assert k.charge == pytest.approx(1.0, abs=1e-6)
    assert abs(k.profile.values[0] + 1) < 1e-6 and abs(k.profile.values[-1] - 1) < 1e-6


def test_phi4_antikink():
    k = phi4_kink(1.0, 1.0, GRID, sign=-1)
    assert k.charge == pytest.approx(-1.0, abs=1e-6)
    assert k.mass == pytest.approx(M_BPS, rel=1e-6)
    assert k.family == "phi4_antikink"


def test_phi4_mass_scaling():
    assert phi4_kink(4.0, 1.0, GRID).mass == pytest.approx(1.885618, rel=1e-6)
    m1 = phi4_kink(1.0, 1.0, GRID).mass
    m2 = phi4_kink(1.0, 2.0, make_grid(-20, 20, 8001)).mass
    assert m2 == pytest.approx(8.0 * m1, rel=1e-6)


@pytest.mark.parametrize("A", [1.0, 4.0])
def test_sine_gordon_mass(A):
    k = sg_kink(A, GRID)
    assert k.mass == pytest.approx(8.0 * math.sqrt(A), rel=1e-6)
    assert k.charge == pytest.approx(1.0, abs=1e-6)


def test_sine_gordon_center_and_antikink():
    g = make_grid(-20, 20, 4001)
    k = sg_kink(1.0, g)
    assert k.profile.values[2000] == math.pi
    anti = sg_kink(1.0, g, sign=-1)
    assert anti.profile.values[0] == pytest.approx(2 * math.pi, abs=1e-6)
    assert anti.charge == pytest.approx(-1.0, abs=1e-6)


def test_kink_needs_saturating_grid():
    with pytest.raises(BoundarySaturationError):
        phi4_kink(1.0, 1.0, make_grid(-5, 5, 101))
    with pytest.raises(BoundarySaturationError):
        sg_kink(1.0, make_grid(-10, 10, 101))
    with pytest.raises(FieldTheoryError):
        phi4_kink(1.0, 1.0, GRID, sign=0)


def test_phi4_pair():
    g = make_grid(-40, 40, 8001)
    pair = pair_profile(Phi4(1.0, 1.0), 10.0, g)
    assert abs(pair.charge) < 1e-6
    assert pair.mass == pytest.approx(2 * M_BPS, rel=1e-2)
    assert pair.profile.values[0] == pytest.approx(pair.profile.values[-1], abs=1e-12)


def test_pair_interaction_shrinks_with_separation():
    g = make_grid(-40, 40, 8001)
    devs = [abs(pair_profile(Phi4(1.0, 1.0), L, g).mass - 2 * M_BPS) for L in (6, 8, 10, 12)]
    assert all(a > b for a, b in zip(devs, devs[1:]))


def test_pair_inverted_and_sine_gordon():
    g = make_grid(-40, 40, 8001)
    dip = pair_profile(Phi4(1.0, 1.0), 10.0, g, inverted=True)
    assert dip.profile.values[0] == pytest.approx(1.0, abs=1e-6)
    assert dip.profile.values[4000] == pytest.approx(-1.0, abs=1e-2)
    sg = pair_profile(DrivenSineGordon(1.0), 10.0, g, inverted=True)
    assert abs(sg.charge) < 1e-6
    assert sg.profile.values[0] == pytest.approx(2 * math.pi, abs=1e-6)
    assert sg.mass == pytest.approx(16.0, rel=1e-2)


def test_pair_rejects_overlap_and_unknown_family():
    with pytest.raises(AnsatzValidityError):
        pair_profile(Phi4(1.0, 1.0), 0.1, GRID)
    with pytest.raises(AnsatzValidityError):
        pair_profile(Phi4(1.0, 1.0), -1.0, GRID)
    relaxed = pair_profile(Phi4(1.0, 1.0), 0.1, GRID, check_overlap=False)
    assert abs(relaxed.charge) < 1e-6
    with pytest.raises(UnsupportedFamilyError):
        pair_profile(Quadratic(1.0), 10.0, GRID)


def test_energy_density_examples():
    spec = Phi4(1.0, 1.0)
    assert np.all(energy_density(constant(1.0, GRID), spec).values == 0.0)
    k = phi4_kink(1.0, 1.0, GRID, center=1.5)
    dens = energy_density(k.profile, spec).values
    assert GRID.points[np.argmax(dens)] == pytest.approx(1.5, abs=1e-9)
    assert dens.max() == pytest.approx(0.5, rel=1e-8)
    assert mass(constant(-1.0, GRID), spec) == 0.0


def test_charge_density():
    k = phi4_kink(1.0, 1.0, GRID)
    dens = topological_charge_density(k.profile, 1.0)
    assert integrate(dens) == pytest.approx(1.0, abs=1e-6)
    anti = phi4_kink(1.0, 1.0, GRID, sign=-1)
    np.testing.assert_allclose(topological_charge_density(anti.profile, 1.0).values, -dens.values, atol=1e-12)
    assert np.all(topological_charge_density(constant(0.3, GRID), 1.0).values == 0.0)
    with pytest.raises(FieldTheoryError):
        topological_charge(k.profile, 0.0)


def test_bound_on_exact_kink_is_saturated():
    k = phi4_kink(1.0, 1.0, GRID)
    r = bogomolnyi_bound(k.profile, Phi4(1.0, 1.0))
    assert r.saturated
    assert abs(r.slack) < 1e-6
    assert r.bound == pytest.approx(BOUND_PREFACTOR)


def test_bound_on_vacuum():
    r = bogomolnyi_bound(constant(1.0, GRID), Phi4(1.0, 1.0))
    assert (r.mass, r.charge, r.bound, r.slack) == (0.0, 0.0, 0.0, 0.0)


def test_bound_rejects_other_families():
    with pytest.raises(UnsupportedFamilyError):
        bogomolnyi_bound(constant(0.0, GRID), DrivenSineGordon(1.0))


def test_bound_general_coupling():
    spec = Phi4(2.0, 1.5)
    k = phi4_kink(2.0, 1.5, make_grid(-20, 20, 8001))
    r = bogomolnyi_bound(k.profile, spec)
    assert r.bound == pytest.approx(BOUND_PREFACTOR * spec.mu**3 / spec.lam, rel=1e-12)
    assert r.saturated


def test_bound_perturbations_unsaturated():
    rng = np.random.default_rng(11)
    spec = Phi4(1.0, 1.0)
    base = phi4_kink(1.0, 1.0, GRID).profile
    for _ in range(100):
        f = base.with_values(base.values + smooth_perturbation(GRID, rng))
        r = bogomolnyi_bound(f, spec)
        assert not r.saturated
        assert r.slack > 0
        assert r.mass >= r.intermediate >= r.bound - 1e-9


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1), scale=st.floats(min_value=1e-3, max_value=0.5))
def test_bound_chain_property(seed, scale):
    spec = Phi4(1.0, 1.0)
    base = phi4_kink(1.0, 1.0, GRID).profile
    f = FieldConfig(GRID, base.values + smooth_perturbation(GRID, np.random.default_rng(seed), scale))
    r = bogomolnyi_bound(f, spec)
    assert r.slack >= -1e-9
    assert r.mass >= r.intermediate
    assert r.mass > M_BPS
