"""Hydrodynamic right-hand sides and cross-formulation consistency."""

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from toycascade.core import (
    AltHydroState,
    ComplexLattice,
    HydroState,
    VacuumNode,
    madelung_compose,
    madelung_decompose,
    out_of_phase_alt,
    out_of_phase_lattice,
    shift,
    state_to_rho_theta,
    to_alt,
)
from toycascade.hydro import alt_hydro_rhs, hydro_rhs, integrate_alt, integrate_hydro
from toycascade.integrate import IntegratorConfig
from toycascade.toy_model import integrate_toy, toy_rhs


def random_hydro(rng, n):
    return HydroState(rho=rng.uniform(0.1, 2.0, n), phi=rng.uniform(-10, 10, n))


# ---------------------------------------------------------------------------
# Right-hand sides against the complex form
# ---------------------------------------------------------------------------

def test_hydro_rhs_matches_complex_pushforward():
    # chain rule through b = sqrt(rho) exp(i phi):
    #   drho = 2 Re(conj(b) db),  dphi = Im(conj(b) db) / rho
    rng = np.random.default_rng(42)
    for _ in range(50):
        h = random_hydro(rng, int(rng.integers(1, 12)))
        b = madelung_compose(h).b
        db = toy_rhs(b)
        drho, dphi = hydro_rhs(h)
        np.testing.assert_allclose(drho, 2 * np.real(np.conj(b) * db), atol=1e-12)
        np.testing.assert_allclose(dphi, np.imag(np.conj(b) * db) / h.rho, atol=1e-12)


def test_hydro_rhs_out_of_phase_burgers_structure():
    # quarter-turn ramp: density equation reduces to 4 rho rho_l - 4 rho rho_r
    rng = np.random.default_rng(5)
    rho = rng.uniform(0.2, 1.5, 10)
    h = HydroState(rho=rho, phi=np.arange(10) * np.pi / 4)
    drho, _ = hydro_rhs(h)
    expected = 4 * rho * shift(rho, 1) - 4 * rho * shift(rho, -1)
    np.testing.assert_allclose(drho, expected, atol=1e-14)


def test_hydro_rhs_single_active_node():
    drho, dphi = hydro_rhs(HydroState(rho=[0.7], phi=[1.3]))
    assert drho[0] == 0.0
    assert dphi[0] == pytest.approx(-0.7, abs=1e-15)


def test_alt_rhs_equals_differenced_hydro():
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = int(rng.integers(2, 12))
        h = random_hydro(rng, n)
        a = to_alt(h)
        drho_h, dphi = hydro_rhs(h)
        drho_a, dtheta = alt_hydro_rhs(a)
        np.testing.assert_allclose(drho_a, drho_h, atol=1e-12)
        # theta_j = phi_j - phi_{j-1} is exact for j >= 2
        np.testing.assert_allclose(dtheta[1:], (dphi - shift(dphi, 1))[1:], atol=1e-12)
        # j = 1 takes the general formula verbatim with rho_0 = 0, which is
        # dphi_1 minus the formal ghost-phase rate 2 rho_1 cos(2 theta_1)
        ghost = 2 * h.rho[0] * np.cos(2 * a.theta[0])
        assert dtheta[0] == pytest.approx(dphi[0] - ghost, abs=1e-12)


def test_alt_rhs_uniform_out_of_phase():
    a = out_of_phase_alt(8, 1.0)
    drho, _ = alt_hydro_rhs(a)
    np.testing.assert_allclose(drho[1:-1], 0.0, atol=1e-16)
    assert drho[0] == pytest.approx(-4 * (1 / 8) ** 2, rel=1e-14)
    assert drho[-1] == pytest.approx(4 * (1 / 8) ** 2, rel=1e-14)


def test_alt_rhs_reduces_to_symmetric_burgers_at_quarter_phase():
    rng = np.random.default_rng(9)
    rho = rng.uniform(0.1, 1.0, 12)
    a = AltHydroState(rho=rho, theta=np.full(12, np.pi / 4))
    drho, _ = alt_hydro_rhs(a)
    np.testing.assert_allclose(drho, -8 * rho * (shift(rho, -1) - shift(rho, 1)) / 2, atol=1e-14)


# ---------------------------------------------------------------------------
# Integration
# ---------------------------------------------------------------------------

def test_cross_formulation_consistency():
    eps, n = 1.0, 32
    cfg = IntegratorConfig(dt=1e-3, t_end=0.1)
    toy = integrate_toy(out_of_phase_lattice(n, eps), cfg)
    hyd = integrate_hydro(
        HydroState(rho=np.full(n, eps / 8), phi=np.arange(n) * np.pi / 4), cfg
    )
    alt = integrate_alt(out_of_phase_alt(n, eps), cfg)
    rho_toy = np.array([np.abs(s.b) ** 2 for s in toy.states])
    rho_hyd = np.array([s.rho for s in hyd.states])
    rho_alt = np.array([s.rho for s in alt.states])
    assert np.max(np.abs(rho_toy - rho_hyd)) < 1e-8
    assert np.max(np.abs(rho_toy - rho_alt)) < 1e-8
    # theta agrees for j >= 2; theta_1 depends on the phi_0 anchoring convention
    th_toy = np.array([state_to_rho_theta(s)[1] for s in toy.states])
    th_alt = np.array([s.theta for s in alt.states])
    th_hyd = np.array([state_to_rho_theta(s)[1] for s in hyd.states])
    assert np.max(np.abs(th_toy[:, 1:] - th_alt[:, 1:])) < 1e-8
    assert np.max(np.abs(th_toy[:, 1:] - th_hyd[:, 1:])) < 1e-8


def test_mass_conserved_by_both_forms():
    eps, n = 1.0, 16
    cfg = IntegratorConfig(dt=1e-3, t_end=0.1)
    hyd = integrate_hydro(HydroState(rho=np.full(n, eps / 8), phi=np.arange(n) * np.pi / 4), cfg)
    alt = integrate_alt(out_of_phase_alt(n, eps), cfg)
    for traj in (hyd, alt):
        assert np.max(np.abs(traj.mass - traj.mass[0])) / traj.mass[0] < 1e-10
        assert np.max(np.abs(traj.hamiltonian - traj.hamiltonian[0])) < 1e-10


def test_single_node_closed_forms():
    cfg = IntegratorConfig(dt=1e-4, t_end=1.0)
    # (rho, phi): density frozen, phase drags at -rho
    hyd = integrate_hydro(HydroState(rho=[0.5], phi=[0.3]), cfg)
    assert hyd.states[-1].rho[0] == pytest.approx(0.5, abs=1e-13)
    assert hyd.states[-1].phi[0] == pytest.approx(0.3 - 0.5, abs=1e-10)
    # (rho, theta): the verbatim j=1 equation dtheta = -rho (1 + 2 cos 2 theta);
    # independent adaptive integration as oracle
    alt = integrate_alt(AltHydroState(rho=[0.5], theta=[0.3]), cfg)
    sol = solve_ivp(
        lambda t, y: [-0.5 * (1 + 2 * np.cos(2 * y[0]))],
        (0, 1.0), [0.3], rtol=1e-12, atol=1e-14,
    )
    assert alt.states[-1].rho[0] == pytest.approx(0.5, abs=1e-13)
    assert alt.states[-1].theta[0] == pytest.approx(sol.y[0, -1], abs=1e-8)


def test_vacuum_aborts():
    cfg = IntegratorConfig(dt=1e-3, t_end=0.1)
    rho = np.full(8, 0.125)
    rho[3] = 0.0
    with pytest.raises(VacuumNode) as exc:
        integrate_alt(AltHydroState(rho=rho, theta=np.full(8, np.pi / 4)), cfg)
    assert exc.value.j == 4
    with pytest.raises(VacuumNode):
        integrate_hydro(HydroState(rho=rho, phi=np.zeros(8)), cfg)


def test_hydro_refuses_flagged_decomposition():
    h = madelung_decompose(ComplexLattice([1.0, 0.0, 1.0]))
    with pytest.raises(VacuumNode):
        integrate_hydro(h, IntegratorConfig(dt=1e-3, t_end=0.1))
