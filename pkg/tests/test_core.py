"""State types, transforms and conserved functionals."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from toycascade.core import (
    AltHydroState,
    ComplexLattice,
    HydroState,
    Trajectory,
    from_alt,
    hamiltonian,
    hamiltonian_rho_theta,
    madelung_compose,
    madelung_decompose,
    mass,
    out_of_phase_lattice,
    shift,
    single_node_lattice,
    to_alt,
)


def ramp(n, eps=8.0):
    return out_of_phase_lattice(n, eps)


# ---------------------------------------------------------------------------
# shift / ghost reads
# ---------------------------------------------------------------------------

def test_shift_ghost_zero_fill():
    v = np.array([1.0, 2.0, 3.0])
    np.testing.assert_array_equal(shift(v, 1), [0.0, 1.0, 2.0])
    np.testing.assert_array_equal(shift(v, -1), [2.0, 3.0, 0.0])
    np.testing.assert_array_equal(shift(v, 2), [0.0, 0.0, 1.0])
    np.testing.assert_array_equal(shift(v, 5), [0.0, 0.0, 0.0])
    np.testing.assert_array_equal(shift(v, 0), v)


# ---------------------------------------------------------------------------
# mass / hamiltonian
# ---------------------------------------------------------------------------

def test_mass_examples():
    assert mass(ComplexLattice(np.zeros(5, dtype=complex))) == 0.0
    assert mass(single_node_lattice(10, 5)) == pytest.approx(1.0, abs=0)
    assert mass(ramp(8)) == pytest.approx(8.0, rel=1e-14)


def test_hamiltonian_examples():
    assert hamiltonian(single_node_lattice(10, 5)) == pytest.approx(0.25, abs=0)
    # two in-phase nodes: 1/4 + 1/4 - Re(conj(b2)^2 b1^2) = -0.5
    assert hamiltonian(ComplexLattice([1.0, 1.0])) == pytest.approx(-0.5, abs=1e-15)
    # quarter-turn ramp: every coupling is Re(exp(-i pi/2)) = 0
    assert hamiltonian(ramp(4)) == pytest.approx(1.0, rel=1e-14)


def test_hamiltonian_single_edge_node_has_no_coupling():
    assert hamiltonian(single_node_lattice(4, 1)) == pytest.approx(0.25, abs=0)


@settings(max_examples=60)
@given(
    st.integers(1, 12),
    st.integers(0, 2 ** 31 - 1),
    st.floats(-10, 10, allow_nan=False),
)
def test_global_phase_invariance(n, seed, alpha):
    rng = np.random.default_rng(seed)
    b = rng.normal(size=n) + 1j * rng.normal(size=n)
    rot = ComplexLattice(np.exp(1j * alpha) * b)
    base = ComplexLattice(b)
    assert mass(rot) == pytest.approx(mass(base), rel=1e-13)
    assert hamiltonian(rot) == pytest.approx(hamiltonian(base), rel=1e-13, abs=1e-13)


def test_hamiltonian_rho_theta_matches_complex():
    rng = np.random.default_rng(11)
    rho = rng.uniform(0.1, 2.0, 9)
    phi = rng.uniform(-7, 7, 9)
    h = HydroState(rho=rho, phi=phi)
    a = to_alt(h)
    assert hamiltonian_rho_theta(a.rho, a.theta) == pytest.approx(
        hamiltonian(madelung_compose(h)), rel=1e-12
    )


# ---------------------------------------------------------------------------
# Madelung decompose / compose
# ---------------------------------------------------------------------------

def test_decompose_unit_node():
    h = madelung_decompose(ComplexLattice([1.0 + 0j]))
    assert h.rho[0] == 1.0 and h.phi[0] == 0.0 and h.phase_defined[0]


def test_decompose_ramp_unwraps_past_pi():
    h = madelung_decompose(ramp(8))
    np.testing.assert_allclose(h.rho, 1.0, rtol=1e-14)
    np.testing.assert_allclose(h.phi, np.arange(8) * np.pi / 4, atol=1e-12)


def test_decompose_flags_vacuum_node():
    b = np.array([1.0, 0.0, 1.0j])
    h = madelung_decompose(ComplexLattice(b))
    assert not h.phase_defined[1] and h.phi[1] == 0.0 and h.rho[1] == 0.0
    assert h.phase_defined[[0, 2]].all()


def test_compose_examples():
    assert madelung_compose(HydroState(rho=[1.0], phi=[np.pi / 2])).b[0] == pytest.approx(
        1j, abs=1e-15
    )
    h = HydroState(rho=np.full(4, 1 / 8), phi=np.arange(4) * np.pi / 4)
    np.testing.assert_allclose(
        madelung_compose(h).b,
        np.sqrt(1 / 8) * np.exp(1j * np.arange(4) * np.pi / 4),
        rtol=1e-15,
    )


def test_negative_density_rejected():
    with pytest.raises(ValueError):
        HydroState(rho=[-1.0], phi=[0.0])
    with pytest.raises(ValueError):
        AltHydroState(rho=[0.5, -0.5], theta=[0.0, 0.0])


@settings(max_examples=60)
@given(st.integers(1, 16), st.integers(0, 2 ** 31 - 1))
def test_madelung_round_trip(n, seed):
    rng = np.random.default_rng(seed)
    b = rng.normal(size=n) + 1j * rng.normal(size=n)
    back = madelung_compose(madelung_decompose(ComplexLattice(b))).b
    keep = np.abs(b) ** 2 > 1e-8
    np.testing.assert_allclose(back[keep], b[keep], rtol=1e-14, atol=1e-14)


# ---------------------------------------------------------------------------
# Difference-phase coordinates
# ---------------------------------------------------------------------------

def test_to_alt_ramp():
    h = HydroState(rho=np.ones(5), phi=np.arange(5) * np.pi / 4)
    a = to_alt(h)
    assert a.theta[0] == 0.0
    np.testing.assert_allclose(a.theta[1:], np.pi / 4, rtol=1e-15)


def test_to_alt_constant_phase():
    h = HydroState(rho=np.ones(4), phi=np.full(4, 0.7))
    a = to_alt(h)
    assert a.theta[0] == pytest.approx(0.7)
    np.testing.assert_allclose(a.theta[1:], 0.0, atol=1e-15)


@settings(max_examples=60)
@given(st.integers(1, 16), st.integers(0, 2 ** 31 - 1))
def test_alt_round_trip(n, seed):
    rng = np.random.default_rng(seed)
    h = HydroState(rho=rng.uniform(0.1, 3, n), phi=rng.uniform(-20, 20, n))
    back = from_alt(to_alt(h))
    np.testing.assert_allclose(back.phi, h.phi, rtol=1e-14, atol=1e-13)
    a = to_alt(h)
    again = to_alt(from_alt(a))
    np.testing.assert_allclose(again.theta, a.theta, rtol=1e-14, atol=1e-13)


def test_from_alt_anchor_override():
    a = AltHydroState(rho=[1.0, 1.0], theta=[0.3, 0.2])
    h = from_alt(a, phi1=1.0)
    np.testing.assert_allclose(h.phi, [1.0, 1.2], rtol=1e-15)


# ---------------------------------------------------------------------------
# Trajectory container
# ---------------------------------------------------------------------------

def test_trajectory_rejects_nonincreasing_times():
    s = single_node_lattice(2, 1)
    with pytest.raises(ValueError):
        Trajectory(times=[0.0, 0.0], states=(s, s), mass=[1.0, 1.0])
    with pytest.raises(ValueError):
        Trajectory(times=[0.0, 1.0], states=(s,), mass=[1.0])
