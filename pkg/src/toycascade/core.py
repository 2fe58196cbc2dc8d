"""Lattice state types, coordinate transforms and conserved functionals.

The model state is a finite chain of complex amplitudes b_1..b_n with
implicit zero ghost nodes (b_0 = b_{n+1} = 0, and any out-of-range index
reads as 0).  Two hydrodynamic coordinate systems are supported:

* density/phase (rho_j, phi_j) with b_j = sqrt(rho_j) * exp(i phi_j),
* density/phase-difference (rho_j, theta_j) with theta_j = phi_j - phi_{j-1}.

Conventions (also recorded in every output sidecar):

* indices are 1-based in all file formats and docs; arrays are 0-based,
* the anchor phase of the ghost node is phi_0 = 0, hence theta_1 = phi_1
  when converting between the two hydrodynamic systems,
* nodes with density at or below ``phase_floor`` have no well-defined
  phase; their phase is stored as 0.0 and flagged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * np.pi

#: Densities at or below this value are treated as vacuum (phase undefined).
DEFAULT_PHASE_FLOOR = 1e-12


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------

class SimulationError(RuntimeError):
    """Base class for runtime failures of the integrators."""


class DriftExceeded(SimulationError):
    """Conserved-quantity drift crossed the configured tolerance."""

    def __init__(self, t: float, mass_drift: float, ham_drift: float, tol: float):
        self.t = t
        self.mass_drift = mass_drift
        self.ham_drift = ham_drift
        self.tol = tol
        super().__init__(
            f"invariant drift exceeded tol={tol:g} at t={t:g}: "
            f"mass={mass_drift:.3e}, hamiltonian={ham_drift:.3e}"
        )


class NonFinite(SimulationError):
    """NaN or Inf showed up in the integrated state."""

    def __init__(self, t: float):
        self.t = t
        super().__init__(f"non-finite state entries at t={t:g}")


class VacuumNode(SimulationError):
    """A density fell to (or started at) the vacuum floor in a hydrodynamic run."""

    def __init__(self, t: float, j: int, rho: float, floor: float):
        self.t = t
        self.j = j  # 1-based node index
        self.rho = rho
        self.floor = floor
        super().__init__(
            f"density {rho:.3e} <= floor {floor:.3e} at node j={j}, t={t:g}; "
            "hydrodynamic coordinates break down (rerun in complex form)"
        )


# ---------------------------------------------------------------------------
# Ghost-padded shifts
# ---------------------------------------------------------------------------

def shift(values: np.ndarray, offset: int) -> np.ndarray:
    """Neighbor lookup with zero ghost nodes.

    Returns the array s with s[i] = values[i - offset] where the index is in
    range and 0 elsewhere, so ``shift(v, 1)`` reads the left neighbor and
    ``shift(v, -1)`` the right neighbor at every site.
    """
    v = np.asarray(values)
    if offset == 0:
        return v.copy()
    out = np.zeros_like(v)
    if abs(offset) >= v.shape[0]:
        return out
    if offset > 0:
        out[offset:] = v[:-offset]
    else:
        out[:offset] = v[-offset:]
    return out


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# State types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ComplexLattice:
    """Chain of complex amplitudes b_1..b_n; out-of-range nodes read as 0."""

    b: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.b, dtype=np.complex128)
        if b.ndim != 1 or b.shape[0] < 1:
            raise ValueError("b must be a 1-d vector with at least one node")
        object.__setattr__(self, "b", _freeze(b))

    @property
    def n(self) -> int:
        return self.b.shape[0]

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.b.view(np.float64))))


@dataclass(frozen=True)
class HydroState:
    """Densities rho_j >= 0 and unwrapped phases phi_j (radians).

    ``phase_defined`` marks nodes whose phase is meaningful; vacuum nodes
    (rho below the decomposition floor) carry phi = 0 and a False flag.
    """

    rho: np.ndarray
    phi: np.ndarray
    phase_defined: np.ndarray | None = None

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=np.float64)
        phi = np.asarray(self.phi, dtype=np.float64)
        if rho.ndim != 1 or rho.shape[0] < 1 or phi.shape != rho.shape:
            raise ValueError("rho and phi must be equal-length 1-d vectors")
        if np.any(rho < 0):
            raise ValueError("densities must be nonnegative")
        flags = self.phase_defined
        if flags is None:
            flags = np.ones(rho.shape, dtype=bool)
        else:
            flags = np.asarray(flags, dtype=bool)
            if flags.shape != rho.shape:
                raise ValueError("phase_defined must match rho in length")
        object.__setattr__(self, "rho", _freeze(rho))
        object.__setattr__(self, "phi", _freeze(phi))
        object.__setattr__(self, "phase_defined", _freeze(flags))

    @property
    def n(self) -> int:
        return self.rho.shape[0]


@dataclass(frozen=True)
class AltHydroState:
    """Densities rho_j and phase differences theta_j = phi_j - phi_{j-1}."""

    rho: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=np.float64)
        theta = np.asarray(self.theta, dtype=np.float64)
        if rho.ndim != 1 or rho.shape[0] < 1 or theta.shape != rho.shape:
            raise ValueError("rho and theta must be equal-length 1-d vectors")
        if np.any(rho < 0):
            raise ValueError("densities must be nonnegative")
        object.__setattr__(self, "rho", _freeze(rho))
        object.__setattr__(self, "theta", _freeze(theta))

    @property
    def n(self) -> int:
        return self.rho.shape[0]


@dataclass(frozen=True)
class BurgersProfile:
    """Density-only lattice state for the discrete Burgers variants."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=np.float64)
        if rho.ndim != 1 or rho.shape[0] < 1:
            raise ValueError("rho must be a 1-d vector with at least one node")
        if np.any(rho < 0):
            raise ValueError("densities must be nonnegative")
        object.__setattr__(self, "rho", _freeze(rho))

    @property
    def n(self) -> int:
        return self.rho.shape[0]


State = ComplexLattice | HydroState | AltHydroState | BurgersProfile


@dataclass(frozen=True)
class Trajectory:
    """Time-stamped state samples plus per-sample invariant diagnostics."""

    times: np.ndarray
    states: tuple
    mass: np.ndarray
    hamiltonian: np.ndarray | None = None
    flux: np.ndarray | None = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        if times.ndim != 1 or len(self.states) != times.shape[0]:
            raise ValueError("times and states must have equal length")
        if times.shape[0] >= 2 and np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", _freeze(times))
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "mass", _freeze(np.asarray(self.mass, dtype=np.float64)))
        if self.hamiltonian is not None:
            object.__setattr__(
                self, "hamiltonian", _freeze(np.asarray(self.hamiltonian, dtype=np.float64))
            )

    @property
    def n_samples(self) -> int:
        return self.times.shape[0]


# ---------------------------------------------------------------------------
# Conserved functionals
# ---------------------------------------------------------------------------

def mass_b(b: np.ndarray) -> float:
    """Total mass sum |b_j|^2 of a complex amplitude vector."""
    b = np.asarray(b)
    return float(np.sum(b.real * b.real + b.imag * b.imag))


def hamiltonian_b(b: np.ndarray) -> float:
    """Energy sum_j (|b_j|^4 / 4 - Re(conj(b_j)^2 b_{j-1}^2)) with zero ghosts."""
    b = np.asarray(b)
    bl = shift(b, 1)
    quartic = 0.25 * np.sum(np.abs(b) ** 4)
    coupling = np.sum((np.conj(b) ** 2 * bl ** 2).real)
    return float(quartic - coupling)


def hamiltonian_rho_theta(rho: np.ndarray, theta: np.ndarray) -> float:
    """Energy in hydrodynamic coordinates: sum rho^2/4 - rho_j rho_{j-1} cos(2 theta_j)."""
    rho = np.asarray(rho, dtype=np.float64)
    rho_l = shift(rho, 1)
    return float(np.sum(0.25 * rho * rho - rho * rho_l * np.cos(2.0 * np.asarray(theta))))


def mass(state: State) -> float:
    """Total mass of any state kind (sum of densities)."""
    if isinstance(state, ComplexLattice):
        return mass_b(state.b)
    return float(np.sum(state.rho))


def hamiltonian(state: State) -> float:
    """Energy of any state kind that carries phase information.

    For a ``BurgersProfile`` there is no phase, so no energy is defined.
    """
    if isinstance(state, ComplexLattice):
        return hamiltonian_b(state.b)
    if isinstance(state, HydroState):
        theta = state.phi - shift(state.phi, 1)
        return hamiltonian_rho_theta(state.rho, theta)
    if isinstance(state, AltHydroState):
        return hamiltonian_rho_theta(state.rho, state.theta)
    raise TypeError(f"no energy defined for {type(state).__name__}")


# ---------------------------------------------------------------------------
# Coordinate transforms
# ---------------------------------------------------------------------------

def nearest_phase(raw: np.ndarray | float, reference: np.ndarray | float):
    """Representative of ``raw`` modulo 2 pi lying within pi of ``reference``."""
    return raw + TWO_PI * np.round((np.asarray(reference) - raw) / TWO_PI)


def madelung_decompose(state: ComplexLattice,
                       phase_floor: float = DEFAULT_PHASE_FLOOR) -> HydroState:
    """Split b_j = sqrt(rho_j) exp(i phi_j) into density and unwrapped phase.

    Phases are unwrapped along the lattice index: each phi_j is moved by a
    multiple of 2 pi to lie within pi of phi_{j-1} whenever both densities
    exceed ``phase_floor``.  Vacuum nodes get phi = 0 and a cleared
    ``phase_defined`` flag; unwrapping does not propagate across them.
    """
    if phase_floor <= 0:
        raise ValueError("phase_floor must be positive")
    b = state.b
    rho = (b.real * b.real + b.imag * b.imag).astype(np.float64)
    defined = rho > phase_floor
    phi = np.where(defined, np.angle(b), 0.0)
    for j in range(1, state.n):
        if defined[j] and defined[j - 1]:
            phi[j] = nearest_phase(phi[j], phi[j - 1])
    return HydroState(rho=rho, phi=phi, phase_defined=defined)


def madelung_compose(h: HydroState) -> ComplexLattice:
    """Inverse Madelung map b_j = sqrt(rho_j) exp(i phi_j)."""
    # HydroState construction already rejects negative densities; guard anyway
    # for callers passing hand-built arrays through HydroState subclasses.
    if np.any(h.rho < 0):
        raise ValueError("densities must be nonnegative")
    return ComplexLattice(np.sqrt(h.rho) * np.exp(1j * h.phi))


def to_alt(h: HydroState) -> AltHydroState:
    """Phase differences theta_j = phi_j - phi_{j-1} with the phi_0 = 0 anchor."""
    theta = h.phi - shift(h.phi, 1)
    return AltHydroState(rho=h.rho, theta=theta)


def from_alt(a: AltHydroState, phi1: float | None = None) -> HydroState:
    """Rebuild phases by prefix sums of theta.

    With ``phi1 = None`` the phi_0 = 0 anchor is used, i.e. phi_1 = theta_1;
    passing ``phi1`` overrides the anchor (useful when theta_1 followed the
    difference-phase evolution equation rather than phi_1 - 0).
    """
    phi = np.cumsum(a.theta)
    if phi1 is not None:
        phi = phi + (phi1 - a.theta[0])
    return HydroState(rho=a.rho, phi=phi)


def state_to_rho_theta(state: State) -> tuple[np.ndarray, np.ndarray]:
    """Common (rho, theta) view of any phase-carrying state.

    Complex states are decomposed first, so their theta_1 equals the
    anchored phi_1 rather than the difference-phase evolution value.
    """
    if isinstance(state, AltHydroState):
        return state.rho, state.theta
    if isinstance(state, HydroState):
        a = to_alt(state)
        return a.rho, a.theta
    if isinstance(state, ComplexLattice):
        a = to_alt(madelung_decompose(state))
        return a.rho, a.theta
    raise TypeError(f"no phase information in {type(state).__name__}")


# ---------------------------------------------------------------------------
# Initial data builders
# ---------------------------------------------------------------------------

def out_of_phase_lattice(n: int, eps: float = 8.0) -> ComplexLattice:
    """Quarter-turn phase ramp b_j = sqrt(eps/8) exp(i (j-1) pi / 4).

    eps = 8 gives the unit-amplitude ramp; general eps scales the density
    to the uniform value eps/8.
    """
    j = np.arange(n)
    return ComplexLattice(np.sqrt(eps / 8.0) * np.exp(1j * j * (np.pi / 4.0)))


def out_of_phase_alt(n: int, eps: float) -> AltHydroState:
    """Uniform difference-phase data theta_j = pi/4, rho_j = eps/8."""
    return AltHydroState(rho=np.full(n, eps / 8.0), theta=np.full(n, np.pi / 4.0))


def single_node_lattice(n: int, j: int, amplitude: complex = 1.0) -> ComplexLattice:
    """All-zero lattice with one excited node (1-based index j)."""
    if not 1 <= j <= n:
        raise ValueError(f"node index {j} outside 1..{n}")
    b = np.zeros(n, dtype=np.complex128)
    b[j - 1] = amplitude
    return ComplexLattice(b)
