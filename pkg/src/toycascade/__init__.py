"""Lattice cascade model simulator and verification harness."""

from .core import (
    AltHydroState,
    BurgersProfile,
    ComplexLattice,
    DriftExceeded,
    HydroState,
    NonFinite,
    SimulationError,
    Trajectory,
    VacuumNode,
    from_alt,
    hamiltonian,
    madelung_compose,
    madelung_decompose,
    mass,
    out_of_phase_alt,
    out_of_phase_lattice,
    single_node_lattice,
    to_alt,
)
from .integrate import IntegratorConfig, default_dt

__version__ = "0.1.0"
