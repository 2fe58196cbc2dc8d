"""Hydrodynamic formulations of the lattice model.

Two equivalent coordinate systems for positive-density states:

density/phase (rho, phi):

    dphi_j/dt = -rho_j + 2 rho_{j-1} cos(2(phi_{j-1}-phi_j))
                       + 2 rho_{j+1} cos(2(phi_{j+1}-phi_j))
    drho_j/dt = -4 rho_j rho_{j-1} sin(2(phi_{j-1}-phi_j))
                - 4 rho_j rho_{j+1} sin(2(phi_{j+1}-phi_j))

density/phase-difference (rho, theta), theta_j = phi_j - phi_{j-1}:

    dtheta_j/dt = -(rho_j-rho_{j-1})(1 + 2 cos(2 theta_j))
                  + 2 rho_{j+1} cos(2 theta_{j+1}) - 2 rho_{j-2} cos(2 theta_{j-1})
    drho_j/dt   = 4 rho_j rho_{j-1} sin(2 theta_j) - 4 rho_j rho_{j+1} sin(2 theta_{j+1})

with all out-of-range densities reading 0.  The j = 1 equation of the
difference system is the general formula taken verbatim with rho_0 = 0;
because of the -2 rho_1 cos(2 theta_1) term this is NOT the same as
d(phi_1)/dt under the phi_0 = 0 anchor.  theta_1 never feeds back into the
densities or into theta_{j>=2} (every occurrence is multiplied by a ghost
density), so the two conventions agree on everything except the reported
theta_1 itself.

The complex-form integration is the ground truth; these forms exist to
mirror the density/phase analysis directly.  They degenerate at vacuum:
any density at or below the floor aborts the run with ``VacuumNode``.
"""

from __future__ import annotations

import numpy as np

from .core import (
    AltHydroState,
    DEFAULT_PHASE_FLOOR,
    HydroState,
    NonFinite,
    Trajectory,
    VacuumNode,
    hamiltonian_rho_theta,
    shift,
)
from .integrate import IntegratorConfig, rk4_path

__all__ = ["hydro_rhs", "alt_hydro_rhs", "integrate_hydro", "integrate_alt"]


def hydro_rhs(h: HydroState | tuple[np.ndarray, np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """(drho/dt, dphi/dt) of the density/phase system."""
    rho, phi = (h.rho, h.phi) if isinstance(h, HydroState) else h
    rho_l = shift(rho, 1)
    rho_r = shift(rho, -1)
    # Ghost phases read 0; they only ever appear multiplied by a ghost density.
    dl = 2.0 * (shift(phi, 1) - phi)
    dr = 2.0 * (shift(phi, -1) - phi)
    drho = -4.0 * rho * rho_l * np.sin(dl) - 4.0 * rho * rho_r * np.sin(dr)
    dphi = -rho + 2.0 * rho_l * np.cos(dl) + 2.0 * rho_r * np.cos(dr)
    return drho, dphi


def alt_hydro_rhs(a: AltHydroState | tuple[np.ndarray, np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """(drho/dt, dtheta/dt) of the density/phase-difference system."""
    rho, theta = (a.rho, a.theta) if isinstance(a, AltHydroState) else a
    rho_l = shift(rho, 1)
    rho_r = shift(rho, -1)
    rho_ll = shift(rho, 2)
    th_l = shift(theta, 1)
    th_r = shift(theta, -1)
    drho = 4.0 * rho * rho_l * np.sin(2.0 * theta) - 4.0 * rho * rho_r * np.sin(2.0 * th_r)
    dtheta = (
        -(rho - rho_l) * (1.0 + 2.0 * np.cos(2.0 * theta))
        + 2.0 * rho_r * np.cos(2.0 * th_r)
        - 2.0 * rho_ll * np.cos(2.0 * th_l)
    )
    return drho, dtheta


def _vacuum_check(t: float, rho: np.ndarray, floor: float) -> None:
    if not np.all(np.isfinite(rho)):
        raise NonFinite(t)
    j = int(np.argmin(rho))
    if rho[j] <= floor:
        raise VacuumNode(t, j + 1, float(rho[j]), floor)


def integrate_hydro(
    h0: HydroState,
    cfg: IntegratorConfig,
    phase_floor: float = DEFAULT_PHASE_FLOOR,
) -> Trajectory:
    """RK4 trajectory of the (rho, phi) system with vacuum monitoring."""
    if not np.all(h0.phase_defined):
        j = int(np.argmin(h0.phase_defined)) + 1
        raise VacuumNode(0.0, j, float(h0.rho[j - 1]), phase_floor)
    n = h0.n

    def rhs(y: np.ndarray) -> np.ndarray:
        drho, dphi = hydro_rhs((y[:n], y[n:]))
        return np.concatenate((drho, dphi))

    def check(k: int, t: float, y: np.ndarray) -> None:
        _vacuum_check(t, y[:n], phase_floor)
        if not np.all(np.isfinite(y[n:])):
            raise NonFinite(t)

    y0 = np.concatenate((h0.rho, h0.phi))
    times, samples = rk4_path(rhs, y0, cfg, on_step=check)
    states = tuple(HydroState(rho=y[:n], phi=y[n:]) for y in samples)
    return Trajectory(
        times=times,
        states=states,
        mass=np.array([float(np.sum(y[:n])) for y in samples]),
        hamiltonian=np.array(
            [hamiltonian_rho_theta(y[:n], y[n:] - shift(y[n:], 1)) for y in samples]
        ),
    )


def integrate_alt(
    a0: AltHydroState,
    cfg: IntegratorConfig,
    phase_floor: float = DEFAULT_PHASE_FLOOR,
) -> Trajectory:
    """RK4 trajectory of the (rho, theta) system with vacuum monitoring."""
    n = a0.n

    def rhs(y: np.ndarray) -> np.ndarray:
        drho, dtheta = alt_hydro_rhs((y[:n], y[n:]))
        return np.concatenate((drho, dtheta))

    def check(k: int, t: float, y: np.ndarray) -> None:
        _vacuum_check(t, y[:n], phase_floor)
        if not np.all(np.isfinite(y[n:])):
            raise NonFinite(t)

    y0 = np.concatenate((a0.rho, a0.theta))
    times, samples = rk4_path(rhs, y0, cfg, on_step=check)
    states = tuple(AltHydroState(rho=y[:n], theta=y[n:]) for y in samples)
    return Trajectory(
        times=times,
        states=states,
        mass=np.array([float(np.sum(y[:n])) for y in samples]),
        hamiltonian=np.array([hamiltonian_rho_theta(y[:n], y[n:]) for y in samples]),
    )
