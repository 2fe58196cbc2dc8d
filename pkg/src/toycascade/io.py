"""CSV and JSON artifact emission with deterministic, atomic writes.

Every CSV gets a ``<name>.meta.json`` sidecar carrying the lattice size,
the full parameter set of the run and the fixed conventions (1-based node
indices, phi_0 = 0 anchor, vacuum phases stored as 0).  Floats are
rendered with ``repr``, the shortest representation that round-trips a
double, so identical runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
import os
from pathlib import Path

import numpy as np

from .core import (
    AltHydroState,
    ComplexLattice,
    DEFAULT_PHASE_FLOOR,
    HydroState,
    Trajectory,
    from_alt,
    madelung_compose,
    madelung_decompose,
    nearest_phase,
    shift,
)

TRAJECTORY_COLUMNS = ["t", "j", "re_b", "im_b", "rho", "phi", "theta"]
PROFILE_COLUMNS = ["t", "j", "rho"]
FLUX_COLUMNS = ["t", "N_trunc", "mass_flux", "ham_flux", "M_N", "H_N"]
SWEEP_COLUMNS = [
    "eps", "n", "delta", "T",
    "max_sup_theta", "bound_theta", "max_sup_rho", "bound_rho", "pass",
]

CONVENTIONS = {
    "index_base": 1,
    "ghost_nodes": "all out-of-range indices read as zero",
    "phi0_anchor": 0.0,
    "vacuum_phase": 0.0,
    "phase_floor": DEFAULT_PHASE_FLOOR,
    "float_format": "shortest round-trip (repr)",
}


def fmt(x) -> str:
    """Shortest round-trip rendering for floats; plain str otherwise."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write via a temp file in the same directory plus rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_sidecar(csv_path: str | Path, meta: dict) -> Path:
    side = Path(str(csv_path) + ".meta.json")
    atomic_write_text(side, json.dumps(meta, sort_keys=True, indent=2) + "\n")
    return side


def write_csv(path: str | Path, columns: list[str], rows, meta: dict) -> Path:
    lines = [",".join(columns)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    atomic_write_text(path, "\n".join(lines) + "\n")
    write_sidecar(path, meta)
    return Path(path)


def make_meta(kind: str, columns: list[str], n: int, params: dict) -> dict:
    return {
        "format": kind,
        "columns": columns,
        "n": n,
        "params": params,
        "conventions": CONVENTIONS,
    }


# ---------------------------------------------------------------------------
# Trajectory output
# ---------------------------------------------------------------------------

def _state_columns(state, prev_phi: np.ndarray | None):
    """(b, rho, phi, theta, phi_for_continuity) for one sample."""
    if isinstance(state, ComplexLattice):
        h = madelung_decompose(state)
        phi = h.phi.copy()
        if prev_phi is not None:
            both = h.phase_defined
            phi[both] = nearest_phase(phi[both], prev_phi[both])
        theta = phi - shift(phi, 1)
        return state.b, h.rho, phi, theta, phi
    if isinstance(state, HydroState):
        theta = state.phi - shift(state.phi, 1)
        return madelung_compose(state).b, state.rho, state.phi, theta, None
    if isinstance(state, AltHydroState):
        h = from_alt(state)
        return madelung_compose(h).b, state.rho, h.phi, state.theta, None
    raise TypeError(f"cannot serialize {type(state).__name__} as a trajectory row")


def write_trajectory_csv(path: str | Path, traj: Trajectory, params: dict) -> Path:
    """One row per node per sample with all coordinate systems filled in.

    Complex-form phases are unwrapped in time against the previous sample
    (per node, skipping vacuum nodes); hydrodynamic forms carry their own
    continuous phases.
    """
    rows = []
    prev_phi = None
    for t, state in zip(traj.times, traj.states):
        b, rho, phi, theta, prev = _state_columns(state, prev_phi)
        if prev is not None:
            prev_phi = prev
        for j in range(state.n):
            rows.append(
                (t, j + 1, b[j].real, b[j].imag, rho[j], phi[j], theta[j])
            )
    n = traj.states[0].n
    return write_csv(path, TRAJECTORY_COLUMNS, rows,
                      make_meta("trajectory", TRAJECTORY_COLUMNS, n, params))


def write_profile_csv(path: str | Path, traj: Trajectory, params: dict) -> Path:
    """Density-only trajectory rows (Burgers profiles)."""
    rows = []
    for t, state in zip(traj.times, traj.states):
        for j in range(state.n):
            rows.append((t, j + 1, state.rho[j]))
    n = traj.states[0].n
    return write_csv(path, PROFILE_COLUMNS, rows,
                      make_meta("profile", PROFILE_COLUMNS, n, params))


def write_flux_csv(path: str | Path, series: dict, n_trunc: int, n: int, params: dict) -> Path:
    rows = [
        (t, n_trunc, mf, hf, mn, hn)
        for t, mf, hf, mn, hn in zip(
            series["t"], series["mass_flux"], series["ham_flux"],
            series["M_N"], series["H_N"],
        )
    ]
    return write_csv(path, FLUX_COLUMNS, rows, make_meta("flux", FLUX_COLUMNS, n, params))


def write_sweep_csv(path: str | Path, reports, params: dict) -> Path:
    rows = [
        (r.eps, r.n, r.delta, r.T,
         r.max_sup_theta, r.bound_theta, r.max_sup_rho, r.bound_rho, r.passed)
        for r in reports
    ]
    n = max((r.n for r in reports), default=0)
    return write_csv(path, SWEEP_COLUMNS, rows, make_meta("sweep", SWEEP_COLUMNS, n, params))


def write_json(path: str | Path, obj: dict) -> Path:
    atomic_write_text(path, json.dumps(obj, sort_keys=True, indent=2) + "\n")
    return Path(path)


# ---------------------------------------------------------------------------
# Input
# ---------------------------------------------------------------------------

def read_lattice_csv(path: str | Path, t: float | None = None) -> ComplexLattice:
    """Rebuild a complex state from a trajectory CSV sample.

    ``t = None`` selects the last sample; otherwise the sample whose time
    matches ``t`` exactly (as written) is used.
    """
    by_time: dict[float, dict[int, complex]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"t", "j", "re_b", "im_b"} - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        for row in reader:
            tt = float(row["t"])
            by_time.setdefault(tt, {})[int(row["j"])] = complex(
                float(row["re_b"]), float(row["im_b"])
            )
    if not by_time:
        raise ValueError(f"{path}: no samples")
    key = max(by_time) if t is None else float(t)
    if key not in by_time:
        raise ValueError(f"{path}: no sample at t={t}")
    nodes = by_time[key]
    n = max(nodes)
    if sorted(nodes) != list(range(1, n + 1)):
        raise ValueError(f"{path}: node indices at t={key} are not contiguous 1..n")
    return ComplexLattice(np.array([nodes[j] for j in range(1, n + 1)]))
