"""Deviation analysis against the exact modified-Burgers reference wave.

Starting from theta_j(0) = pi/4, rho_j(0) = eps/8 on j = 1..n, the
difference-phase system stays close to the decoupled reference
(theta_j, rho_j) = (pi/4 + gamma_j, backward-Burgers wave) for a horizon
T = delta / eps.  This module measures the deviations

    theta_hat_j = theta_j - theta_ref_j,   rho_hat_j = rho_j - rho_ref_j,

evaluates the forcing terms of the linearized evolution, checks the
Gronwall-type integral envelopes and the summed quadratic-growth
inequality, and packages the horizon bounds

    sup_t ||theta_hat||_inf <= delta/8,   sup_t ||rho_hat||_inf <= delta eps / 12

into a pass/fail report.

Index conventions at the lattice ends: the reference density is extended
by zeros outside 1..n, its increments sigma_j = rho_ref_j - rho_ref_{j-1}
inherit that extension (so sigma_{n+1} = -rho_ref_n), and gamma reads 0
out of range (it only ever appears multiplied by an out-of-range density
there).  With this convention the right-endpoint forcing evaluates to
eps^2/16 at t = 0, matching the interior/endpoint estimates checked in
the tests.

Higher-order remainders are measured, never modeled: each sample's
remainder is the full nonlinear rate minus the linear-plus-forcing parts,
with the rates taken from right-hand-side evaluations at the integrated
state (no finite differencing of samples).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .burgers import _gamma_sigma_rho_all
from .core import AltHydroState, Trajectory, shift, state_to_rho_theta, out_of_phase_alt
from .hydro import alt_hydro_rhs, integrate_alt
from .integrate import IntegratorConfig, default_dt

__all__ = [
    "DeviationSeries",
    "TheoremReport",
    "GronwallReport",
    "QuadraticGrowthReport",
    "deviations",
    "forcing_f1",
    "forcing_f2",
    "gronwall_envelopes",
    "l2_growth_check",
    "verify_theorem",
    "theorem_sweep",
    "DEFAULT_GRONWALL_CONST",
]

#: Prefactor of the integral envelopes as stated with the estimate
#: (exp(1/2)/2); measured runs need roughly 1.5x (phase) and 1.1x
#: (density) of it, so checks treat the constant as configurable.
DEFAULT_GRONWALL_CONST = math.exp(0.5) / 2.0


# ---------------------------------------------------------------------------
# Reference-wave ingredients on the finite lattice
# ---------------------------------------------------------------------------

def _reference(t: float, eps: float, n: int):
    """(rho_ref, gamma, sigma) on j = 1..n with the ghost-zero extension."""
    return _gamma_sigma_rho_all(n, eps * t, eps)


def _forcing_arrays(t: float, eps: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """(f1, f2) on j = 1..n.

    f1_j = 4 sigma_j gamma_j - 4 (rho_{j+1} gamma_{j+1} - rho_{j-2} gamma_{j-1})
    f2_j = -4 rho_j (sigma_{j+1} - sigma_j)

    with reference densities zero outside 1..n and sigma_{n+1} = -rho_n.
    """
    rho, gamma, sigma = _reference(t, eps, n)
    rho_r = shift(rho, -1)
    rho_ll = shift(rho, 2)
    gamma_r = shift(gamma, -1)
    gamma_l = shift(gamma, 1)
    f1 = 4.0 * sigma * gamma - 4.0 * (rho_r * gamma_r - rho_ll * gamma_l)
    sigma_r = shift(sigma, -1)
    if n >= 1:
        sigma_r[-1] = -rho[-1]
    f2 = -4.0 * rho * (sigma_r - sigma)
    return f1, f2


def forcing_f1(j: int, t: float, eps: float, n: int) -> float:
    """Phase-equation forcing at node j (1-based)."""
    if not 1 <= j <= n:
        raise ValueError(f"node index {j} outside 1..{n}")
    return float(_forcing_arrays(t, eps, n)[0][j - 1])


def forcing_f2(j: int, t: float, eps: float, n: int) -> float:
    """Density-equation forcing at node j (1-based); the dominant driver."""
    if not 1 <= j <= n:
        raise ValueError(f"node index {j} outside 1..{n}")
    return float(_forcing_arrays(t, eps, n)[1][j - 1])


# ---------------------------------------------------------------------------
# Deviation series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeviationSeries:
    """Per-sample deviations from the reference wave and their sup norms."""

    times: np.ndarray
    theta_hat: np.ndarray  # (n_samples, n)
    rho_hat: np.ndarray    # (n_samples, n)
    sup_theta: np.ndarray
    sup_rho: np.ndarray
    eps: float

    @property
    def n(self) -> int:
        return self.theta_hat.shape[1]


def deviations(traj: Trajectory, eps: float) -> DeviationSeries:
    """Subtract the exact reference wave from every sample of a run.

    The trajectory should start from the uniform pi/4, eps/8 data; complex
    or (rho, phi) trajectories are mapped through the difference-phase
    coordinates first (their theta_1 uses the phi_0 = 0 anchor).
    """
    m = traj.n_samples
    n = traj.states[0].n
    theta_hat = np.empty((m, n))
    rho_hat = np.empty((m, n))
    for i in range(m):
        rho, theta = state_to_rho_theta(traj.states[i])
        if rho.shape[0] != n:
            raise ValueError("trajectory states changed size mid-run")
        rho_ref, gamma, _ = _reference(traj.times[i], eps, n)
        theta_hat[i] = theta - (np.pi / 4.0 + gamma)
        rho_hat[i] = rho - rho_ref
    return DeviationSeries(
        times=traj.times.copy(),
        theta_hat=theta_hat,
        rho_hat=rho_hat,
        sup_theta=np.max(np.abs(theta_hat), axis=1),
        sup_rho=np.max(np.abs(rho_hat), axis=1),
        eps=eps,
    )


# ---------------------------------------------------------------------------
# Linearized pieces measured along a run
# ---------------------------------------------------------------------------

def _sample_residuals(dev: DeviationSeries, i: int):
    """Forcing and measured remainder at sample i.

    Returns (f1, f2, hot1, hot2) arrays where hot1/hot2 are the exact
    residuals: true deviation rate minus (linear part + forcing).
    """
    eps, n = dev.eps, dev.n
    t = dev.times[i]
    rho_ref, gamma, sigma = _reference(t, eps, n)
    th_hat = dev.theta_hat[i]
    rh_hat = dev.rho_hat[i]
    theta = np.pi / 4.0 + gamma + th_hat
    rho = rho_ref + rh_hat

    drho, dtheta = alt_hydro_rhs((rho, theta))
    rho_ref_l = shift(rho_ref, 1)
    thdot_hat = dtheta - (-sigma)
    rhdot_hat = drho - (-8.0 * rho_ref * (rho_ref - rho_ref_l))

    f1, f2 = _forcing_arrays(t, eps, n)

    rho_ref_r = shift(rho_ref, -1)
    rho_ref_ll = shift(rho_ref, 2)
    gamma_r = shift(gamma, -1)
    gamma_l = shift(gamma, 1)
    sig_hat = rh_hat - shift(rh_hat, 1)
    lin1 = (
        -sig_hat * (1.0 - 4.0 * gamma)
        + 4.0 * sigma * th_hat
        - 4.0 * gamma_r * shift(rh_hat, -1)
        - 4.0 * rho_ref_r * shift(th_hat, -1)
        + 4.0 * gamma_l * shift(rh_hat, 2)
        + 4.0 * rho_ref_ll * shift(th_hat, 1)
    )
    lin2 = (
        -4.0 * rh_hat * (rho_ref_r - rho_ref_l)
        - 4.0 * rho_ref * shift(rh_hat, -1)
        + 4.0 * rho_ref * shift(rh_hat, 1)
    )
    hot1 = thdot_hat - lin1 - f1
    hot2 = rhdot_hat - lin2 - f2
    return f1, f2, hot1, hot2, rhdot_hat, lin2


def _cumtrapz(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(y)
    if y.shape[0] > 1:
        out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(x))
    return out


@dataclass(frozen=True)
class GronwallReport:
    """Integral envelopes versus the measured squared sup norms."""

    times: np.ndarray
    lhs_theta: np.ndarray      # ||theta_hat||^2
    lhs_rho: np.ndarray        # ||rho_hat||^2
    envelope_theta: np.ndarray
    envelope_rho: np.ndarray
    f1_norm: np.ndarray
    f2_norm: np.ndarray
    hot1_norm: np.ndarray
    hot2_norm: np.ndarray
    c_const: float
    violations_theta: np.ndarray  # boolean masks
    violations_rho: np.ndarray

    @property
    def ok(self) -> bool:
        return not (bool(self.violations_theta.any()) or bool(self.violations_rho.any()))


def gronwall_envelopes(
    dev: DeviationSeries,
    eps: float,
    T: float,
    c_const: float = DEFAULT_GRONWALL_CONST,
) -> GronwallReport:
    """Evaluate the two integral envelopes along a deviation series.

    envelope_theta(t) = C e^{int_0^t max_j rho_ref ds}
                          int_0^t T (||rho_hat||^2 + ||f1||^2 + ||hot1||^2) ds
    envelope_rho(t)   = C e^{int_0^t max_j rho_ref (1+gamma^2) ds}
                          int_0^t T (||f2||^2 + ||hot2||^2) ds

    using the measured ||rho_hat||, computed forcing norms and measured
    remainder norms.  Samples where a squared sup norm exceeds its
    envelope are flagged, not raised: with the stated default constant
    the density envelope is known to be slightly undersized near t = T.
    """
    m = dev.times.shape[0]
    n = dev.n
    f1n = np.empty(m)
    f2n = np.empty(m)
    hot1n = np.empty(m)
    hot2n = np.empty(m)
    rho_max = np.empty(m)
    rho_gamma_max = np.empty(m)
    for i in range(m):
        f1, f2, hot1, hot2, _, _ = _sample_residuals(dev, i)
        f1n[i] = np.max(np.abs(f1))
        f2n[i] = np.max(np.abs(f2))
        hot1n[i] = np.max(np.abs(hot1))
        hot2n[i] = np.max(np.abs(hot2))
        rho_ref, gamma, _ = _reference(dev.times[i], eps, n)
        rho_max[i] = np.max(rho_ref)
        rho_gamma_max[i] = np.max(rho_ref * (1.0 + gamma ** 2))

    growth_theta = _cumtrapz(T * (dev.sup_rho ** 2 + f1n ** 2 + hot1n ** 2), dev.times)
    growth_rho = _cumtrapz(T * (f2n ** 2 + hot2n ** 2), dev.times)
    env_theta = c_const * np.exp(_cumtrapz(rho_max, dev.times)) * growth_theta
    env_rho = c_const * np.exp(_cumtrapz(rho_gamma_max, dev.times)) * growth_rho
    lhs_theta = dev.sup_theta ** 2
    lhs_rho = dev.sup_rho ** 2
    return GronwallReport(
        times=dev.times,
        lhs_theta=lhs_theta,
        lhs_rho=lhs_rho,
        envelope_theta=env_theta,
        envelope_rho=env_rho,
        f1_norm=f1n,
        f2_norm=f2n,
        hot1_norm=hot1n,
        hot2_norm=hot2n,
        c_const=c_const,
        violations_theta=lhs_theta > env_theta,
        violations_rho=lhs_rho > env_rho,
    )


# ---------------------------------------------------------------------------
# Summed quadratic growth inequality
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadraticGrowthReport:
    """Per-sample check of 1/2 d/dt sum rho_hat^2 <= boundary + sum F rho_hat."""

    times: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    boundary_term: np.ndarray
    forcing_term: np.ndarray
    margin: np.ndarray

    def ok(self, slack: float = 1e-10) -> bool:
        return bool(np.all(self.margin >= -slack))


def l2_growth_check(traj: Trajectory, eps: float) -> QuadraticGrowthReport:
    """Check the summed growth inequality along a run.

    F_j is the exact residual d(rho_hat_j)/dt minus the linear transport
    part 4 rho_hat_{j-1} rho_ref_j - 4 rho_hat_j (rho_ref_{j+1} -
    rho_ref_{j-1}) - 4 rho_hat_{j+1} rho_ref_j, with rates from RHS
    evaluations.  The boundary term uses the two right-endpoint reference
    densities; everything left of it is dissipative for the monotone
    reference wave, so the margin should only reflect roundoff.
    """
    dev = deviations(traj, eps)
    m = dev.times.shape[0]
    lhs = np.empty(m)
    boundary = np.empty(m)
    forcing = np.empty(m)
    for i in range(m):
        _, _, _, _, rhdot_hat, lin2 = _sample_residuals(dev, i)
        rh_hat = dev.rho_hat[i]
        rho_ref, _, _ = _reference(dev.times[i], eps, dev.n)
        F = rhdot_hat - lin2
        lhs[i] = float(np.sum(rh_hat * rhdot_hat))
        boundary[i] = (
            2.0 * rh_hat[-1] ** 2 * (rho_ref[-1] + (rho_ref[-2] if dev.n >= 2 else 0.0))
        )
        forcing[i] = float(np.sum(F * rh_hat))
    rhs = boundary + forcing
    return QuadraticGrowthReport(
        times=dev.times,
        lhs=lhs,
        rhs=rhs,
        boundary_term=boundary,
        forcing_term=forcing,
        margin=rhs - lhs,
    )


# ---------------------------------------------------------------------------
# Horizon-bound verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TheoremReport:
    """Horizon bounds for one (eps, n, delta) run."""

    eps: float
    n: int
    delta: float
    T: float
    max_sup_theta: float
    bound_theta: float
    max_sup_rho: float
    bound_rho: float
    passed: bool
    worst_theta: tuple[float, int] = field(default=(0.0, 0))  # (t, j) of the max
    worst_rho: tuple[float, int] = field(default=(0.0, 0))

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "n": self.n,
            "delta": self.delta,
            "T": self.T,
            "max_sup_theta": self.max_sup_theta,
            "bound_theta": self.bound_theta,
            "max_sup_rho": self.max_sup_rho,
            "bound_rho": self.bound_rho,
            "pass": self.passed,
            "worst_theta_t": self.worst_theta[0],
            "worst_theta_j": self.worst_theta[1],
            "worst_rho_t": self.worst_rho[0],
            "worst_rho_j": self.worst_rho[1],
        }


def verify_theorem(
    eps: float,
    n: int,
    delta: float,
    cfg: IntegratorConfig | None = None,
) -> TheoremReport:
    """Integrate the difference-phase system to T = delta/eps and check bounds.

    Requires 0 < eps <= 8 (density scale eps/8 at most 1), 0 < delta < 1
    and n >= 1.  The offending (t, j) of each maximum is reported so that
    failures are actionable.
    """
    if not 0.0 < eps <= 8.0:
        raise ValueError("need 0 < eps <= 8 (initial density scale eps/8 at most 1)")
    if not 0.0 < delta < 1.0:
        raise ValueError("need 0 < delta < 1")
    if n < 1:
        raise ValueError("need n >= 1")
    T = delta / eps
    if cfg is None:
        cfg = IntegratorConfig(dt=default_dt(eps), t_end=T, sample_every=1)
    traj = integrate_alt(out_of_phase_alt(n, eps), cfg)
    dev = deviations(traj, eps)

    i_t = int(np.argmax(dev.sup_theta))
    j_t = int(np.argmax(np.abs(dev.theta_hat[i_t]))) + 1
    i_r = int(np.argmax(dev.sup_rho))
    j_r = int(np.argmax(np.abs(dev.rho_hat[i_r]))) + 1
    max_theta = float(dev.sup_theta[i_t])
    max_rho = float(dev.sup_rho[i_r])
    bound_theta = delta / 8.0
    bound_rho = delta * eps / 12.0
    return TheoremReport(
        eps=eps,
        n=n,
        delta=delta,
        T=T,
        max_sup_theta=max_theta,
        bound_theta=bound_theta,
        max_sup_rho=max_rho,
        bound_rho=bound_rho,
        passed=(max_theta <= bound_theta) and (max_rho <= bound_rho),
        worst_theta=(float(dev.times[i_t]), j_t),
        worst_rho=(float(dev.times[i_r]), j_r),
    )


def theorem_sweep(
    eps_values: list[float],
    n_values: list[int],
    delta: float,
) -> list[TheoremReport]:
    """Run ``verify_theorem`` over a parameter grid in deterministic order."""
    return [
        verify_theorem(eps, n, delta)
        for eps in eps_values
        for n in n_values
    ]
