"""Discrete Burgers variants and the explicit rarefaction-wave solution.

Three right-hand sides share the lattice ghost-zero convention:

* backward:   drho_j/dt = -c rho_j (rho_j - rho_{j-1})        (``backward_rhs``)
* symmetric:  drho_j/dt = -4 rho_j (rho_{j+1} - rho_{j-1})    (``symmetric_rhs``)
* modified:   backward density (c = 8) paired with the drift
              dtheta_j/dt = -(rho_j - rho_{j-1})              (``modified_exact``)

The backward system with step data rho_j(0) = beta for j >= 1 (zero for
j <= 0) has the closed-form solution

    rho_j(t) = beta * Q_{j-1}(x) / Q_j(x),   x = alpha * beta * t,

where Q_j(x) = sum_{k=0..j} x^k / k! is the truncated exponential series.
Because the backward stencil only reads j and j-1, restricting the
half-infinite solution to nodes 1..n solves the finite lattice exactly;
this restriction is adopted as the reference rarefaction wave everywhere.

Q ratios are evaluated through the incremental term recurrence
term_{k+1} = term_k * x / (k+1); once x exceeds ``DIRECT_X_MAX`` all ratio
work moves to log space (running log-sum-exp) so long-horizon comparisons
do not overflow.  Factorials are never formed directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import AltHydroState, BurgersProfile, NonFinite, Trajectory, shift
from .integrate import IntegratorConfig, rk4_path

#: Largest series argument evaluated in linear space (Q_j(x) <= e^x < overflow).
DIRECT_X_MAX = 700.0

__all__ = [
    "ScalingParams",
    "partial_exp",
    "log_partial_exp",
    "log_tail_ratio",
    "exact_backward",
    "exact_backward_dt",
    "exact_profile",
    "backward_rhs",
    "symmetric_rhs",
    "even_odd_decompose",
    "even_odd_rhs",
    "gamma_tilde",
    "gamma_tilde_dt",
    "sigma_tilde",
    "modified_exact",
    "integrate_backward",
    "integrate_symmetric",
    "step_profile",
    "block_profile",
]


# ---------------------------------------------------------------------------
# Scaling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalingParams:
    """Advection coefficient alpha and step height beta of the backward system.

    The model-matched binding is alpha = 8, beta = eps/8, so the series
    argument alpha*beta*t reduces to eps*t.
    """

    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")

    @classmethod
    def from_epsilon(cls, eps: float) -> "ScalingParams":
        if eps <= 0:
            raise ValueError("eps must be positive")
        return cls(alpha=8.0, beta=eps / 8.0)

    @property
    def epsilon(self) -> float:
        return self.alpha * self.beta


# ---------------------------------------------------------------------------
# Truncated exponential series
# ---------------------------------------------------------------------------

def _check_series_args(j: int, x: float) -> None:
    if j < 0 or j != int(j):
        raise ValueError("series order must be a nonnegative integer")
    if x < 0 or not math.isfinite(x):
        raise ValueError("series argument must be finite and nonnegative")


def partial_exp(j: int, x: float) -> float:
    """Q_j(x) = sum_{k=0..j} x^k / k! via the stable incremental recurrence.

    For x past the linear-space overflow threshold the value is recovered
    from the log-space accumulator (and may legitimately be inf when the
    true value exceeds the double range).
    """
    _check_series_args(j, x)
    if x <= DIRECT_X_MAX:
        term = 1.0
        total = 1.0
        for k in range(1, int(j) + 1):
            term *= x / k
            total += term
        return total
    with np.errstate(over="ignore"):
        return float(np.exp(log_partial_exp(j, x)))


def log_partial_exp(j: int, x: float) -> float:
    """log Q_j(x), exact for x = 0 and safe for arbitrarily large x."""
    _check_series_args(j, x)
    if x == 0.0:
        return 0.0
    if x <= DIRECT_X_MAX:
        return float(np.log(partial_exp(j, x)))
    return float(_log_partials(int(j), x)[-1])


def _log_terms(jmax: int, x: float) -> np.ndarray:
    """log(x^k / k!) for k = 0..jmax (x > 0)."""
    lt = np.zeros(jmax + 1)
    if jmax >= 1:
        lt[1:] = np.cumsum(np.log(x) - np.log(np.arange(1.0, jmax + 1.0)))
    return lt


def _log_partials(jmax: int, x: float) -> np.ndarray:
    return np.logaddexp.accumulate(_log_terms(jmax, x))


def _terms_and_partials(jmax: int, x: float) -> tuple[np.ndarray, np.ndarray]:
    """(x^k/k!, Q_k(x)) for k = 0..jmax in linear space (x <= DIRECT_X_MAX)."""
    terms = np.ones(jmax + 1)
    if jmax >= 1:
        terms[1:] = np.cumprod(x / np.arange(1.0, jmax + 1.0))
    return terms, np.cumsum(terms)


def _tail_ratio_all(jmax: int, x: float) -> np.ndarray:
    """r_k = (x^k/k!) / Q_k(x) for k = 0..jmax; always in [0, 1]."""
    if x == 0.0:
        out = np.zeros(jmax + 1)
        out[0] = 1.0
        return out
    if x <= DIRECT_X_MAX:
        terms, partials = _terms_and_partials(jmax, x)
        return terms / partials
    lt = _log_terms(jmax, x)
    return np.exp(lt - np.logaddexp.accumulate(lt))


def log_tail_ratio(j: int, x: float) -> float:
    """log of the top-term share r_j = (x^j/j!) / Q_j(x).

    Since rho_j(t)/beta = 1 - r_j, a finite value (r_j > 0) certifies that
    node j has strictly left the initial step height, even when 1 - r_j
    rounds to 1 in double precision; -inf is returned for x = 0.
    """
    _check_series_args(j, x)
    if x == 0.0:
        return 0.0 if j == 0 else -math.inf
    lt = _log_terms(int(j), x)
    return float(lt[-1] - np.logaddexp.reduce(lt))


def _ratio_pair(j: int, x: float) -> tuple[float, float]:
    """(r_{j-1}, r_j) for j >= 1."""
    r = _tail_ratio_all(j, x)
    return float(r[j - 1]), float(r[j])


# ---------------------------------------------------------------------------
# Exact rarefaction wave
# ---------------------------------------------------------------------------

def exact_backward(j: int, t: float, p: ScalingParams) -> float:
    """rho_j(t) = beta Q_{j-1}(x) / Q_j(x) = beta (1 - r_j(x)), x = alpha beta t."""
    if j < 1:
        raise ValueError("node index must be >= 1 (the profile evaluator handles ghosts)")
    x = p.alpha * p.beta * t
    _check_series_args(j, x)
    _, rj = _ratio_pair(int(j), x)
    return p.beta * (1.0 - rj)


def exact_backward_dt(j: int, t: float, p: ScalingParams) -> float:
    """Time derivative of ``exact_backward`` through the quotient rule.

    Uses d/dx Q_j = Q_{j-1}, giving
    alpha beta^2 (Q_{j-2} Q_j - Q_{j-1}^2) / Q_j^2, evaluated through the
    overflow-free ratios Q_{j-2}/Q_j and Q_{j-1}/Q_j.
    """
    if j < 1:
        raise ValueError("node index must be >= 1")
    x = p.alpha * p.beta * t
    _check_series_args(j, x)
    j = int(j)
    if x <= DIRECT_X_MAX:
        _, partials = _terms_and_partials(j, x)
        ratio1 = partials[j - 1] / partials[j] if j >= 1 else 0.0
        ratio2 = partials[j - 2] / partials[j] if j >= 2 else 0.0
    else:
        lp = _log_partials(j, x)
        ratio1 = float(np.exp(lp[j - 1] - lp[j]))
        ratio2 = float(np.exp(lp[j - 2] - lp[j])) if j >= 2 else 0.0
    return p.alpha * p.beta ** 2 * (ratio2 - ratio1 ** 2)


def exact_profile(n: int, t: float, p: ScalingParams) -> BurgersProfile:
    """Finite-lattice restriction of the exact solution on nodes 1..n."""
    if n < 1:
        raise ValueError("lattice size must be >= 1")
    x = p.alpha * p.beta * t
    _check_series_args(n, x)
    r = _tail_ratio_all(n, x)
    return BurgersProfile(rho=p.beta * (1.0 - r[1:]))


# ---------------------------------------------------------------------------
# Right-hand sides
# ---------------------------------------------------------------------------

def backward_rhs(p: BurgersProfile | np.ndarray, coeff: float) -> np.ndarray:
    """drho_j/dt = -coeff rho_j (rho_j - rho_{j-1}); coeff 1, 8 or alpha."""
    rho = p.rho if isinstance(p, BurgersProfile) else np.asarray(p, dtype=np.float64)
    return -coeff * rho * (rho - shift(rho, 1))


def symmetric_rhs(p: BurgersProfile | np.ndarray) -> np.ndarray:
    """drho_j/dt = -4 rho_j (rho_{j+1} - rho_{j-1})."""
    rho = p.rho if isinstance(p, BurgersProfile) else np.asarray(p, dtype=np.float64)
    return -4.0 * rho * (shift(rho, -1) - shift(rho, 1))


# ---------------------------------------------------------------------------
# Even/odd decomposition of the symmetric system
# ---------------------------------------------------------------------------

def even_odd_decompose(p: BurgersProfile | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split a profile into even-site and odd-site subsequences.

    With 1-based lattice indices, s_k = rho_{2k} (k = 1..n//2) and
    r_k = rho_{2k+1} (k = 0..ceil(n/2)-1), so s = rho[1::2] and
    r = rho[0::2] in 0-based storage.  The symmetric flow couples them as

        ds_k/dt = -4 s_k (r_k - r_{k-1}),   dr_k/dt = -4 r_k (s_{k+1} - s_k),

    with out-of-range reads 0 (s_0 is the ghost rho_0).
    """
    rho = p.rho if isinstance(p, BurgersProfile) else np.asarray(p, dtype=np.float64)
    return rho[1::2].copy(), rho[0::2].copy()


def even_odd_rhs(s: np.ndarray, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Coupled even/odd right-hand side matching ``symmetric_rhs`` exactly."""
    s = np.asarray(s, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    ns, nr = s.shape[0], r.shape[0]
    # ds_k/dt with array index i = k-1: needs r_k = r[i+1] and r_{k-1} = r[i]
    r_hi = np.zeros(ns)
    m = min(ns, nr - 1)
    if m > 0:
        r_hi[:m] = r[1:1 + m]
    r_lo = np.zeros(ns)
    m = min(ns, nr)
    r_lo[:m] = r[:m]
    ds = -4.0 * s * (r_hi - r_lo)
    # dr_k/dt with array index k: needs s_{k+1} = s[k] and s_k = s[k-1]
    s_hi = np.zeros(nr)
    m = min(nr, ns)
    s_hi[:m] = s[:m]
    s_lo = np.zeros(nr)
    m = min(nr - 1, ns)
    if m > 0:
        s_lo[1:1 + m] = s[:m]
    dr = -4.0 * r * (s_hi - s_lo)
    return ds, dr


# ---------------------------------------------------------------------------
# Phase drift of the modified system
# ---------------------------------------------------------------------------

def gamma_tilde(j: int, t: float, eps: float) -> float:
    """Accumulated phase drift -int_0^t (rho_j - rho_{j-1}) ds of the reference wave.

    Closed form (1/8) log(Q_{j-1}(eps t) / Q_j(eps t)) <= 0; for eps*t <= 1
    its magnitude is bounded by eps*t / (8 j).
    """
    if j < 1:
        raise ValueError("node index must be >= 1")
    if eps <= 0:
        raise ValueError("eps must be positive")
    x = eps * t
    _check_series_args(j, x)
    if x <= DIRECT_X_MAX:
        _, rj = _ratio_pair(int(j), x)
        return 0.125 * math.log1p(-rj)
    lp = _log_partials(int(j), x)
    return 0.125 * float(lp[-2] - lp[-1])


def gamma_tilde_dt(j: int, t: float, eps: float) -> float:
    """d/dt gamma_tilde via the series derivative: rho_{j-1} - rho_j as Q ratios."""
    if j < 1:
        raise ValueError("node index must be >= 1")
    x = eps * t
    _check_series_args(j, x)
    j = int(j)
    if x <= DIRECT_X_MAX:
        _, partials = _terms_and_partials(j, x)
        ratio1 = partials[j - 1] / partials[j]
        ratio2 = partials[j - 2] / partials[j - 1] if j >= 2 else 0.0
    else:
        lp = _log_partials(j, x)
        ratio1 = float(np.exp(lp[j - 1] - lp[j]))
        ratio2 = float(np.exp(lp[j - 2] - lp[j - 1])) if j >= 2 else 0.0
    return (eps / 8.0) * (ratio2 - ratio1)


def sigma_tilde(j: int, t: float, eps: float) -> float:
    """Density step rho_j - rho_{j-1} of the reference wave, in product form.

    sigma_j = (eps/8) r_{j-1} (1 - (x/j)(1 - r_j)) with x = eps t, which is
    nonnegative and bounded by eps / (8 (j-1)!) for x <= 1.
    """
    if j < 1:
        raise ValueError("node index must be >= 1")
    if eps <= 0:
        raise ValueError("eps must be positive")
    x = eps * t
    _check_series_args(j, x)
    rjm1, rj = _ratio_pair(int(j), x)
    return (eps / 8.0) * rjm1 * (1.0 - (x / j) * (1.0 - rj))


def _gamma_sigma_rho_all(n: int, x: float, eps: float):
    """(rho, gamma, sigma) arrays for j = 1..n at series argument x = eps t."""
    r = _tail_ratio_all(n, x)
    if x <= DIRECT_X_MAX:
        gamma = 0.125 * np.log1p(-r[1:])
    else:
        lp = np.logaddexp.accumulate(_log_terms(n, x))
        gamma = 0.125 * (lp[:-1] - lp[1:])
    rho = (eps / 8.0) * (1.0 - r[1:])
    j = np.arange(1.0, n + 1.0)
    sigma = (eps / 8.0) * r[:-1] * (1.0 - (x / j) * (1.0 - r[1:]))
    return rho, gamma, sigma


def modified_exact(t: float, eps: float, n: int) -> AltHydroState:
    """Reference wave of the modified system: theta_j = pi/4 + gamma_j, backward rho.

    Returned as an ``AltHydroState`` on nodes 1..n; the restriction of the
    half-infinite density solution is exact on the finite lattice because
    the backward stencil is one-sided.
    """
    if n < 1:
        raise ValueError("lattice size must be >= 1")
    if eps <= 0:
        raise ValueError("eps must be positive")
    x = eps * t
    _check_series_args(n, x)
    rho, gamma, _ = _gamma_sigma_rho_all(n, x, eps)
    return AltHydroState(rho=rho, theta=np.pi / 4.0 + gamma)


# ---------------------------------------------------------------------------
# Profile integration and initial data
# ---------------------------------------------------------------------------

def _integrate_profile(p0: BurgersProfile, cfg: IntegratorConfig, rhs) -> Trajectory:
    def check(k: int, t: float, y: np.ndarray) -> None:
        if not np.all(np.isfinite(y)):
            raise NonFinite(t)

    times, samples = rk4_path(rhs, np.asarray(p0.rho, dtype=np.float64), cfg, on_step=check)
    # Roundoff can leave densities a few ulp below zero; anything worse is a
    # genuine positivity loss and fails BurgersProfile validation.
    states = tuple(
        BurgersProfile(rho=np.where((y < 0) & (y > -1e-12), 0.0, y)) for y in samples
    )
    return Trajectory(
        times=times,
        states=states,
        mass=np.array([float(np.sum(y)) for y in samples]),
    )


def integrate_backward(p0: BurgersProfile, cfg: IntegratorConfig, coeff: float = 8.0) -> Trajectory:
    """RK4 run of the backward system (mass is not conserved by this flow)."""
    return _integrate_profile(p0, cfg, lambda y: backward_rhs(y, coeff))


def integrate_symmetric(p0: BurgersProfile, cfg: IntegratorConfig) -> Trajectory:
    """RK4 run of the symmetric system (mass-conserving)."""
    return _integrate_profile(p0, cfg, symmetric_rhs)


def step_profile(n: int, height: float) -> BurgersProfile:
    """Uniform step rho_j = height on the whole lattice (rarefaction data)."""
    return BurgersProfile(rho=np.full(n, float(height)))


def block_profile(n_block: int, n: int | None = None) -> BurgersProfile:
    """Block of ones on nodes 1..n_block (lattice defaults to the block itself).

    Zero nodes of the symmetric flow stay zero, so no padding beyond the
    block is required for correctness.
    """
    n = n_block if n is None else n
    if n < n_block:
        raise ValueError("lattice cannot be smaller than the block")
    rho = np.zeros(n)
    rho[:n_block] = 1.0
    return BurgersProfile(rho=rho)
