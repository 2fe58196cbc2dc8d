"""Fixed-step classical Runge-Kutta driver shared by all integrators."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class IntegratorConfig:
    """Step size, horizon and monitoring knobs for a fixed-step run.

    The step count is n_steps = round(t_end / dt) (at least 1) and the
    effective step is t_end / n_steps, so the final sample lands exactly on
    t_end.  ``sample_every`` decimates output; the last step is always kept.
    """

    dt: float
    t_end: float
    sample_every: int = 1
    drift_tol: float = 1e-8

    def __post_init__(self):
        if not (0 < self.dt < self.t_end):
            raise ValueError("need 0 < dt < t_end")
        if self.sample_every < 1:
            raise ValueError("sample_every must be a positive integer")
        if self.drift_tol <= 0:
            raise ValueError("drift_tol must be positive")

    @property
    def n_steps(self) -> int:
        return max(1, round(self.t_end / self.dt))

    @property
    def dt_effective(self) -> float:
        return self.t_end / self.n_steps


def default_dt(eps: float) -> float:
    """Step size heuristic: 1e-3 shrunk when the density scale eps/8 exceeds 1."""
    return 1e-3 * min(1.0, 8.0 / eps)


def rk4_path(
    rhs: Callable[[np.ndarray], np.ndarray],
    y0: np.ndarray,
    cfg: IntegratorConfig,
    on_step: Callable[[int, float, np.ndarray], None] | None = None,
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Integrate dy/dt = rhs(y) and return decimated samples.

    ``on_step(k, t, y)`` runs after every accepted step (and once at t = 0);
    it should raise to abort the run.  Returns the sample times and a list
    of state copies, always including t = 0 and t = t_end.
    """
    dt = cfg.dt_effective
    n_steps = cfg.n_steps
    y = np.array(y0, copy=True)
    times = [0.0]
    samples = [y.copy()]
    if on_step is not None:
        on_step(0, 0.0, y)
    for k in range(1, n_steps + 1):
        k1 = rhs(y)
        k2 = rhs(y + (0.5 * dt) * k1)
        k3 = rhs(y + (0.5 * dt) * k2)
        k4 = rhs(y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = cfg.t_end if k == n_steps else k * dt
        if on_step is not None:
            on_step(k, t, y)
        if k % cfg.sample_every == 0 or k == n_steps:
            times.append(t)
            samples.append(y.copy())
    return np.asarray(times), samples
