"""Fixed-step fourth-order integrators.

``lawson_rk4`` integrates ``y' = -decay * y + f(y)`` with the diagonal linear
decay treated exactly through an integrating factor (Lawson's IF-RK4) and the
remainder ``f`` handled by the classical RK4 stages.  With ``decay == 0`` it is
classical RK4.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from cascadelab.errors import InstabilityError


@dataclass
class Trajectory:
    times: np.ndarray  # (n_records,)
    states: np.ndarray  # (n_records, n_components)

    def __len__(self):
        return self.times.size

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def step_count(t0: float, t_end: float, dt: float) -> int:
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_end < t0:
        raise ValueError("t_end precedes the initial time")
    # final time lands within dt/2 of t_end
    return int(round((t_end - t0) / dt))


def lawson_rk4(
    f: Callable[[np.ndarray], np.ndarray],
    decay: np.ndarray,
    y0: np.ndarray,
    t0: float,
    dt: float,
    t_end: float,
    stride: int = 1,
    post_step: Callable[[np.ndarray, float], np.ndarray] | None = None,
) -> Trajectory:
    """Integrate from ``t0`` to ``t_end`` with fixed step ``dt``.

    Records the initial state and every ``stride``-th step; the last step is
    always recorded.  ``post_step(y, t)`` may validate or project each new
    state and must return it.
    """
    if stride < 1:
        raise ValueError("stride must be >= 1")
    n_steps = step_count(t0, t_end, dt)
    y = np.array(y0, dtype=float)
    decay = np.broadcast_to(np.asarray(decay, dtype=float), y.shape)
    e_full = np.exp(-decay * dt)
    e_half = np.exp(-decay * dt / 2)
    h2 = dt / 2
    h6 = dt / 6

    times = [t0]
    states = [y.copy()]
    for i in range(1, n_steps + 1):
        # overflow surfaces as a non-finite state, reported below
        with np.errstate(over="ignore", invalid="ignore"):
            k1 = f(y)
            k2 = f(e_half * (y + h2 * k1))
            k3 = f(e_half * y + h2 * k2)
            k4 = f(e_full * y + dt * e_half * k3)
            y = e_full * y + h6 * (e_full * k1 + 2.0 * e_half * (k2 + k3) + k4)
        t = t0 + i * dt
        if not np.all(np.isfinite(y)):
            bad = int(np.flatnonzero(~np.isfinite(y))[0])
            raise InstabilityError(
                f"non-finite value in component {bad} at t={t:.6g}; try dt={dt / 2:.3g}",
                time=t,
                index=bad,
                suggested_dt=dt / 2,
            )
        if post_step is not None:
            y = post_step(y, t)
        if i % stride == 0 or i == n_steps:
            times.append(t)
            states.append(y.copy())
    return Trajectory(np.array(times), np.array(states))


def rk4(f, y0, t0, dt, t_end, stride=1, post_step=None) -> Trajectory:
    y0 = np.atleast_1d(np.asarray(y0, dtype=float))
    return lawson_rk4(f, np.zeros_like(y0), y0, t0, dt, t_end, stride, post_step)
