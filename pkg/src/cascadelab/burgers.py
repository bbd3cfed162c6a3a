"""Periodic 1D viscous Burgers solver with energy-transport diagnostics.

    u_t + (u^2/2)_x = nu u_xx

Conservative central flux differences, central second differences for
diffusion, classical RK4 in time.  With ``E = u^2/2`` the diagnostics measure
how well the pointwise balance ``E_t + u E_x = -nu u_x^2`` holds, the critical
functional ``int |u E_x|^2 dx`` and the gradient-norm history.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from cascadelab.errors import ConfigError, InstabilityError

PROFILES = ("sin", "bump", "constant", "file")


@dataclass(frozen=True)
class BurgersConfig:
    domain_length: float = 2 * math.pi
    grid_points: int = 256
    nu: float = 0.01
    dt: float = 1e-3
    t_end: float = 1.0
    initial_condition: str = "sin"
    ic_params: dict = field(default_factory=dict)
    x_start: float = 0.0
    noise: float = 0.0
    seed: int = 0

    def __post_init__(self):
        n = self.grid_points
        if int(n) != n or n < 16 or (int(n) & (int(n) - 1)) != 0:
            raise ConfigError(f"grid_points must be a power of two >= 16, got {n}")
        if not self.domain_length > 0:
            raise ConfigError("domain_length must be positive")
        if not self.nu > 0:
            raise ConfigError("nu must be positive")
        if not self.dt > 0:
            raise ConfigError("dt must be positive")
        if not self.t_end >= 0:
            raise ConfigError("t_end must be non-negative")
        if self.initial_condition not in PROFILES:
            raise ConfigError(f"initial_condition must be one of {PROFILES}")
        if self.noise < 0:
            raise ConfigError("noise amplitude must be non-negative")
        u0 = self.initial_field()
        limit = self.stable_dt(u0)
        if self.dt > limit:
            raise ConfigError(
                f"dt={self.dt:.3g} exceeds 0.5*min(dx/max|u0|, dx^2/(2 nu)) = {limit:.3g}"
            )

    @property
    def dx(self) -> float:
        return self.domain_length / self.grid_points

    @property
    def x(self) -> np.ndarray:
        return self.x_start + self.dx * np.arange(self.grid_points)

    def stable_dt(self, u) -> float:
        umax = float(np.max(np.abs(u)))
        adv = self.dx / umax if umax > 0 else math.inf
        return 0.5 * min(adv, self.dx**2 / (2 * self.nu))

    def initial_field(self) -> np.ndarray:
        p = self.ic_params
        x = self.x
        kind = self.initial_condition
        if kind == "sin":
            u = p.get("amplitude", 1.0) * np.sin(
                2 * math.pi * p.get("mode", 1) * x / self.domain_length
            )
        elif kind == "bump":
            centre = p.get("center", self.x_start + self.domain_length / 2)
            width = p.get("width", self.domain_length / 4)
            r = (x - centre) / width
            u = np.zeros_like(x)
            inside = np.abs(r) < 1
            u[inside] = p.get("amplitude", 1.0) * np.exp(1.0 - 1.0 / (1.0 - r[inside] ** 2))
        elif kind == "constant":
            u = np.full_like(x, p.get("value", 1.0))
        else:
            u = load_initial_samples(p["path"], self.grid_points)
        if self.noise > 0:
            u = u + smooth_noise(self.grid_points, self.noise, self.seed)
        return u


def load_initial_samples(path, grid_points: int) -> np.ndarray:
    """Read one velocity value per line; the count must equal ``grid_points``."""
    try:
        values = [float(line) for line in Path(path).read_text().split("\n") if line.strip()]
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if len(values) != grid_points:
        raise ConfigError(f"{path}: {len(values)} samples, expected {grid_points}")
    return np.array(values)


def smooth_noise(n: int, amplitude: float, seed: int, modes: int = 8) -> np.ndarray:
    rng = np.random.default_rng(seed)
    x = 2 * math.pi * np.arange(n) / n
    out = np.zeros(n)
    for m in range(1, modes + 1):
        a, b = rng.standard_normal(2) / m
        out += a * np.cos(m * x) + b * np.sin(m * x)
    return amplitude * out / max(np.max(np.abs(out)), 1e-300)


@dataclass
class BurgersState:
    time: float
    u: np.ndarray


def ddx(u, dx):
    return (np.roll(u, -1) - np.roll(u, 1)) / (2 * dx)


def d2dx2(u, dx):
    return (np.roll(u, -1) - 2 * u + np.roll(u, 1)) / dx**2


def burgers_rhs(u, dx, nu):
    up = np.empty(u.size + 2)
    up[1:-1] = u
    up[0] = u[-1]
    up[-1] = u[0]
    flux = 0.5 * up * up
    return (flux[:-2] - flux[2:]) / (2 * dx) + nu * (up[2:] - 2 * u + up[:-2]) / dx**2


def step(state: BurgersState, config: BurgersConfig) -> BurgersState:
    dt, dx, nu = config.dt, config.dx, config.nu
    u = state.u
    k1 = burgers_rhs(u, dx, nu)
    k2 = burgers_rhs(u + 0.5 * dt * k1, dx, nu)
    k3 = burgers_rhs(u + 0.5 * dt * k2, dx, nu)
    k4 = burgers_rhs(u + dt * k3, dx, nu)
    u_new = u + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    t_new = state.time + dt
    if not np.all(np.isfinite(u_new)):
        raise InstabilityError(
            f"non-finite velocity at t={t_new:.6g}; try dt={dt / 2:.3g}",
            time=t_new,
            suggested_dt=dt / 2,
        )
    return BurgersState(t_new, u_new)


@dataclass
class BurgersDiagnostics:
    time: float
    kinetic_energy: float
    dissipation: float
    transport_residual_L2: float
    transport_residual_corrected_L2: float
    energy_budget_residual: float
    critical_functional: float
    grad_norm: float
    max_abs_grad: float
    min_grad: float
    mean_velocity: float


DIAGNOSTIC_FIELDS = tuple(BurgersDiagnostics.__dataclass_fields__)


def _integral(f, dx):
    # uniform periodic grid: trapezoid rule reduces to the plain sum
    return float(np.sum(f) * dx)


def diagnostics(prev: BurgersState, next: BurgersState | None, config: BurgersConfig) -> BurgersDiagnostics:
    """Energy-transport diagnostics centred between two consecutive states.

    Spatial quantities use the midpoint field ``(u_prev + u_next)/2`` and
    ``E_t`` is the difference quotient across the pair.  With ``next=None`` the
    record is taken at ``prev`` itself and ``E_t`` comes from the semi-discrete
    right-hand side.

    ``transport_residual_L2`` is the norm of ``E_t + u E_x + nu u_x^2``.  For
    smooth solutions this tends to ``nu * ||E_xx||``, not zero, since
    ``u u_xx = E_xx - u_x^2``; ``transport_residual_corrected_L2`` subtracts
    ``nu E_xx`` and does vanish under refinement.  ``energy_budget_residual``
    is the domain-integrated balance ``dK/dt + D``.
    """
    dx, nu = config.dx, config.nu
    if next is None:
        u = prev.u
        time = prev.time
        E_t = u * burgers_rhs(u, dx, nu)
        dK_dt = _integral(E_t, dx)
        D_avg = None
    else:
        u = 0.5 * (prev.u + next.u)
        dt = next.time - prev.time
        time = 0.5 * (prev.time + next.time)
        E_t = (0.5 * next.u**2 - 0.5 * prev.u**2) / dt
        dK_dt = (_integral(0.5 * next.u**2, dx) - _integral(0.5 * prev.u**2, dx)) / dt
        D_avg = 0.5 * nu * (_integral(ddx(prev.u, dx) ** 2, dx) + _integral(ddx(next.u, dx) ** 2, dx))
    u_x = ddx(u, dx)
    E = 0.5 * u * u
    E_x = u * u_x
    dissipation = nu * _integral(u_x**2, dx)
    residual = E_t + u * E_x + nu * u_x**2
    corrected = residual - nu * d2dx2(E, dx)
    return BurgersDiagnostics(
        time=time,
        kinetic_energy=_integral(E, dx),
        dissipation=dissipation,
        transport_residual_L2=math.sqrt(_integral(residual**2, dx)),
        transport_residual_corrected_L2=math.sqrt(_integral(corrected**2, dx)),
        energy_budget_residual=dK_dt + (dissipation if D_avg is None else D_avg),
        critical_functional=_integral((u * E_x) ** 2, dx),
        grad_norm=math.sqrt(_integral(u_x**2, dx)),
        max_abs_grad=float(np.max(np.abs(u_x))),
        min_grad=float(np.min(u_x)),
        mean_velocity=float(np.mean(u)),
    )


@dataclass
class BurgersRun:
    history: list
    snapshots: list  # BurgersState copies at the sampling stride, when requested
    final: BurgersState
    min_grad: float  # most negative u_x seen at any step
    min_grad_time: float
    kinetic_energy_steps: np.ndarray  # K after every step, starting at t=0

    @property
    def grad_norm_peak_time(self) -> float:
        g = [d.grad_norm for d in self.history]
        return self.history[int(np.argmax(g))].time


def run_with_history(config: BurgersConfig, stride: int = 1, keep_snapshots: bool = False) -> BurgersRun:
    """Advance to ``t_end``, recording diagnostics every ``stride`` steps.

    The first record is instantaneous at ``t=0``; later records are centred on
    the step that ends at each sampled step index.
    """
    if stride < 1:
        raise ConfigError("stride must be >= 1")
    n_steps = int(round(config.t_end / config.dt))
    state = BurgersState(0.0, config.initial_field())
    history = [diagnostics(state, None, config)]
    snapshots = [BurgersState(state.time, state.u.copy())] if keep_snapshots else []
    g0 = ddx(state.u, config.dx)
    min_grad, min_time = float(g0.min()), 0.0
    K = [history[0].kinetic_energy]
    for i in range(1, n_steps + 1):
        nxt = step(state, config)
        nxt.time = i * config.dt
        g = float(ddx(nxt.u, config.dx).min())
        if g < min_grad:
            min_grad, min_time = g, nxt.time
        K.append(0.5 * float(np.sum(nxt.u**2)) * config.dx)
        if i % stride == 0 or i == n_steps:
            history.append(diagnostics(state, nxt, config))
            if keep_snapshots:
                snapshots.append(BurgersState(nxt.time, nxt.u.copy()))
        state = nxt
    return BurgersRun(history, snapshots, state, min_grad, min_time, np.array(K))
