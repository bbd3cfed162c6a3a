"""Shell energy cascade: scales, steady states, closed-form and numerical dynamics.

Shell ``n`` has length ``ell_n = lam**-n * ell0``, wavenumber ``k_n = 1/ell_n``
and cascade time ``tau_n = tau0 * alpha**n`` with ``alpha = lam**(-2/3)``.
Energies obey

    dE_n/dt = E_{n-1}/tau_{n-1} - E_n/tau_n - nu k_n^2 E_n

Shell 0 receives either nothing (``closed``) or a constant flux ``forcing_flux``
(``forced``).  Energy leaving the last shell exits the system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from cascadelab.errors import ConfigError, InstabilityError
from cascadelab.integrators import Trajectory, lawson_rk4
from cascadelab.spectrum import SpectrumSeries

BOUNDARIES = ("closed", "forced")
RHS_KINDS = ("inviscid", "viscous")

# explicit cascade part needs dt <= STABILITY_FRACTION * min tau_n
STABILITY_FRACTION = 0.1
NEGATIVITY_TOL = 1e-12


@dataclass(frozen=True)
class CascadeParams:
    lam: float = 2.0
    tau0: float = 1.0
    ell0: float = 1.0
    nu: float = 0.0
    n_shells: int = 20
    initial_energies: tuple = ()
    boundary: str = "closed"
    forcing_flux: float = 0.0

    def __post_init__(self):
        if not self.lam > 1:
            raise ConfigError(f"lambda must exceed 1, got {self.lam}")
        if not self.tau0 > 0:
            raise ConfigError(f"tau0 must be positive, got {self.tau0}")
        if not self.ell0 > 0:
            raise ConfigError(f"ell0 must be positive, got {self.ell0}")
        if not self.nu >= 0:
            raise ConfigError(f"nu must be non-negative, got {self.nu}")
        if int(self.n_shells) != self.n_shells or self.n_shells < 1:
            raise ConfigError(f"n_shells must be a positive integer, got {self.n_shells}")
        if self.boundary not in BOUNDARIES:
            raise ConfigError(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")
        if self.forcing_flux < 0:
            raise ConfigError("forcing_flux must be non-negative")
        e = tuple(float(x) for x in self.initial_energies)
        if e and len(e) != self.n_shells:
            raise ConfigError(f"{len(e)} initial energies given for {self.n_shells} shells")
        if any(not (x >= 0) for x in e):
            raise ConfigError("initial energies must be non-negative")
        object.__setattr__(self, "initial_energies", e)
        object.__setattr__(self, "n_shells", int(self.n_shells))

    @property
    def alpha(self) -> float:
        return self.lam ** (-2.0 / 3.0)

    @property
    def beta(self) -> float:
        return self.lam ** (2.0 / 3.0)

    @property
    def nu0(self) -> float:
        return self.nu / self.ell0**2

    def initial_state(self) -> "ShellState":
        e = self.initial_energies or (0.0,) * self.n_shells
        return ShellState(0.0, np.array(e))


@dataclass
class ShellState:
    time: float
    energies: np.ndarray

    def __post_init__(self):
        self.energies = np.asarray(self.energies, dtype=float)

    @property
    def total(self) -> float:
        return float(self.energies.sum())


@dataclass(frozen=True)
class ShellScales:
    ell: np.ndarray
    k: np.ndarray
    tau: np.ndarray

    def __len__(self):
        return self.k.size


def shell_scales(params: CascadeParams) -> ShellScales:
    n = np.arange(params.n_shells)
    ell = params.lam ** (-n.astype(float)) * params.ell0
    return ShellScales(ell=ell, k=1.0 / ell, tau=params.tau0 * params.alpha**n)


def viscous_rates(params: CascadeParams) -> np.ndarray:
    """Per-shell viscous damping rates ``nu k_n^2 = nu0 lam^(2n)``."""
    return params.nu * shell_scales(params).k ** 2


def steady_state_energies(params: CascadeParams, E0: float) -> ShellState:
    if E0 < 0:
        raise ConfigError("E0 must be non-negative")
    return ShellState(0.0, E0 * params.alpha ** np.arange(params.n_shells))


def spectrum_from_shells(state: ShellState, scales: ShellScales) -> SpectrumSeries:
    if state.energies.size != len(scales):
        raise ValueError(
            f"state has {state.energies.size} shells but scales have {len(scales)}"
        )
    return SpectrumSeries(scales.k.copy(), state.energies / scales.k, "shell: E_n/k_n")


def _inflow(params: CascadeParams) -> float:
    return params.forcing_flux if params.boundary == "forced" else 0.0


def _cascade(E: np.ndarray, inv_tau: np.ndarray, inflow: float) -> np.ndarray:
    out = E * inv_tau
    rate = -out
    rate[0] += inflow
    rate[1:] += out[:-1]
    return rate


def inviscid_rhs(state: ShellState, params: CascadeParams) -> np.ndarray:
    inv_tau = 1.0 / shell_scales(params).tau
    return _cascade(state.energies, inv_tau, _inflow(params))


def viscous_rhs(state: ShellState, params: CascadeParams) -> np.ndarray:
    return inviscid_rhs(state, params) - viscous_rates(params) * state.energies


def energy_budget(state: ShellState, params: CascadeParams) -> dict:
    """Instantaneous bookkeeping: d(sum E)/dt = inflow - exit_flux - dissipation."""
    scales = shell_scales(params)
    return {
        "inflow": _inflow(params),
        "exit_flux": float(state.energies[-1] / scales.tau[-1]),
        "dissipation": float(np.sum(params.nu * scales.k**2 * state.energies)),
    }


def max_stable_dt(params: CascadeParams) -> float:
    return STABILITY_FRACTION * float(shell_scales(params).tau.min())


def integrate(
    initial: ShellState,
    params: CascadeParams,
    rhs_kind: str = "inviscid",
    dt: float = 1e-3,
    t_end: float = 1.0,
    stride: int = 1,
) -> Trajectory:
    """Fixed-step IF-RK4 integration of the shell cascade.

    The viscous term is integrated exactly through the integrating factor; the
    cascade transfer is explicit, so ``dt`` must satisfy
    ``dt <= 0.1 * min(tau_n)``.  This is checked up front and never adjusted.
    """
    if rhs_kind not in RHS_KINDS:
        raise ConfigError(f"rhs_kind must be one of {RHS_KINDS}, got {rhs_kind!r}")
    if not dt > 0:
        raise ConfigError("dt must be positive")
    if t_end < initial.time:
        raise ConfigError("t_end precedes the initial time")
    if initial.energies.size != params.n_shells:
        raise ConfigError("initial state length does not match n_shells")
    if np.any(initial.energies < 0):
        raise ConfigError("initial energies must be non-negative")
    limit = max_stable_dt(params)
    if dt > limit:
        raise ConfigError(
            f"dt={dt:.3g} exceeds the explicit stability bound {limit:.3g} "
            f"(0.1 * min tau_n); use dt <= {limit:.3g}"
        )

    inv_tau = 1.0 / shell_scales(params).tau
    inflow = _inflow(params)
    decay = viscous_rates(params) if rhs_kind == "viscous" else np.zeros(params.n_shells)
    floor = -NEGATIVITY_TOL * max(initial.total, np.finfo(float).tiny)

    def check(y, t):
        neg = y < 0
        if np.any(neg):
            if np.any(y < floor):
                bad = int(np.argmin(y))
                raise InstabilityError(
                    f"shell {bad} energy {y[bad]:.3g} < 0 at t={t:.6g}; try dt={dt / 4:.3g}",
                    time=t,
                    index=bad,
                    suggested_dt=dt / 4,
                )
            y = np.where(neg, 0.0, y)
        return y

    return lawson_rk4(
        lambda E: _cascade(E, inv_tau, inflow),
        decay,
        initial.energies,
        initial.time,
        dt,
        t_end,
        stride=stride,
        post_step=check,
    )


def analytic_inviscid_solution(initial: ShellState, params: CascadeParams, t: float) -> ShellState:
    """Evaluate the lower-triangular closed form for the scaled energies.

    With ``F_n = E_n / alpha**n`` and ``beta = 1/alpha``::

        F_n(t) = exp(-t/tau0) * sum_{j=0..n} (beta t/tau0)^j / j! * F_{n-j}(0)

    Terms are built by the ratio recurrence so no factorial is formed.  Note
    this sum is the exact solution of ``dF_n/dt = (beta F_{n-1} - F_n)/tau0``,
    i.e. of ``dE_n/dt = (E_{n-1} - E_n)/tau0`` with a single cascade time; see
    ``exact_inviscid_solution`` for the shell system with ``tau_n = tau0 alpha^n``.
    """
    if t < 0:
        raise ConfigError("t must be non-negative")
    elapsed = t - initial.time
    if elapsed < 0:
        raise ConfigError("t precedes the initial state's time")
    n = params.n_shells
    alpha_n = params.alpha ** np.arange(n)
    F0 = initial.energies / alpha_n
    if elapsed == 0:
        return ShellState(t, initial.energies.copy())
    x = params.beta * elapsed / params.tau0
    terms = np.empty(n)
    terms[0] = math.exp(-elapsed / params.tau0)
    for j in range(1, n):
        terms[j] = terms[j - 1] * x / j
    F = np.array([np.dot(terms[: m + 1], F0[m::-1]) for m in range(n)])
    return ShellState(t, alpha_n * F)


def exact_inviscid_solution(initial: ShellState, params: CascadeParams, t: float) -> ShellState:
    """Matrix-exponential solution of the closed-boundary inviscid shell system."""
    scales = shell_scales(params)
    inv_tau = 1.0 / scales.tau
    A = np.diag(-inv_tau) + np.diag(inv_tau[:-1], -1)
    return ShellState(t, expm(A * (t - initial.time)) @ initial.energies)


def local_reynolds(params: CascadeParams, n) -> float:
    if params.nu == 0:
        raise ConfigError("local Reynolds number is undefined for nu = 0 (inviscid regime)")
    n = np.asarray(n, dtype=float)
    tau_n = params.tau0 * params.alpha**n
    k_n = params.lam**n / params.ell0
    return 1.0 / (params.nu * tau_n * k_n**2)


def dissipation_shell_index(params: CascadeParams) -> float:
    """Real shell number where the local Reynolds number reaches 1.

    ``n* = (3/4) ln(1/(nu0 tau0)) / ln(lam)`` with ``nu0 = nu/ell0**2``; the
    plain ``nu`` form is recovered for ``ell0 = 1``.
    """
    x = params.nu0 * params.tau0
    if params.nu == 0 or x >= 1:
        raise ConfigError(
            f"nu0*tau0 = {x:.3g} is outside (0, 1): no inertial range exists"
        )
    return 0.75 * math.log(1.0 / x) / math.log(params.lam)


def energy_flux(state: ShellState, scales: ShellScales) -> np.ndarray:
    if state.energies.size != len(scales):
        raise ValueError("state and scales differ in length")
    return state.energies / scales.tau


def steady_viscous_energies(params: CascadeParams, E0: float) -> ShellState:
    if E0 < 0:
        raise ConfigError("E0 must be non-negative")
    scales = shell_scales(params)
    visc = params.nu * scales.k**2
    E = np.empty(params.n_shells)
    E[0] = E0
    for n in range(1, params.n_shells):
        E[n] = (E[n - 1] / scales.tau[n - 1]) / (1.0 / scales.tau[n] + visc[n])
    return ShellState(0.0, E)


def steady_viscous_residual(state: ShellState, params: CascadeParams) -> np.ndarray:
    """Per-shell balance residual ``E_{n-1}/tau_{n-1} - E_n/tau_n - nu k_n^2 E_n``, n >= 1."""
    scales = shell_scales(params)
    E = state.energies
    return E[:-1] / scales.tau[:-1] - E[1:] / scales.tau[1:] - params.nu * scales.k[1:] ** 2 * E[1:]


def timescale_ratio(params: CascadeParams, n) -> float:
    """Cascade-to-viscous timescale ratio ``tau_n * nu k_n^2``.

    Equals ``nu tau0 lam^(4n/3) / ell0^2`` and grows without bound in ``n``.
    """
    n = np.asarray(n, dtype=float)
    tau_n = params.tau0 * params.alpha**n
    k_n = params.lam**n / params.ell0
    return tau_n * params.nu * k_n**2
