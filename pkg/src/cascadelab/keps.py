"""k-epsilon closure constants from singular-set geometry, and 0D homogeneous cases."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from cascadelab.errors import ConfigError
from cascadelab.integrators import Trajectory, rk4
from cascadelab.spectrum import SpectrumSeries

# boxed values the geometric formulas are compared against
BOXED_VALUES = {
    "C_mu": 0.09,
    "sigma_k_raw": 0.78,
    "sigma_k_final": 1.0,
    "sigma_eps": 1.3,
    "C_1eps": 1.44,
    "C_2eps": 1.92,
}


@dataclass(frozen=True)
class GeometryInputs:
    hausdorff_dim: float = 7.0 / 3.0
    lam: float = math.e
    C0: float = 0.12
    C_K: float = 1.5

    def __post_init__(self):
        for name in ("hausdorff_dim", "lam", "C0", "C_K"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.hausdorff_dim > 3:
            raise ConfigError("hausdorff_dim must not exceed 3")


@dataclass(frozen=True)
class ConstantComparison:
    name: str
    formula_value: float | None  # None: no formula exists for this value
    boxed_value: float
    note: str = ""

    @property
    def abs_discrepancy(self) -> float | None:
        if self.formula_value is None:
            return None
        return abs(self.formula_value - self.boxed_value)


@dataclass(frozen=True)
class ClosureConstants:
    C_mu: ConstantComparison
    sigma_k_raw: ConstantComparison
    sigma_k_final: ConstantComparison
    sigma_eps: ConstantComparison
    C_1eps: ConstantComparison
    C_2eps: ConstantComparison
    inputs: GeometryInputs
    C_K_for_boxed_C_mu: float  # C_K that would make the C_mu formula give the boxed value
    C_2eps_chained: float  # C_2eps built on the formula C_1eps rather than the boxed one
    sigma_eps_from_final_sigma_k: float

    def rows(self):
        return [self.C_mu, self.sigma_k_raw, self.sigma_k_final, self.sigma_eps, self.C_1eps, self.C_2eps]


def constants_from_geometry(inputs: GeometryInputs) -> ClosureConstants:
    d = inputs.hausdorff_dim
    kappa_geom = (2.0 / 3.0) ** (4.0 / 3.0) / inputs.C_K**1.5
    c_mu = inputs.C0 * kappa_geom
    sigma_k = d / 3.0
    sigma_eps = sigma_k * math.sqrt(d / 3.0)
    c1 = 1.0 + math.log(inputs.lam) / d
    # the deduction adds the deficit term to the boxed C_1eps
    c2 = BOXED_VALUES["C_1eps"] + (1.0 - 1.0 / d)
    ck_needed = (inputs.C0 * (2.0 / 3.0) ** (4.0 / 3.0) / BOXED_VALUES["C_mu"]) ** (2.0 / 3.0)
    return ClosureConstants(
        C_mu=ConstantComparison("C_mu", c_mu, BOXED_VALUES["C_mu"], f"C_K={inputs.C_K:g}"),
        sigma_k_raw=ConstantComparison("sigma_k_raw", sigma_k, BOXED_VALUES["sigma_k_raw"]),
        sigma_k_final=ConstantComparison(
            "sigma_k_final", None, BOXED_VALUES["sigma_k_final"], "advection correction has no formula"
        ),
        sigma_eps=ConstantComparison("sigma_eps", sigma_eps, BOXED_VALUES["sigma_eps"]),
        C_1eps=ConstantComparison("C_1eps", c1, BOXED_VALUES["C_1eps"], f"lambda={inputs.lam:.6g}"),
        C_2eps=ConstantComparison("C_2eps", c2, BOXED_VALUES["C_2eps"], "from boxed C_1eps"),
        inputs=inputs,
        C_K_for_boxed_C_mu=ck_needed,
        C_2eps_chained=c1 + (1.0 - 1.0 / d),
        sigma_eps_from_final_sigma_k=BOXED_VALUES["sigma_k_final"] * math.sqrt(d / 3.0),
    )


def eddy_viscosity(k, eps, C_mu):
    if np.any(np.asarray(eps) <= 0):
        raise ConfigError("eps must be positive")
    return C_mu * np.asarray(k) ** 2 / eps


@dataclass
class KEpsState:
    time: float
    k: float
    eps: float


@dataclass
class DecayRun:
    trajectory: Trajectory  # columns (k, eps)
    k_exact: np.ndarray
    eps_exact: np.ndarray
    C_2eps: float

    @property
    def times(self):
        return self.trajectory.times

    @property
    def k(self):
        return self.trajectory.states[:, 0]

    @property
    def eps(self):
        return self.trajectory.states[:, 1]

    @property
    def decay_exponent(self) -> float:
        return -1.0 / (self.C_2eps - 1.0)


def decaying_closed_form(initial: KEpsState, C_2eps: float, t):
    n = C_2eps - 1.0
    t = np.asarray(t, dtype=float) - initial.time
    base = 1.0 + n * initial.eps * t / initial.k
    return initial.k * base ** (-1.0 / n), initial.eps * base ** (-C_2eps / n)


def decaying_turbulence(initial: KEpsState, C_2eps: float = 1.92, dt: float = 1e-3, t_end: float = 10.0, stride: int = 1) -> DecayRun:
    """Homogeneous decay: ``dk/dt = -eps``, ``d eps/dt = -C_2eps eps^2/k``.

    Returned alongside the closed form
    ``k(t) = k0 (1 + (C_2eps - 1) eps0 t / k0)^(-1/(C_2eps - 1))``.
    """
    if not (initial.k > 0 and initial.eps > 0):
        raise ConfigError("initial k and eps must be positive")
    if not C_2eps > 1:
        raise ConfigError("C_2eps must exceed 1 for power-law decay")

    def rhs(y):
        k, e = y
        if k <= 0 or e <= 0:
            return np.zeros(2)
        return np.array([-e, -C_2eps * e * e / k])

    def guard(y, t):
        # k or eps reaching zero ends the decay; freeze rather than go negative
        return np.maximum(y, 0.0)

    traj = rk4(rhs, [initial.k, initial.eps], initial.time, dt, t_end, stride=stride, post_step=guard)
    k_ex, e_ex = decaying_closed_form(initial, C_2eps, traj.times)
    return DecayRun(traj, k_ex, e_ex, C_2eps)


def homogeneous_shear_balance(k: float, eps: float, shear_rate: float, C_mu: float) -> dict:
    """Uniform-shear production ``P_k = nu_t S^2`` and the equilibrium shear."""
    if not (k > 0 and eps > 0 and shear_rate >= 0 and C_mu > 0):
        raise ConfigError("k, eps, C_mu must be positive and the shear rate non-negative")
    nu_t = C_mu * k * k / eps
    P = nu_t * shear_rate**2
    return {
        "nu_t": nu_t,
        "production": P,
        "production_over_dissipation": P / eps,
        "equilibrium_shear": eps / (k * math.sqrt(C_mu)),
    }


def spectrum_integrals(spectrum: SpectrumSeries, nu: float, k_min=None, k_max=None) -> dict:
    """Trapezoid integrals of ``E(k)`` and ``nu k^2 E(k)`` over the sampled range."""
    if len(spectrum) == 0:
        raise ValueError("spectrum is empty")
    sub = spectrum.band(k_min, k_max)
    if len(sub) < 2:
        return {"k_total": 0.0, "eps_total": 0.0}
    return {
        "k_total": float(trapezoid(sub.E, sub.k)),
        "eps_total": float(nu * trapezoid(sub.k**2 * sub.E, sub.k)),
    }
