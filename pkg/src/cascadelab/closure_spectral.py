"""Fourier-space evaluation of the fractional closure and its spectra.

The closed steady problem is diagonal in Fourier space::

    (nu |k|^2 + C0 eps^(2/3) |k|^(2/3)) U(k) = F(k)

Everything here is a pointwise multiplier on a periodic 1D grid; the formulas
depend only on ``|k|`` so the scaling content carries over to radial 3D.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from cascadelab.errors import ConfigError
from cascadelab.spectrum import SpectrumSeries


@dataclass(frozen=True)
class ClosureParams:
    nu: float = 1e-3
    epsilon: float = 1.0
    C0: float = 0.12
    hausdorff_dim: float = 7.0 / 3.0

    def __post_init__(self):
        if not self.nu >= 0:
            raise ConfigError("nu must be non-negative")
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be positive")
        if not self.C0 > 0:
            raise ConfigError("C0 must be positive")
        if not 0 < self.hausdorff_dim <= 3:
            raise ConfigError("hausdorff_dim must lie in (0, 3]")

    @property
    def cascade_coefficient(self) -> float:
        """``C0 eps^(2/3)``, the singular-source strength."""
        return self.C0 * self.epsilon ** (2.0 / 3.0)


@dataclass(frozen=True)
class FourierField1D:
    k: np.ndarray  # FFT ordering
    coeffs: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float)
        c = np.asarray(self.coeffs, dtype=complex)
        if k.shape != c.shape or k.ndim != 1:
            raise ValueError("k and coeffs must be 1-D arrays of equal length")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, n: int, length: float = 2 * math.pi) -> "FourierField1D":
        # exact integer mode numbers, so k is exact when length == 2*pi
        m = np.rint(np.fft.fftfreq(n) * n)
        return cls(m * (2 * math.pi / length), np.zeros(n, dtype=complex))

    def with_coeffs(self, coeffs) -> "FourierField1D":
        return FourierField1D(self.k, coeffs)

    def is_hermitian(self, rtol=1e-14) -> bool:
        c = self.coeffs
        mirrored = np.conj(c[(-np.arange(c.size)) % c.size])
        scale = max(float(np.max(np.abs(c))), 1e-300)
        return bool(np.max(np.abs(c - mirrored)) <= rtol * scale)


def band_forcing(n: int, length: float = 2 * math.pi, k_lo: float = 1.0, k_hi: float | None = None) -> FourierField1D:
    """Unit forcing on ``k_lo <= |k| <= k_hi`` (default ``k_max/4``), zero elsewhere."""
    field = FourierField1D.zeros(n, length)
    kabs = np.abs(field.k)
    if k_hi is None:
        k_hi = kabs.max() / 4
    return field.with_coeffs(((kabs >= k_lo) & (kabs <= k_hi)).astype(complex))


def fractional_laplacian_apply(field: FourierField1D, order: float) -> FourierField1D:
    """Multiply by ``|k|^(2*order)``; the zero mode maps to zero."""
    if not order > 0:
        raise ConfigError("order must be positive")
    kabs = np.abs(field.k)
    mult = np.zeros_like(kabs)
    nz = kabs > 0
    # scalar libm pow: numpy's vectorised pow can be an ulp off
    e = 2 * order
    mult[nz] = [math.pow(v, e) for v in kabs[nz]]
    return field.with_coeffs(field.coeffs * mult)


def closure_denominator(k, params: ClosureParams):
    kabs = np.abs(np.asarray(k, dtype=float))
    return params.nu * kabs**2 + params.cascade_coefficient * kabs ** (2.0 / 3.0)


def steady_spectral_solution(forcing: FourierField1D, params: ClosureParams) -> FourierField1D:
    zero = forcing.k == 0
    if np.any(forcing.coeffs[zero] != 0):
        raise ConfigError("forcing has a nonzero k=0 component; the steady solution is undefined there")
    denom = closure_denominator(forcing.k, params)
    out = np.zeros_like(forcing.coeffs)
    nz = ~zero
    out[nz] = forcing.coeffs[nz] / denom[nz]
    return forcing.with_coeffs(out)


def crossover_wavenumber(params: ClosureParams) -> float:
    """Wavenumber where ``nu k^2 == C0 eps^(2/3) k^(2/3)``."""
    if params.nu == 0:
        raise ConfigError("no viscous crossover for nu = 0")
    return (params.cascade_coefficient / params.nu) ** 0.75


def energy_spectrum_raw(solution: FourierField1D) -> SpectrumSeries:
    """``E(k) = k^2 |U(k)|^2 / 2`` on the positive modes, sorted by k."""
    pos = solution.k > 0
    k = solution.k[pos]
    order = np.argsort(k)
    k = k[order]
    E = 0.5 * k**2 * np.abs(solution.coeffs[pos][order]) ** 2
    return SpectrumSeries(k, E, "closure: k^2|U|^2/2")


def hausdorff_corrected_spectrum(raw: SpectrumSeries, params: ClosureParams, exponent: float | None = None) -> SpectrumSeries:
    """Apply the dimension-deficit factor ``k^(-exponent)`` (default ``hausdorff_dim``).

    With the default 7/3 the inertial band turns from ``k^(2/3)`` into
    ``k^(-5/3)``.  Kept as a separate stage so raw and corrected spectra can
    both be emitted.
    """
    if exponent is None:
        exponent = params.hausdorff_dim
    meta = dict(raw.metadata, correction_exponent=exponent)
    return SpectrumSeries(raw.k, raw.E * raw.k ** (-exponent), raw.source_tag + f" * k^-{exponent:g}", meta)


def transient_solution(u0_amplitude: float, params: ClosureParams, t_star: float, t: float) -> float:
    """Near-critical-time factor ``exp(-C0 eps^(2/3) (T* - t)^(2/3))``.

    Returns the multiplier only; the field is ``u0_amplitude * factor``.  The
    factor grows toward 1 as ``t -> T*``.
    """
    if not math.isfinite(u0_amplitude):
        raise ConfigError("u0_amplitude must be finite")
    if t < 0:
        raise ConfigError("t must be non-negative")
    if t > t_star:
        raise ConfigError(f"t={t} lies beyond T*={t_star}; the formula is defined on [0, T*]")
    return math.exp(-params.cascade_coefficient * (t_star - t) ** (2.0 / 3.0))


def hausdorff_from_exponent(zeta: float) -> float:
    """Singular-set dimension ``3 - (zeta - 1)`` for a spectrum ``E ~ k^-zeta``.

    Evaluated as ``(12 - 3 zeta)/3`` so exponents in thirds map to exact results.
    """
    return (12.0 - 3.0 * zeta) / 3.0


def inertial_prefactor_exponent(params: ClosureParams, k: float = 1.0, factor: float = 10.0) -> float:
    """Measured power of ``eps`` in the inviscid raw spectrum at fixed ``k``.

    Substituting the steady solution gives ``E ~ eps^(-4/3)``.
    """
    lo = ClosureParams(0.0, params.epsilon, params.C0, params.hausdorff_dim)
    hi = ClosureParams(0.0, params.epsilon * factor, params.C0, params.hausdorff_dim)
    e_lo = 0.5 * k**2 / closure_denominator(k, lo) ** 2
    e_hi = 0.5 * k**2 / closure_denominator(k, hi) ** 2
    return math.log(e_hi / e_lo) / math.log(factor)
