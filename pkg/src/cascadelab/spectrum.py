"""Spectrum samples and log-log power-law fits."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SpectrumSeries:
    """Ordered ``(k, E(k))`` samples tagged with the formula that produced them."""

    k: np.ndarray
    E: np.ndarray
    source_tag: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float)
        E = np.asarray(self.E, dtype=float)
        if k.shape != E.shape or k.ndim != 1:
            raise ValueError("k and E must be 1-D arrays of equal length")
        if k.size > 1 and np.any(np.diff(k) <= 0):
            raise ValueError("wavenumbers must be strictly increasing")
        if np.any(E < 0):
            raise ValueError("spectrum values must be non-negative")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "E", E)

    def __len__(self):
        return self.k.size

    def band(self, k_min=None, k_max=None) -> "SpectrumSeries":
        lo = -np.inf if k_min is None else k_min
        hi = np.inf if k_max is None else k_max
        sel = (self.k >= lo) & (self.k <= hi)
        return SpectrumSeries(self.k[sel], self.E[sel], self.source_tag, dict(self.metadata))


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    residual: float  # RMS misfit in ln E
    n_samples: int


def fit_loglog_slope(series: SpectrumSeries, k_min=None, k_max=None) -> SlopeFit:
    """Ordinary least squares of ln E against ln k over ``[k_min, k_max]``."""
    sub = series.band(k_min, k_max)
    if len(sub) < 3:
        raise ValueError(f"need at least 3 samples in band, got {len(sub)}")
    if np.any(sub.E <= 0):
        raise ValueError("cannot take logarithm of non-positive spectrum values in band")
    x = np.log(sub.k)
    y = np.log(sub.E)
    A = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    return SlopeFit(float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))), len(sub))
