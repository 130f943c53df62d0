"""Bath spectral densities ``J(w) = lambda_s * Omega^(1-s) * w^s * F(w / Omega)``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from .numerics import integrate_semi_infinite
from .special_functions import ln_gamma_real

OHMIC_TOLERANCE = 1e-9

# Relative size of the discarded high-frequency tail of J * kernel.
_TAIL_TARGET = 1e-18


@dataclass(frozen=True)
class ExponentialCutoff:
    """F(x) = exp(-x)."""

    name = "exponential"

    def __call__(self, x):
        return np.exp(-np.asarray(x, dtype=float))

    def x_max(self, power: float) -> float:
        # smallest x >= 40 with x^power e^{-x} below the tail target
        x = 40.0
        while power * math.log(x) - x > math.log(_TAIL_TARGET):
            x += 5.0
        return x


@dataclass(frozen=True)
class TabulatedCutoff:
    """Cutoff function given as samples ``(x_i, F_i)`` with ``x_0 = 0`` and ``F_0 = 1``.

    Monotone (PCHIP) cubic interpolation of ``log F`` between samples, which
    keeps F positive and is exact for exponential segments; beyond the last
    sample F decays exponentially with the rate set by the last two samples.
    The abscissae are meant to be log-spaced after the origin.
    """

    x: tuple[float, ...]
    values: tuple[float, ...]
    decay_threshold: float = 1e-6
    name = "tabulated"
    _interp: PchipInterpolator = field(init=False, repr=False, compare=False)
    _rate: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if x.ndim != 1 or x.shape != v.shape or x.size < 3:
            raise ValueError("tabulated cutoff needs >= 3 matching (x, F) samples")
        if np.any(np.diff(x) <= 0.0) or x[0] != 0.0:
            raise ValueError("abscissae must start at 0 and increase strictly")
        if abs(v[0] - 1.0) > 1e-9:
            raise ValueError(f"cutoff must satisfy F(0) = 1, got {v[0]!r}")
        if np.any(v <= 0.0):
            raise ValueError("tabulated cutoff values must be positive")
        if v[-1] >= self.decay_threshold:
            raise ValueError(f"last sample F={v[-1]:.3g} does not fall below {self.decay_threshold:g}")
        rate = math.log(v[-2] / v[-1]) / (x[-1] - x[-2])
        if not rate > 0.0:
            raise ValueError("tabulated cutoff must be decreasing at its last samples")
        object.__setattr__(self, "_interp", PchipInterpolator(x, np.log(v), extrapolate=False))
        object.__setattr__(self, "_rate", rate)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inside = x <= self.x[-1]
        out = np.empty_like(x)
        out[inside] = np.exp(self._interp(x[inside]))
        out[~inside] = self.values[-1] * np.exp(-self._rate * (x[~inside] - self.x[-1]))
        return out

    def x_max(self, power: float) -> float:
        x = max(self.x[-1], 1.0)
        while power * math.log(x) + math.log(float(self(np.array(x)))) > math.log(_TAIL_TARGET):
            x *= 1.25
        return x


Cutoff = ExponentialCutoff | TabulatedCutoff


@dataclass(frozen=True)
class SpectralDensity:
    lambda_s: float
    s: float
    Omega: float
    cutoff: Cutoff = field(default_factory=ExponentialCutoff)

    def __post_init__(self):
        if not self.lambda_s >= 0.0:
            raise ValueError("coupling lambda_s must be >= 0")
        if not self.s > 0.0:
            raise ValueError("ohmicity exponent s must be > 0")
        if not self.Omega > 0.0:
            raise ValueError("cutoff frequency Omega must be > 0")

    @property
    def is_exponential(self) -> bool:
        return isinstance(self.cutoff, ExponentialCutoff)

    @property
    def is_ohmic(self) -> bool:
        return abs(self.s - 1.0) < OHMIC_TOLERANCE

    def __call__(self, omega):
        return evaluate(self, omega)

    def omega_max(self) -> float:
        """Frequency beyond which ``J(w) * w^2`` is negligible relative to its bulk."""
        return self.Omega * self.cutoff.x_max(self.s + 2.0)


@dataclass(frozen=True)
class BathSpec:
    """Spectral density plus inverse temperature; ``beta = inf`` is zero temperature."""

    j: SpectralDensity
    beta: float = math.inf

    def __post_init__(self):
        if not self.beta > 0.0:
            raise ValueError("inverse temperature beta must be > 0 (use inf for T = 0)")

    @property
    def zero_temperature(self) -> bool:
        return math.isinf(self.beta)

    @property
    def omega_beta(self) -> float:
        return self.j.Omega * self.beta

    @property
    def tau_b(self) -> float:
        """Thermal correlation time beta / pi."""
        return self.beta / math.pi


def evaluate(j: SpectralDensity, omega):
    """J(omega) for omega >= 0; scalar in, float out."""
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0.0):
        raise ValueError("spectral density is defined for omega >= 0")
    x = w / j.Omega
    out = j.lambda_s * j.Omega * x ** j.s * j.cutoff(x)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Regime:
    kind: str         # subohmic | ohmic | superohmic
    decoherence: str  # complete | incomplete


def classify_regime(s: float) -> Regime:
    if not s > 0.0:
        raise ValueError("s must be > 0")
    if abs(s - 1.0) < OHMIC_TOLERANCE:
        kind = "ohmic"
    elif s < 1.0:
        kind = "subohmic"
    else:
        kind = "superohmic"
    return Regime(kind, "complete" if s <= 2.0 else "incomplete")


def reorganization_shift(j: SpectralDensity, method: str = "auto") -> float:
    """Static shift ``(1/4) int J(w)/w dw`` of the displaced bath Hamiltonians.

    Exponential cutoff: ``lambda_s Gamma(s) Omega / 4``. Raises
    DivergenceError if the integral does not converge.
    """
    if j.lambda_s == 0.0:
        return 0.0
    if method == "auto":
        method = "closed" if j.is_exponential else "quadrature"
    if method == "closed":
        if not j.is_exponential:
            raise ValueError("closed form needs the exponential cutoff")
        return j.lambda_s * math.exp(ln_gamma_real(j.s)) * j.Omega / 4.0
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")

    def integrand(w):
        x = w / j.Omega
        return j.lambda_s * x ** (j.s - 1.0) * j.cutoff(x)

    res = integrate_semi_infinite(integrand, upper=j.omega_max(), scale=j.Omega, rel_tol=1e-12)
    return 0.25 * res.value


def tabulated_from_function(fn, x_points: Sequence[float]) -> TabulatedCutoff:
    """Sample a cutoff function at ``0`` and the given positive abscissae."""
    xs = (0.0, *[float(x) for x in x_points])
    return TabulatedCutoff(xs, tuple(float(fn(x)) for x in xs))
