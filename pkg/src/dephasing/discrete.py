"""Finite-mode bath: Gauss-Legendre modes whose weighted sums replace the continuum integrals.

A mode list {(w_k, 4|g_k|^2)} reproduces ``int J(w) f(w) dw`` as
``sum_k weight_k f(w_k)``. The discrete sums are then evaluated term by term,
with no closed forms, so they give an independent check of both the closed
and the quadrature routes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral import SpectralDensity


@dataclass(frozen=True)
class DiscreteBath:
    omega: np.ndarray
    weight: np.ndarray  # 4 |g_k|^2

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=float)
        g = np.asarray(self.weight, dtype=float)
        if w.ndim != 1 or w.shape != g.shape or w.size == 0:
            raise ValueError("omega and weight must be matching non-empty 1-d arrays")
        if np.any(w <= 0.0) or np.any(np.diff(w) <= 0.0):
            raise ValueError("mode frequencies must be positive and strictly increasing")
        if np.any(g < 0.0):
            raise ValueError("mode weights must be >= 0")
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "weight", g)

    def __len__(self):
        return self.omega.size

    @property
    def couplings(self) -> np.ndarray:
        """|g_k| from weight_k = 4 |g_k|^2 (real, nonnegative gauge)."""
        return 0.5 * np.sqrt(self.weight)

    @property
    def recurrence_time(self) -> float:
        """2 pi / (largest node spacing); the sums stop tracking the continuum beyond this scale."""
        if self.omega.size < 2:
            return math.inf
        return 2.0 * math.pi / float(np.max(np.diff(self.omega)))

    def integrate(self, f) -> float:
        return float(np.sum(self.weight * f(self.omega)))


def default_omega_max(j: SpectralDensity) -> float:
    return j.Omega * max(40.0, 10.0 + 5.0 * j.s)


def default_power(j) -> float:
    """Node-map exponent: 1 for s >= 1, 1/s below, which makes J(w) w^{-1} dw regular in y."""
    s = getattr(j, "s", 1.0)
    return 1.0 if s >= 1.0 else 1.0 / s


def discretize(j, K: int, omega_max: float | None = None, power: float | None = None) -> DiscreteBath:
    """K-point Gauss-Legendre rule on [0, omega_max] with weight_k = w_k J(w_k).

    Nodes are placed by ``w = omega_max * y**power`` with Gauss-Legendre in
    y on [0, 1] (the Jacobian is folded into the weights). ``power=1`` is the
    plain rule. Sums like ``sum weight_k / w_k^2`` behave as w^(s-1) at the
    origin, which the plain rule resolves slowly for s < 1; the default
    power 1/s makes them smooth in y. ``j`` may be any callable J(w).
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if omega_max is None:
        omega_max = default_omega_max(j)
    if not omega_max > 0.0:
        raise ValueError("omega_max must be > 0")
    if power is None:
        power = default_power(j)
    if not power >= 1.0:
        raise ValueError("power must be >= 1")
    x, w = np.polynomial.legendre.leggauss(int(K))
    y = 0.5 * (x + 1.0)
    nodes = omega_max * y ** power
    jac = 0.5 * omega_max * power * y ** (power - 1.0)
    return DiscreteBath(nodes, w * jac * np.asarray(j(nodes), dtype=float))


def _coth_half(beta: float, w: np.ndarray) -> np.ndarray:
    if math.isinf(beta):
        return np.ones_like(w)
    return 1.0 / np.tanh(0.5 * beta * w)


def _times(t):
    return np.atleast_1d(np.asarray(t, dtype=float))


def _out(vals, t):
    return float(vals[0]) if np.ndim(t) == 0 else vals.reshape(np.shape(t))


def gamma_discrete(bath: DiscreteBath, beta: float, t):
    """sum_k weight_k coth(beta w_k / 2) (1 - cos w_k t) / w_k^2."""
    tt = _times(t)
    w = bath.omega
    coef = bath.weight * _coth_half(beta, w) / (w * w)
    kern = 2.0 * np.sin(0.5 * np.outer(tt.ravel(), w)) ** 2
    return _out(kern @ coef, t)


def phi_discrete(bath: DiscreteBath, t):
    """sum_k weight_k sin(w_k t) / w_k^2."""
    tt = _times(t)
    w = bath.omega
    return _out(np.sin(np.outer(tt.ravel(), w)) @ (bath.weight / (w * w)), t)


def alpha_k(bath: DiscreteBath, t) -> np.ndarray:
    """Mode displacements alpha_k(t) = 2 g_k (1 - e^{i w_k t}) / w_k, shape (len(t), K)."""
    tt = _times(t)
    w = bath.omega
    out = 2.0 * bath.couplings * (-np.expm1(1j * np.outer(tt.ravel(), w))) / w
    return out[0] if np.ndim(t) == 0 else out


def gamma_from_alpha(bath: DiscreteBath, beta: float, t):
    """(1/2) sum_k |alpha_k|^2 coth(beta w_k / 2), the single-mode displaced-thermal average."""
    a = np.atleast_2d(alpha_k(bath, t))
    vals = 0.5 * (np.abs(a) ** 2) @ _coth_half(beta, bath.omega)
    return _out(vals, t)
