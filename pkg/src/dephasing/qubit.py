"""Qubit observables: coherences, reduced density matrix, Bloch norm and entropy.

Basis convention: index 0 is |0>, index 1 is |1>, with sigma_3 |1> = |1> and
sigma_3 |0> = -|0>. Then sigma_+ = |1><0| and

    <sigma_+(t)> = <0| rho_S(t) |1> = rho[0, 1].

For a pure state a0|0> + a1|1> this gives <sigma_+> = a0 * conj(a1) and
m = <sigma_3> = |a1|^2 - |a0|^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import decoherence as dec
from .spectral import BathSpec

SIGMA_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
# Pauli matrices in the (|0>, |1>) index order, so sigma_3 = diag(-1, 1) and
# (sigma_1 + i sigma_2) / 2 = SIGMA_PLUS.
PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, 1j], [-1j, 0]], dtype=complex),
    np.array([[-1, 0], [0, 1]], dtype=complex),
)

# Below this 1 - v the entropy uses its leading expansion in (1 - v).
ENTROPY_SERIES_THRESHOLD = 1e-8


class PreparationError(ValueError):
    pass


@dataclass(frozen=True)
class PureProjector:
    """Projective preparation onto a0|0> + a1|1>, with qubit splitting omega0."""

    a0: complex
    a1: complex
    omega0: float

    def __post_init__(self):
        norm = abs(self.a0) ** 2 + abs(self.a1) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise PreparationError(f"|a0|^2 + |a1|^2 = {norm!r}, expected 1")
        if not self.omega0 > 0.0:
            raise PreparationError("omega0 must be > 0")

    @classmethod
    def normalized(cls, a0: complex, a1: complex, omega0: float) -> "PureProjector":
        n = math.sqrt(abs(a0) ** 2 + abs(a1) ** 2)
        if n == 0.0:
            raise PreparationError("zero state vector")
        return cls(complex(a0) / n, complex(a1) / n, omega0)

    @property
    def m(self) -> float:
        return abs(self.a1) ** 2 - abs(self.a0) ** 2

    @property
    def sigma_plus(self) -> complex:
        return complex(self.a0 * np.conj(self.a1))

    @property
    def ket(self) -> np.ndarray:
        return np.array([self.a0, self.a1], dtype=complex)

    @property
    def projector(self) -> np.ndarray:
        k = self.ket
        return np.outer(k, k.conj())

    def as_operators(self) -> "OperatorList":
        return OperatorList((self.projector,), self.omega0)


@dataclass(frozen=True)
class OperatorList:
    """Preparation rho(0) ~ sum_m Omega_m exp(-beta H) Omega_m^dagger."""

    ops: tuple
    omega0: float
    _stack: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        stack = np.asarray([np.asarray(o, dtype=complex) for o in self.ops])
        if stack.ndim != 3 or stack.shape[1:] != (2, 2) or stack.shape[0] == 0:
            raise PreparationError("ops must be a non-empty list of 2x2 matrices")
        if not self.omega0 > 0.0:
            raise PreparationError("omega0 must be > 0")
        if not np.any(stack):
            raise PreparationError("all preparation operators vanish")
        object.__setattr__(self, "_stack", stack)

    @property
    def stack(self) -> np.ndarray:
        return self._stack


QubitPreparation = PureProjector | OperatorList


def _a(prep, bath: BathSpec) -> float:
    return math.inf if bath.zero_temperature else 0.5 * bath.beta * prep.omega0


def correlation_context(prep: PureProjector, bath: BathSpec) -> dec.CorrelationContext:
    return dec.CorrelationContext(prep.m, _a(prep, bath))


def _phi_method(bath: BathSpec) -> str:
    return "closed" if bath.j.is_exponential else "quadrature"


def _gamma(bath: BathSpec, t):
    method = _phi_method(bath)
    return dec.gamma_vac(bath, t, method) + dec.gamma_th(bath, t, method)


def _cplx(values, t):
    arr = np.asarray(values, dtype=complex)
    return complex(arr.reshape(-1)[0]) if np.ndim(t) == 0 else arr


def coherence_uncorrelated(prep, bath: BathSpec, t, sigma_plus: complex | None = None):
    """<sigma_+(t)> = <sigma_+> e^{i omega0 t} e^{-gamma(t)} for a product initial state.

    ``sigma_plus`` overrides the initial coherence taken from ``prep``.
    """
    tt = np.asarray(t, dtype=float)
    sp = prep.sigma_plus if sigma_plus is None else complex(sigma_plus)
    out = sp * np.exp(1j * prep.omega0 * tt) * np.exp(-np.asarray(_gamma(bath, tt)))
    return _cplx(out, t)


def coherence_correlated(prep: PureProjector, bath: BathSpec, t, representation: str = "product"):
    """Coherence for the correlated projector preparation.

    ``representation="product"`` evaluates
    ``<sigma_+> e^{i omega0 t} e^{-gamma} (cos Phi + i kappa sin Phi)``;
    ``"polar"`` evaluates ``<sigma_+> e^{i(omega0 t + chi)} e^{-(gamma + gamma_corr)}``.
    """
    tt = np.asarray(t, dtype=float)
    ctx = correlation_context(prep, bath)
    ph = np.asarray(dec.phi(bath, tt, _phi_method(bath)))
    free = prep.sigma_plus * np.exp(1j * prep.omega0 * tt) * np.exp(-np.asarray(_gamma(bath, tt)))
    if representation == "product":
        out = free * (np.cos(ph) + 1j * ctx.kappa * np.sin(ph))
    elif representation == "polar":
        out = free * np.exp(1j * np.asarray(dec.chi(ctx, ph)) - np.asarray(dec.gamma_corr(ctx, ph)))
    else:
        raise ValueError(f"unknown representation {representation!r}")
    return _cplx(out, t)


def initial_bath_weights(prep: PureProjector, beta_omega0: float) -> tuple[float, float]:
    """Weights (p_-, p_+) of the displaced bath states, ~ |a0|^2 e^{a}, |a1|^2 e^{-a}, a = beta omega0 / 2."""
    w0 = abs(prep.a0) ** 2
    w1 = abs(prep.a1) ** 2 * (0.0 if math.isinf(beta_omega0) else math.exp(-beta_omega0))
    if w0 + w1 == 0.0:
        # a0 = 0 at zero temperature: only the |1> branch is populated
        return (0.0, 1.0)
    return (w0 / (w0 + w1), w1 / (w0 + w1))


def _weights(a: float) -> tuple[float, float]:
    # e^{a} and e^{-a}, rescaled by e^{-a} so nothing overflows
    return 1.0, (0.0 if math.isinf(a) else math.exp(-2.0 * a))


def _weighted_elements(prep: OperatorList, a: float):
    """Weighted sums (n0, n1, d): <0|O^+ s_+ O|0>, <1|O^+ s_+ O|1> and the partition sum D."""
    w0, w1 = _weights(a)
    stack = prep.stack
    sandwich = np.conj(np.transpose(stack, (0, 2, 1))) @ SIGMA_PLUS @ stack
    gram = np.conj(np.transpose(stack, (0, 2, 1))) @ stack
    n0 = w0 * np.sum(sandwich[:, 0, 0])
    n1 = w1 * np.sum(sandwich[:, 1, 1])
    d = w0 * np.sum(gram[:, 0, 0]).real + w1 * np.sum(gram[:, 1, 1]).real
    return complex(n0), complex(n1), float(d)


def reduced_initial_state(prep: OperatorList, bath: BathSpec) -> np.ndarray:
    """rho_S(0) = Tr_B rho(0), proportional to sum_m Omega_m diag(e^{a}, e^{-a}) Omega_m^dagger."""
    w0, w1 = _weights(_a(prep, bath))
    stack = prep.stack
    mid = np.diag([w0, w1]).astype(complex)
    rho = np.sum(stack @ mid @ np.conj(np.transpose(stack, (0, 2, 1))), axis=0)
    tr = rho.trace().real
    if not tr > 0.0:
        raise PreparationError("preparation has vanishing partition function")
    return rho / tr


def coherence_general(prep: OperatorList, bath: BathSpec, t):
    """Coherence for an arbitrary operator preparation.

    Evaluates ``e^{i omega0 t} e^{-gamma} N(Phi) / D`` with
    ``N(Phi) = sum_m [e^{a} <0|O^+ s_+ O|0> e^{i Phi} + e^{-a} <1|O^+ s_+ O|1> e^{-i Phi}]``
    and ``D = sum_m [e^{a} <0|O^+ O|0> + e^{-a} <1|O^+ O|1>]``. ``N(0)/D`` is the
    initial coherence, so this is the ratio form ``<s_+> N(Phi)/N(0)`` without
    dividing by ``N(0)``, and it is exactly zero when both numerator
    elements vanish.
    """
    tt = np.asarray(t, dtype=float)
    n0, n1, d = _weighted_elements(prep, _a(prep, bath))
    if not d > 0.0:
        raise PreparationError("preparation has vanishing partition function")
    ph = np.asarray(dec.phi(bath, tt, _phi_method(bath)))
    ratio = (n0 * np.exp(1j * ph) + n1 * np.exp(-1j * ph)) / d
    if n0 == 0 and n1 == 0:
        return _cplx(np.zeros(tt.shape, dtype=complex), t)
    out = np.exp(1j * prep.omega0 * tt) * np.exp(-np.asarray(_gamma(bath, tt))) * ratio
    return _cplx(out, t)


def effective_gamma_corr(prep: OperatorList, bath: BathSpec, t):
    """Artifact-defined correlation exponent ``-ln |N(Phi)/N(0)|`` for operator preparations.

    NaN where N(0) = 0 (no initial coherence, so no ratio exists).
    """
    tt = np.asarray(t, dtype=float)
    n0, n1, _ = _weighted_elements(prep, _a(prep, bath))
    base = n0 + n1
    if base == 0:
        return dec._out(np.full(tt.shape, np.nan), t)
    ph = np.asarray(dec.phi(bath, tt, _phi_method(bath)))
    r = np.abs((n0 * np.exp(1j * ph) + n1 * np.exp(-1j * ph)) / base)
    with np.errstate(divide="ignore"):
        out = -np.log(r)
    return dec._out(out, t)


# --- Bloch vector and entropy --------------------------------------------

def bloch_norm(prep_or_m, gamma_tilde):
    """v = [m^2 + (1 - m^2) e^{-2 gamma_tilde}]^{1/2}."""
    m = prep_or_m.m if hasattr(prep_or_m, "m") else float(prep_or_m)
    g = np.asarray(gamma_tilde, dtype=float)
    m2 = min(m * m, 1.0)
    out = np.sqrt(m2 + (1.0 - m2) * np.exp(-2.0 * g))
    return dec._out(np.clip(out, abs(m), 1.0), gamma_tilde)


def entropy(v):
    """von Neumann entropy of a qubit with Bloch norm v.

    ``ln 2 - (1+v)/2 ln(1+v) - (1-v)/2 ln(1-v)``, written as
    ``-q ln q - p ln p`` with q = (1-v)/2, p = (1+v)/2 and ``ln p = log1p(-q)``.
    For 1 - v below ENTROPY_SERIES_THRESHOLD the leading terms
    ``q (1 - ln q)`` are used; the neglected part is O(q^2).
    """
    vv = np.asarray(v, dtype=float)
    if np.any(np.isnan(vv)) or np.any(vv < -1e-12) or np.any(vv > 1.0 + 1e-12):
        raise ValueError("Bloch norm must lie in [0, 1]")
    vv = np.clip(vv, 0.0, 1.0)
    q = 0.5 * (1.0 - vv)
    safe_q = np.where(q > 0.0, q, 0.5)
    exact = -safe_q * np.log(safe_q) - (1.0 - safe_q) * np.log1p(-safe_q)
    series = safe_q * (1.0 - np.log(safe_q))
    out = np.where(q == 0.0, 0.0, np.where(1.0 - vv < ENTROPY_SERIES_THRESHOLD, series, exact))
    return dec._out(out, v)


def entropy_limit(prep: PureProjector, bath: BathSpec, correlated: bool = True) -> float:
    """t -> inf entropy: entropy(|m|) when the total decoherence function diverges, else entropy(v_inf)."""
    ctx = correlation_context(prep, bath) if correlated else None
    lim = dec.long_time_limits(bath, ctx)
    g = lim.gamma_inf
    if g is None or math.isinf(g) or lim.gamma_corr_inf is None:
        # no finite limit: |<sigma_+>| -> 0 (s <= 2 at T > 0), or no limit at all
        return float(entropy(abs(prep.m)))
    g_tilde = g + lim.gamma_corr_inf
    if math.isinf(g_tilde):
        return float(entropy(abs(prep.m)))
    return float(entropy(bloch_norm(prep, g_tilde)))


def exp_form(v: float) -> tuple[float, float]:
    """(prefactor, u) with rho = prefactor * exp(u sigma . n), valid for v < 1."""
    v = float(v)
    if not 0.0 <= v < 1.0:
        raise ValueError("exponential form requires 0 <= v < 1")
    return 0.5 * math.sqrt((1.0 - v) * (1.0 + v)), math.atanh(v)


def exp_form_matrix(bloch: Sequence[float]) -> np.ndarray:
    """Rebuild rho = prefactor (cosh u + sinh u sigma . n) from a Bloch vector."""
    vec = np.asarray(bloch, dtype=float)
    v = float(np.linalg.norm(vec))
    pref, u = exp_form(v)
    eye = np.eye(2, dtype=complex)
    if v == 0.0:
        return pref * eye
    n = vec / v
    sn = sum(c * p for c, p in zip(n, PAULI))
    return pref * (math.cosh(u) * eye + math.sinh(u) * sn)


def standard_form_matrix(bloch: Sequence[float]) -> np.ndarray:
    vec = np.asarray(bloch, dtype=float)
    return 0.5 * (np.eye(2, dtype=complex) + sum(c * p for c, p in zip(vec, PAULI)))


# --- assembled state ------------------------------------------------------

@dataclass(frozen=True)
class QubitStateAtTime:
    t: float
    rho: np.ndarray
    v: float
    entropy: float
    coherence: complex


def _initial_rho(prep, bath: BathSpec) -> np.ndarray:
    if isinstance(prep, PureProjector):
        return prep.projector
    return reduced_initial_state(prep, bath)


def state_at(prep, bath: BathSpec, t: float, correlated: bool = True) -> QubitStateAtTime:
    """Reduced density matrix at time t; populations are frozen at their t = 0 values."""
    rho0 = _initial_rho(prep, bath)
    if isinstance(prep, OperatorList):
        c = coherence_general(prep, bath, float(t))
    elif correlated:
        c = coherence_correlated(prep, bath, float(t))
    else:
        c = coherence_uncorrelated(prep, bath, float(t))
    rho = np.array([[rho0[0, 0].real, c], [np.conj(c), rho0[1, 1].real]], dtype=complex)
    m = float(rho0[1, 1].real - rho0[0, 0].real)
    v = min(1.0, math.sqrt(m * m + 4.0 * abs(c) ** 2))
    return QubitStateAtTime(float(t), rho, v, float(entropy(v)), complex(c))


def bloch_vector(rho: np.ndarray) -> np.ndarray:
    return np.array([np.trace(rho @ p).real for p in PAULI])
