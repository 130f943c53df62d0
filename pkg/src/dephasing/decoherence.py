"""Vacuum, thermal and correlation parts of the qubit decoherence function.

Every time-dependent quantity has a closed-form path (exponential cutoff
only) and a quadrature path (any cutoff). Functions are vectorised over the
time argument: scalar in gives float out, array in gives array out.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .numerics import DivergenceError, QuadratureResult, integrate_semi_infinite
from .spectral import BathSpec, SpectralDensity, classify_regime
from .special_functions import hurwitz_zeta, hurwitz_zeta_finite_part, ln_abs_gamma_sq, ln_gamma_real

QUAD_REL_TOL = 1e-12
QUAD_ABS_TOL = 1e-18


class MethodError(ValueError):
    """Requested evaluation route is not available for this bath."""


def _as_density(bath) -> SpectralDensity:
    return bath.j if isinstance(bath, BathSpec) else bath


def _out(values, t):
    arr = np.asarray(values, dtype=float)
    return float(arr.reshape(-1)[0]) if np.ndim(t) == 0 else arr


def _gamma(x: float) -> float:
    """Gamma(x) for x > -1, x != 0, via the log-gamma kernel."""
    if x > 0.0:
        return math.exp(ln_gamma_real(x))
    return math.exp(ln_gamma_real(x + 1.0)) / x


def _check_closed(j: SpectralDensity) -> None:
    if not j.is_exponential:
        raise MethodError("closed forms require the exponential cutoff")


# --- integrand kernels ---------------------------------------------------

def _one_minus_cos_over_w2(w, t):
    wt = w * t
    small = wt < 1e-4
    safe_w = np.where(w == 0.0, 1.0, w)
    regular = 2.0 * np.sin(0.5 * wt) ** 2 / (safe_w * safe_w)
    taylor = 0.5 * t * t * (1.0 - wt * wt / 12.0)
    return np.where(small, taylor, regular)


def _bose(w, beta):
    return 1.0 / np.expm1(beta * w)


def _integrand(j: SpectralDensity, beta: float, t: float, kind: str):
    lam, omega_c, s, cutoff = j.lambda_s, j.Omega, j.s, j.cutoff

    def density(w):
        x = w / omega_c
        return lam * omega_c * x ** s * cutoff(x)

    if kind == "vac":
        return lambda w: density(w) * _one_minus_cos_over_w2(w, t)
    if kind == "th":
        return lambda w: 2.0 * density(w) * _bose(w, beta) * _one_minus_cos_over_w2(w, t)
    if kind == "phi":
        return lambda w: density(w) * np.sin(w * t) / (w * w)
    if kind == "dth":
        return lambda w: 2.0 * density(w) * _bose(w, beta) * np.sin(w * t) / w
    raise ValueError(kind)


def _tail_bound(j: SpectralDensity, x_upper: float, power: float) -> float:
    # int_X^inf x^p e^{-x} dx <= X^p e^{-X} / (1 - p/X) for X > p
    if not j.is_exponential or x_upper <= max(power, 0.0) + 1.0:
        return 0.0
    return j.lambda_s * 2.0 * x_upper ** power * math.exp(-x_upper) / (1.0 - max(power, 0.0) / x_upper)


def quadrature(bath, t: float, kind: str, rel_tol: float = QUAD_REL_TOL,
               abs_tol: float = QUAD_ABS_TOL) -> QuadratureResult:
    """One quadrature evaluation of kind ``vac | th | phi | dth`` at a single time."""
    j = _as_density(bath)
    beta = bath.beta if isinstance(bath, BathSpec) else math.inf
    t = float(t)
    if t == 0.0 or j.lambda_s == 0.0:
        return QuadratureResult(0.0, 0.0, 1)
    upper = j.omega_max()
    if kind in ("th", "dth"):
        if math.isinf(beta):
            return QuadratureResult(0.0, 0.0, 1)
        # Bose factor adds its own exponential decay
        from .spectral import ExponentialCutoff
        upper = min(upper, ExponentialCutoff().x_max(j.s + 2.0) / beta)
    f = _integrand(j, beta, t, kind)
    res = integrate_semi_infinite(f, oscillation_period=2.0 * math.pi / abs(t), rel_tol=rel_tol,
                                  abs_tol=abs_tol, upper=upper, scale=j.Omega)
    bound = _tail_bound(j, upper / j.Omega, j.s - 2.0) * (t * t if kind in ("vac", "th") else 1.0)
    return QuadratureResult(res.value, res.error_estimate + bound, res.segments_used)


def _quad_series(bath, t, kind, rel_tol=QUAD_REL_TOL):
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    return np.array([quadrature(bath, ti, kind, rel_tol=rel_tol).value for ti in ts.ravel()]).reshape(ts.shape)


# --- decoherence contributions -------------------------------------------

def gamma_vac(bath, t, method: str = "closed", rel_tol: float = QUAD_REL_TOL):
    """Vacuum contribution ``int J(w) (1 - cos wt) / w^2 dw``."""
    j = _as_density(bath)
    tt = np.asarray(t, dtype=float)
    if method == "quadrature":
        return _out(_quad_series(bath, tt, "vac", rel_tol), t)
    if method != "closed":
        raise MethodError(f"unknown method {method!r}")
    _check_closed(j)
    x = j.Omega * np.abs(tt)
    if j.is_ohmic:
        return _out(0.5 * j.lambda_s * np.log1p(x * x), t)
    p = j.s - 1.0
    b = -0.5 * p * np.log1p(x * x)
    a = p * np.arctan(x)
    # 1 - e^b cos a, written to avoid cancellation at small t
    bracket = -np.expm1(b) + np.exp(b) * 2.0 * np.sin(0.5 * a) ** 2
    return _out(j.lambda_s * _gamma(p) * bracket, t)


def phi(bath, t, method: str = "closed", rel_tol: float = QUAD_REL_TOL):
    """Phase function ``int J(w) sin(wt) / w^2 dw``."""
    j = _as_density(bath)
    tt = np.asarray(t, dtype=float)
    if method == "quadrature":
        return _out(_quad_series(bath, tt, "phi", rel_tol), t)
    if method != "closed":
        raise MethodError(f"unknown method {method!r}")
    _check_closed(j)
    x = j.Omega * tt
    if j.is_ohmic:
        return _out(j.lambda_s * np.arctan(x), t)
    p = j.s - 1.0
    return _out(j.lambda_s * _gamma(p) * np.exp(-0.5 * p * np.log1p(x * x)) * np.sin(p * np.arctan(x)), t)


# Below this t/beta the zeta differences cancel; a Taylor series in t/beta is used instead.
_SMALL_TAU = 0.5
_TAYLOR_TERMS = 40


def _taylor_coefficients(z: float, a: float, odd: bool) -> np.ndarray:
    """``(-1)^floor(k/2) Gamma(z + k) zeta(z + k, a) / k!`` for even k >= 2, or odd k when ``odd``."""
    out = np.empty(_TAYLOR_TERMS)
    for j in range(_TAYLOR_TERMS):
        k = 2 * j + (1 if odd else 2)
        log_c = ln_gamma_real(z + k) - math.lgamma(k + 1.0)
        out[j] = (-1.0) ** (k // 2) * math.exp(log_c) * hurwitz_zeta(z + k, a)
    return out


def _taylor_eval(coef: np.ndarray, tau: np.ndarray, odd: bool) -> np.ndarray:
    x2 = tau * tau
    acc = np.zeros_like(tau)
    for c in coef[::-1]:
        acc = acc * x2 + c
    return acc * (tau if odd else x2)


def _thermal_series(j: SpectralDensity, beta: float, tt: np.ndarray, shift: float) -> np.ndarray:
    """Exponential-cutoff thermal term; ``shift`` is 1/(Omega beta), or 0 in the low-T limit.

    The k-sum is ``sum_k Re[(k + c)^(1-s) - (k + c + i t/beta)^(1-s)]``, i.e. the
    real part of a difference of Hurwitz zeta functions with complex shift.
    """
    tau = np.abs(np.asarray(tt, dtype=float)) / beta
    lam, s = j.lambda_s, j.s
    a0 = 1.0 + shift
    z = 0.0 if j.is_ohmic else s - 1.0
    small = tau < _SMALL_TAU
    # Gamma(z) * Re[zeta(z, a) - zeta(z, a + i tau)]
    out = np.empty_like(tau)
    if np.any(small):
        # -sum_j (-1)^j Gamma(z + 2j) zeta(z + 2j, a) tau^(2j) / (2j)!, radius a > 1
        out[small] = -_taylor_eval(_taylor_coefficients(z, a0, odd=False), tau[small], odd=False)
    big = ~small
    if np.any(big):
        if j.is_ohmic:
            out[big] = ln_gamma_real(a0) - 0.5 * ln_abs_gamma_sq(a0, tau[big])
        else:
            zf = hurwitz_zeta_finite_part
            out[big] = _gamma(z) * (zf(z, a0 + 0j).real - zf(z, a0 + 1j * tau[big]).real)
    return 2.0 * lam * (j.Omega * beta) ** (1.0 - s) * out


def gamma_th(bath: BathSpec, t, method: str = "closed", rel_tol: float = QUAD_REL_TOL):
    """Thermal contribution ``2 int J(w) (1 - cos wt) / (w^2 (e^{beta w} - 1)) dw``.

    ``method="low_temp"`` drops the cutoff shift 1/(Omega beta) from the
    closed form (Omega beta >> 1); for s = 1 this is
    ``lambda ln[sinh(t/tau_B) / (t/tau_B)]`` with ``tau_B = beta/pi``.
    """
    j = bath.j
    tt = np.asarray(t, dtype=float)
    if bath.zero_temperature or j.lambda_s == 0.0:
        return _out(np.zeros_like(tt), t)
    if method == "quadrature":
        return _out(_quad_series(bath, tt, "th", rel_tol), t)
    if method == "closed":
        _check_closed(j)
        return _out(_thermal_series(j, bath.beta, tt, 1.0 / bath.omega_beta), t)
    if method == "low_temp":
        ob = bath.omega_beta
        if ob < 10.0:
            raise MethodError(f"low-temperature form needs Omega*beta >= 10, got {ob:g}")
        if ob < 50.0:
            warnings.warn(f"low-temperature form used at Omega*beta = {ob:g} < 50", stacklevel=2)
        if j.is_ohmic:
            x = np.abs(tt) / bath.tau_b
            safe = np.where(x == 0.0, 1.0, x)
            big = safe - np.log(2.0 * safe) + np.log1p(-np.exp(-2.0 * safe))
            small = np.log(np.sinh(np.minimum(safe, 20.0)) / np.minimum(safe, 20.0))
            val = np.where(x == 0.0, 0.0, np.where(x > 20.0, big, small))
            return _out(j.lambda_s * val, t)
        return _out(_thermal_series(j, bath.beta, tt, 0.0), t)
    raise MethodError(f"unknown method {method!r}")


def dgamma_th_dt(bath: BathSpec, t, method: str = "closed", rel_tol: float = QUAD_REL_TOL):
    """Time derivative ``2 int J(w) sin(wt) / (w (e^{beta w} - 1)) dw`` of the thermal term."""
    j = bath.j
    tt = np.asarray(t, dtype=float)
    if bath.zero_temperature or j.lambda_s == 0.0:
        return _out(np.zeros_like(tt), t)
    if method == "quadrature":
        return _out(_quad_series(bath, tt, "dth", rel_tol), t)
    if method != "closed":
        raise MethodError(f"unknown method {method!r}")
    _check_closed(j)
    beta, s = bath.beta, j.s
    tau = np.atleast_1d(tt / beta)
    a0 = 1.0 + 1.0 / bath.omega_beta
    # Gamma(s) * sum_k sin(s phi_k) / [(k + c)^2 + tau^2]^(s/2) = -Gamma(s) Im zeta(s, a0 + i tau)
    series = np.empty_like(tau)
    small = np.abs(tau) < _SMALL_TAU
    if np.any(small):
        series[small] = _taylor_eval(_taylor_coefficients(s, a0, odd=True), tau[small], odd=True)
    if np.any(~small):
        series[~small] = -math.exp(ln_gamma_real(s)) * hurwitz_zeta_finite_part(s, a0 + 1j * tau[~small]).imag
    pref = 2.0 * j.lambda_s * bath.omega_beta ** (1.0 - s) / beta
    out = pref * series
    return _out(out if np.ndim(t) else out[0], t)


# --- initial correlations -------------------------------------------------

@dataclass(frozen=True)
class CorrelationContext:
    """Initial population imbalance ``m = <sigma_3>`` and ``a = beta * omega0 / 2``."""

    m: float
    a: float

    def __post_init__(self):
        if not -1.0 - 1e-12 <= self.m <= 1.0 + 1e-12:
            raise ValueError("population imbalance m must lie in [-1, 1]")
        if not self.a >= 0.0:
            raise ValueError("a = beta*omega0/2 must be >= 0")

    @property
    def kappa(self) -> float:
        """(sinh a - m cosh a) / (cosh a - m sinh a), evaluated through tanh a.

        With u = 1 - tanh a = 2 / (1 + e^{2a}) and the exact 1 - m this is
        ((1 - m) - u) / ((1 - m) + m u), which keeps full precision when both
        m and tanh a are close to 1.
        """
        u = 2.0 / (1.0 + math.exp(2.0 * self.a)) if self.a < 400.0 else 0.0
        one_m = 1.0 - self.m
        den = one_m + self.m * u
        if den == 0.0:
            # m = 1 at a = inf; the coherence vanishes identically, keep the finite-a value
            return -1.0
        return (one_m - u) / den

    @classmethod
    def from_beta(cls, m: float, beta: float, omega0: float) -> "CorrelationContext":
        return cls(float(m), 0.5 * beta * omega0 if not math.isinf(beta) else math.inf)


def gamma_corr(ctx: CorrelationContext, phi_value):
    """Correlation contribution ``-1/2 ln[1 - (1 - m^2) sin^2(Phi) / (cosh a - m sinh a)^2]``.

    The log argument is evaluated as the equivalent ``cos^2 Phi + kappa^2 sin^2 Phi``,
    which has no cancellation. Returns ``inf`` where that argument is 0 (only
    possible for m = tanh a and sin^2 Phi = 1, where the coherence vanishes).
    """
    p = np.asarray(phi_value, dtype=float)
    k = ctx.kappa
    arg = np.cos(p) ** 2 + (k * np.sin(p)) ** 2
    with np.errstate(divide="ignore"):
        out = 0.0 - 0.5 * np.log(np.minimum(arg, 1.0))  # 0.0 - avoids a signed zero
    return _out(out, phi_value)


def chi(ctx: CorrelationContext, phi_series):
    """Phase shift: continuous argument of ``cos Phi + i kappa sin Phi`` along Phi.

    Satisfies ``tan chi = kappa tan Phi``. The branch is tied to Phi itself
    (chi stays in the quadrant of Phi for kappa > 0 and of -Phi for
    kappa < 0), so the unwrapping does not depend on how finely the series is
    sampled.
    """
    p = np.asarray(phi_series, dtype=float)
    k = ctx.kappa
    base = np.arctan2(k * np.sin(p), np.cos(p))
    anchor = p if k >= 0.0 else -p
    out = base + 2.0 * np.pi * np.round((anchor - base) / (2.0 * np.pi))
    return _out(out, phi_series)


# --- time-series record ---------------------------------------------------

@dataclass(frozen=True)
class DephasingBreakdown:
    """Columnar record of every decoherence contribution on a time grid."""

    t: np.ndarray
    gamma_vac: np.ndarray
    gamma_th: np.ndarray
    gamma_corr: np.ndarray
    phi: np.ndarray
    chi: np.ndarray

    @property
    def gamma(self) -> np.ndarray:
        return self.gamma_vac + self.gamma_th

    @property
    def gamma_total(self) -> np.ndarray:
        return self.gamma_vac + self.gamma_th + self.gamma_corr


def breakdown(bath: BathSpec, t, ctx: CorrelationContext | None = None,
              method: str = "auto") -> DephasingBreakdown:
    """All contributions on the grid ``t``; ``ctx=None`` means an uncorrelated start."""
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    if method == "auto":
        method = "closed" if bath.j.is_exponential else "quadrature"
    gv = np.atleast_1d(gamma_vac(bath, tt, method))
    gt = np.atleast_1d(gamma_th(bath, tt, method))
    ph = np.atleast_1d(phi(bath, tt, method))
    if ctx is None:
        gc = np.zeros_like(tt)
        ch = np.zeros_like(tt)
    else:
        gc = np.atleast_1d(gamma_corr(ctx, ph))
        ch = np.atleast_1d(chi(ctx, ph))
    return DephasingBreakdown(tt, gv, gt, gc, ph, ch)


# --- long-time behaviour --------------------------------------------------

@dataclass(frozen=True)
class LongTimeLimits:
    """t -> inf limits; ``math.inf`` for divergence, ``None`` where no limit exists."""

    gamma_vac_inf: float | None
    gamma_th_inf: float | None
    phi_inf: float | None
    gamma_corr_inf: float | None

    @property
    def gamma_inf(self) -> float | None:
        if self.gamma_vac_inf is None or self.gamma_th_inf is None:
            return None
        return self.gamma_vac_inf + self.gamma_th_inf


def _static_integral(j: SpectralDensity, beta: float, thermal: bool) -> float:
    """int J/w^2 (thermal=False) or int J/(w^2 (e^{beta w}-1)) (thermal=True); inf if divergent."""
    omega_c = j.Omega

    def f(w):
        x = w / omega_c
        val = j.lambda_s * omega_c * x ** j.s * j.cutoff(x) / (w * w)
        return val * _bose(w, beta) if thermal else val

    upper = j.omega_max()
    if thermal:
        from .spectral import ExponentialCutoff
        upper = min(upper, ExponentialCutoff().x_max(j.s + 2.0) / beta)
    try:
        return integrate_semi_infinite(f, upper=upper, scale=min(omega_c, upper),
                                       rel_tol=1e-12, abs_tol=1e-300).value
    except DivergenceError:
        return math.inf


def long_time_limits(bath: BathSpec, ctx: CorrelationContext | None = None) -> LongTimeLimits:
    j = bath.j
    s, lam = j.s, j.lambda_s
    ohmic = j.is_ohmic
    if lam == 0.0:
        return LongTimeLimits(0.0, 0.0, 0.0, 0.0)

    if ohmic or s < 1.0:
        g_vac = math.inf
    elif j.is_exponential:
        g_vac = lam * _gamma(s - 1.0)
    else:
        g_vac = _static_integral(j, math.inf, thermal=False)

    if bath.zero_temperature:
        g_th = 0.0
    elif s <= 2.0:
        g_th = math.inf
    elif j.is_exponential:
        ob = bath.omega_beta
        g_th = 2.0 * lam * ob ** (1.0 - s) * _gamma(s - 1.0) * hurwitz_zeta(s - 1.0, 1.0 + 1.0 / ob)
    else:
        g_th = 2.0 * _static_integral(j, bath.beta, thermal=True)

    if ohmic:
        phi_inf = lam * math.pi / 2.0
    elif s > 1.0:
        phi_inf = 0.0
    else:
        phi_inf = None

    if ctx is None:
        g_corr = 0.0
    elif phi_inf is None:
        g_corr = None
    else:
        g_corr = float(gamma_corr(ctx, phi_inf))
    return LongTimeLimits(g_vac, g_th, phi_inf, g_corr)


@dataclass(frozen=True)
class SufficiencyBounds:
    vac_bound: float
    th_bound: float


def sufficiency_bounds(bath: BathSpec) -> SufficiencyBounds:
    """Uniform-in-time bounds ``2 int J/w^2`` and ``4 int J/(w^2 (e^{beta w}-1))``.

    Evaluated by quadrature for any cutoff; ``inf`` when the origin panels
    show the integral diverges.
    """
    j = bath.j
    if j.lambda_s == 0.0:
        return SufficiencyBounds(0.0, 0.0)
    vac = 2.0 * _static_integral(j, math.inf, thermal=False)
    th = 0.0 if bath.zero_temperature else 4.0 * _static_integral(j, bath.beta, thermal=True)
    return SufficiencyBounds(vac, th)


def decoherence_kind(bath: BathSpec) -> str:
    return classify_regime(bath.j.s).decoherence
