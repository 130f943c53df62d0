"""Log-gamma and Hurwitz zeta kernels used by the closed-form decoherence functions.

Only the parameter ranges needed by the exponential-cutoff formulas are
supported: real log-gamma on the positive axis, ``ln|Gamma(x + iy)|^2`` for
real ``x`` off the poles, and the Hurwitz zeta function for real order with
real or complex shift.
"""

from __future__ import annotations

import math

import numpy as np

# Lanczos approximation, g = 7, n = 9. Relative accuracy ~1e-15 for Gamma(x), x >= 0.5.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

# Bernoulli numbers B_2 .. B_20.
_BERNOULLI = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
)

_HALF_LN_2PI = 0.5 * math.log(2.0 * math.pi)

# Real part is shifted above this value before the Stirling series is used.
STIRLING_THRESHOLD = 10.0


def _lanczos_ln_gamma(x: float) -> float:
    x = x - 1.0
    acc = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return _HALF_LN_2PI + (x + 0.5) * math.log(t) - t + math.log(acc)


def ln_gamma_real(x: float) -> float:
    """Natural log of Gamma(x) for x > 0.

    Uses the Lanczos series for x >= 0.5 and the reflection formula below.
    """
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise ValueError(f"ln_gamma_real requires a finite x > 0, got {x!r}")
    if x < 0.5:
        # Gamma(x) Gamma(1 - x) = pi / sin(pi x)
        return math.log(math.pi / math.sin(math.pi * x)) - _lanczos_ln_gamma(1.0 - x)
    return _lanczos_ln_gamma(x)


def _stirling_ln_gamma(z):
    """Stirling series for complex log-gamma, accurate for |z| >= STIRLING_THRESHOLD."""
    z = np.asarray(z, dtype=complex)
    inv = 1.0 / z
    inv2 = inv * inv
    series = np.zeros_like(z)
    power = inv
    for k, b in enumerate(_BERNOULLI, start=1):
        series = series + b / (2 * k * (2 * k - 1)) * power
        power = power * inv2
    return (z - 0.5) * np.log(z) - z + _HALF_LN_2PI + series


def ln_abs_gamma_sq(x, y):
    """``ln |Gamma(x + i y)|^2``, vectorised over broadcastable ``x`` and ``y``.

    The real part is shifted above ``STIRLING_THRESHOLD`` with the recurrence
    ``|Gamma(z + 1)|^2 = |z|^2 |Gamma(z)|^2`` and the Stirling series is
    applied to the shifted argument.
    """
    x_arr, y_arr = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if not (np.all(np.isfinite(x_arr)) and np.all(np.isfinite(y_arr))):
        raise ValueError("ln_abs_gamma_sq requires finite arguments")
    on_pole = (y_arr == 0.0) & (x_arr <= 0.0) & (x_arr == np.round(x_arr))
    if np.any(on_pole):
        raise ValueError("ln_abs_gamma_sq: pole of Gamma at a nonpositive integer")

    shifts = np.maximum(0, np.ceil(STIRLING_THRESHOLD - x_arr)).astype(int)
    correction = np.zeros(x_arr.shape)
    for k in range(int(shifts.max(initial=0))):
        active = shifts > k
        xk = x_arr + k
        correction = correction + np.where(active, np.log(xk * xk + y_arr * y_arr), 0.0)
    z = (x_arr + shifts) + 1j * y_arr
    out = 2.0 * _stirling_ln_gamma(z).real - correction
    return float(out) if out.ndim == 0 else out


def _expm1_over(w):
    """(exp(w) - 1) / w for complex w, continuous at w = 0."""
    w = np.asarray(w, dtype=complex)
    small = np.abs(w) < 1e-5
    safe = np.where(small, 1.0, w)
    half = 0.5 * safe.imag
    rotate_m1 = 2j * np.sin(half) * np.exp(1j * half)
    big = np.expm1(safe.real) * np.exp(1j * safe.imag) + rotate_m1
    taylor = 1.0 + w / 2.0 + w * w / 6.0 + w * w * w / 24.0
    return np.where(small, taylor, big / safe)


def _em_shift(z: float, re_a_min: float) -> int:
    return max(0, math.ceil(15.0 + abs(z) - re_a_min))


def hurwitz_zeta_finite_part(z: float, a):
    """``zeta(z, a) - 1/(z - 1)`` for real order ``z`` and complex shift ``a``.

    The subtracted pole term is real, so real-part differences and imaginary
    parts are unaffected; the finite part is analytic through ``z = 1``, where
    it equals ``-digamma(a)``. Evaluated by Euler-Maclaurin summation: a direct
    sum of the first N terms, the integral tail, and ten Bernoulli corrections.
    Requires ``Re a > 0``.
    """
    z = float(z)
    a_arr = np.asarray(a, dtype=complex)
    if np.any(a_arr.real <= 0.0):
        raise ValueError("hurwitz_zeta_finite_part requires Re(a) > 0")
    return _euler_maclaurin(z, a_arr, pole_removed=True)


def _euler_maclaurin(z: float, a_arr, pole_removed: bool):
    n_direct = _em_shift(z, float(a_arr.real.min(initial=np.inf)) if a_arr.size else 1.0)
    k = np.arange(n_direct, dtype=float).reshape((-1,) + (1,) * a_arr.ndim)
    direct = np.sum(np.exp(-z * np.log(k + a_arr)), axis=0) if n_direct else np.zeros_like(a_arr)

    big = n_direct + a_arr
    log_big = np.log(big)
    if pole_removed:
        # (big^(1-z) - 1) / (z - 1), i.e. the integral tail with its pole removed.
        tail = -log_big * _expm1_over((1.0 - z) * log_big)
    else:
        tail = np.exp((1.0 - z) * log_big) / (z - 1.0)
    tail = tail + 0.5 * np.exp(-z * log_big)

    inv2 = 1.0 / (big * big)
    power = np.exp(-(z + 1.0) * log_big)
    rising = z
    fact = 2.0
    for j, b in enumerate(_BERNOULLI, start=1):
        tail = tail + b / fact * rising * power
        rising *= (z + 2 * j - 1) * (z + 2 * j)
        fact *= (2 * j + 1) * (2 * j + 2)
        power = power * inv2
    out = direct + tail
    return complex(out) if out.ndim == 0 else out


def hurwitz_zeta(z: float, v: float) -> float:
    """Generalized Riemann zeta function ``sum_{n>=0} (n + v)^(-z)`` for z > 1, v > 0."""
    z = float(z)
    v = float(v)
    if not (z > 1.0 and v > 0.0 and math.isfinite(z) and math.isfinite(v)):
        raise ValueError(f"hurwitz_zeta requires z > 1 and v > 0, got z={z!r}, v={v!r}")
    # summed directly: adding 1/(z - 1) back to the finite part cancels digits when zeta is small
    return float(_euler_maclaurin(z, np.asarray(v, dtype=complex), pole_removed=False).real)
