"""Quadrature, series summation and Abel-limit engines.

All integrands are vectorised callables ``f(x: ndarray) -> ndarray``. Every
rule here is deterministic: for fixed inputs and tolerances the same panels
are visited in the same order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

ArrayFn = Callable[[np.ndarray], np.ndarray]

_EPS = np.finfo(float).eps

# 7-point Gauss / 15-point Kronrod on [-1, 1] (QUADPACK qk15 tables).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_W = np.zeros(15)
for _i, _w in zip((1, 3, 5), _WG[:3]):
    _GAUSS_W[_i] = _w
    _GAUSS_W[14 - _i] = _w
_GAUSS_W[7] = _WG[3]


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class DivergenceError(QuadratureError):
    """The integral does not converge (e.g. a non-integrable origin singularity)."""


class SeriesTruncationError(RuntimeError):
    """Series did not reach its tolerance before ``k_max`` terms."""


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    segments_used: int

    def __post_init__(self):
        if not self.error_estimate >= 0.0:
            raise ValueError("error_estimate must be nonnegative")
        if self.segments_used < 1:
            raise ValueError("segments_used must be >= 1")


def _gk15(f: ArrayFn, lo: np.ndarray, hi: np.ndarray):
    """Kronrod value, QUADPACK-style error and rounding floor for each panel."""
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = centre[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(f(x), dtype=float)
    if fx.shape != x.shape:
        fx = np.broadcast_to(fx, x.shape)
    if not np.all(np.isfinite(fx)):
        raise QuadratureError("integrand returned a non-finite value")
    kron = half * (fx @ _KRONROD_W)
    gauss = half * (fx @ _GAUSS_W)
    resabs = np.abs(half) * (np.abs(fx) @ _KRONROD_W)
    mean = kron / np.where(half == 0.0, 1.0, 2.0 * half)
    resasc = np.abs(half) * (np.abs(fx - mean[:, None]) @ _KRONROD_W)
    err = np.abs(kron - gauss)
    scaled = np.where(
        (resasc > 0.0) & (err > 0.0),
        resasc * np.minimum(1.0, (200.0 * err / np.where(resasc > 0.0, resasc, 1.0)) ** 1.5),
        err,
    )
    floor = 50.0 * _EPS * resabs
    return kron, np.maximum(scaled, floor), floor


def _adaptive(f: ArrayFn, lo: np.ndarray, hi: np.ndarray, rel_tol: float, abs_tol: float,
              max_segments: int, extra_value: float = 0.0):
    """Globally adaptive bisection over an initial panel set, fully vectorised.

    ``extra_value`` is a contribution computed elsewhere that enters the
    relative tolerance. Returns (value, error, panel_count).
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    val, err, floor = _gk15(f, lo, hi)
    while True:
        total = float(np.sum(val)) + extra_value
        tol = max(abs_tol, rel_tol * abs(total))
        total_err = float(np.sum(err))
        # panels already at the rounding floor cannot be improved by bisection
        improvable = err > 2.0 * floor
        if total_err <= tol or not np.any(improvable):
            return float(np.sum(val)), total_err, lo.size
        if lo.size >= max_segments:
            raise QuadratureError(
                f"segment cap {max_segments} reached with error {total_err:.3e} > tol {tol:.3e}"
            )
        # bisect the largest-error panels until the untouched remainder fits in tol/2
        order = np.argsort(-np.where(improvable, err, -1.0), kind="stable")
        remaining = total_err - np.cumsum(err[order])
        n_split = int(np.searchsorted(-remaining, -0.5 * tol, side="left")) + 1
        n_split = min(n_split, int(np.count_nonzero(improvable)), max_segments - lo.size)
        n_split = max(n_split, 1)
        pick = np.zeros(lo.size, dtype=bool)
        pick[order[:n_split]] = True
        mid = 0.5 * (lo[pick] + hi[pick])
        new_lo = np.concatenate([lo[pick], mid])
        new_hi = np.concatenate([mid, hi[pick]])
        v2, e2, f2 = _gk15(f, new_lo, new_hi)
        keep = ~pick
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        val = np.concatenate([val[keep], v2])
        err = np.concatenate([err[keep], e2])
        floor = np.concatenate([floor[keep], f2])


def _origin_cell(f: ArrayFn, width: float, rel_tol: float, abs_tol: float,
                 scale_hint: float, max_levels: int = 400):
    """Integrate f over [0, width] on geometrically graded panels toward 0.

    Integrands of the form x^alpha * smooth(x) with alpha > -1 are smooth on
    every panel [w/2^(k+1), w/2^k]; the panel contributions then decay like
    2^(-k(alpha+1)) and the unresolved remainder is summed as a geometric tail.
    A non-decaying panel sequence means the origin singularity is not
    integrable and raises DivergenceError.
    """
    values: list[float] = []
    errors = 0.0
    panels = 0
    level = 0
    block = 16
    while level < max_levels:
        ks = np.arange(level, level + block, dtype=float)
        hi = width * 2.0 ** (-ks)
        lo = 0.5 * hi
        val, err, floor = _gk15(f, lo, hi)
        target = max(abs_tol, rel_tol * max(scale_hint, abs(float(np.sum(values)) + float(np.sum(val)))))
        for i in np.flatnonzero((err > 2.0 * floor) & (err > 1e-3 * target)):
            # refine this graded panel on its own
            v, e, n = _adaptive(f, lo[i:i + 1], hi[i:i + 1], rel_tol, 1e-3 * target, 4000)
            val[i], err[i] = v, e
            panels += n - 1
        values.extend(val.tolist())
        errors += float(np.sum(err))
        panels += block
        level += block
        mags = np.abs(values)
        scale = max(scale_hint, abs(float(np.sum(values))))
        last = mags[-4:]
        if np.all(last <= 1e-3 * max(abs_tol, rel_tol * scale)):
            break
        if level >= 64:
            ratios = mags[-8:] / np.where(mags[-9:-1] == 0.0, 1.0, mags[-9:-1])
            if np.all(ratios > 1.0 - 1e-6):
                raise DivergenceError("integrand is not integrable at the origin")
    total = float(np.sum(values))
    remainder = 0.0
    if len(values) >= 2 and values[-2] != 0.0:
        ratio = values[-1] / values[-2]
        if 0.0 < ratio < 1.0 - 1e-6:
            remainder = values[-1] * ratio / (1.0 - ratio)
        elif ratio >= 1.0 - 1e-6:
            raise DivergenceError("integrand is not integrable at the origin")
    errors += abs(remainder) * 1e-2 + abs(values[-1])
    return total + remainder, errors, panels


def euler_transform(partial_sums: Sequence[float]) -> tuple[float, float]:
    """Accelerate the limit of alternating-series partial sums by repeated averaging.

    This is the Euler / van Wijngaarden transform written on partial sums.
    Returns (estimate, error estimate from the last two averaging levels).
    """
    level = np.asarray(partial_sums, dtype=float)
    if level.size == 1:
        return float(level[0]), math.inf
    prev = level[-1]
    while level.size > 1:
        prev = level[-1]
        level = 0.5 * (level[:-1] + level[1:])
    return float(level[0]), float(abs(level[0] - prev))


def integrate_semi_infinite(
    f: ArrayFn,
    oscillation_period: float | None = None,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-14,
    upper: float | None = None,
    scale: float = 1.0,
    max_segments: int = 200_000,
) -> QuadratureResult:
    """Integral of a vectorised ``f`` over [0, inf).

    With ``oscillation_period`` the half line is cut at half-period
    boundaries; otherwise panels of width ``scale`` (doubling when open-ended)
    are used. Each panel gets globally adaptive Gauss-Kronrod refinement, and
    the first panel is graded geometrically toward the origin so integrable
    power-law singularities there are handled.

    ``upper`` truncates the range (the caller bounds the discarded tail). When
    it is None the panels are marched outward until they become negligible; an
    alternating oscillatory tail that decays too slowly is summed with the
    Euler transform.
    """
    if not (rel_tol > 0.0 and abs_tol > 0.0):
        raise ValueError("tolerances must be positive")
    if oscillation_period is not None and not oscillation_period > 0.0:
        raise ValueError("oscillation_period must be positive")
    if upper is not None and not upper > 0.0:
        raise ValueError("upper must be positive")

    width = 0.5 * oscillation_period if oscillation_period is not None else float(scale)
    first = width if upper is None else min(width, upper)

    if upper is not None:
        n_body = max(0, math.ceil(upper / width - 1e-12) - 1)
        if n_body > max_segments:
            raise QuadratureError(f"{n_body} half-period panels exceed the cap {max_segments}")
        edges = np.minimum(first + width * np.arange(n_body + 1), upper)
        lo, hi = edges[:-1], edges[1:]
        body_val = body_err = 0.0
        body_n = 0
        if lo.size:
            body_val, body_err, body_n = _adaptive(f, lo, hi, rel_tol, abs_tol, max_segments)
        o_val, o_err, o_n = _origin_cell(f, first, rel_tol, abs_tol, scale_hint=abs(body_val))
        return QuadratureResult(body_val + o_val, body_err + o_err, body_n + o_n)

    o_val, o_err, o_n = _origin_cell(f, first, rel_tol, abs_tol, scale_hint=0.0)
    total, total_err, used = o_val, o_err, o_n
    start = first
    contributions: list[float] = []
    partial: list[float] = []
    block = 64
    quiet_blocks = 0
    while used < max_segments:
        if oscillation_period is not None:
            edges = start + width * np.arange(block + 1)
        else:
            edges = start * 2.0 ** np.arange(block // 16 + 1)
        lo, hi = edges[:-1], edges[1:]
        # per-panel values are needed for the tail test, so refine panel by panel
        vals = []
        for a, b in zip(lo, hi):
            v, e, n = _adaptive(f, np.array([a]), np.array([b]), rel_tol, abs_tol * 1e-2,
                                max_segments)
            vals.append(v)
            total_err += e
            used += n
        contributions.extend(vals)
        for v in vals:
            total += v
            partial.append(total)
        start = float(hi[-1])
        tol = max(abs_tol, rel_tol * abs(total))
        if float(np.sum(np.abs(vals))) <= 1e-2 * tol:
            quiet_blocks += 1
            if quiet_blocks >= 2:
                return QuadratureResult(total, total_err, used)
            continue
        quiet_blocks = 0
        tail = np.asarray(contributions[-32:])
        if oscillation_period is not None and tail.size >= 32 and np.all(tail[:-1] * tail[1:] < 0.0):
            estimate, acc_err = euler_transform(partial[-32:])
            if acc_err <= tol:
                return QuadratureResult(estimate, total_err + acc_err, used)
    raise QuadratureError(f"segment cap {max_segments} reached before the tail converged")


def integrate_interval(f: ArrayFn, a: float, b: float, rel_tol: float = 1e-10,
                       abs_tol: float = 1e-14, breakpoints: Sequence[float] = (),
                       max_segments: int = 100_000) -> QuadratureResult:
    """Adaptive Gauss-Kronrod integral of ``f`` over the finite interval [a, b]."""
    pts = sorted({float(a), float(b), *[float(p) for p in breakpoints if a < p < b]})
    lo = np.array(pts[:-1])
    hi = np.array(pts[1:])
    v, e, n = _adaptive(f, lo, hi, rel_tol, abs_tol, max_segments)
    return QuadratureResult(v, e, n)


def sum_series(term: Callable[[np.ndarray], np.ndarray], rel_tol: float = 1e-10,
               k_max: int = 1_000_000, k_start: int = 1, chunk: int = 1024) -> float:
    """Sum ``term(k)`` for k = k_start, k_start + 1, ... with an integral-comparison tail.

    ``term`` is vectorised over integer arrays. Once the terms are monotone
    and decay like a power law ``c k^(-p)`` with p > 1, the tail beyond the
    partial sum is estimated from the integral of the fitted power law with a
    midpoint correction; the half-width of the integral-comparison bracket
    ``[int_{N+1}, int_N]`` serves as the error bound. Raises
    SeriesTruncationError if ``k_max`` is reached before the bound falls below
    ``rel_tol * |sum|``.
    """
    total = 0.0
    k0 = k_start
    previous = None  # estimate from the previous chunk
    while k0 <= k_max:
        ks = np.arange(k0, min(k0 + chunk, k_max + 1))
        terms = np.asarray(term(ks), dtype=float)
        total += float(np.sum(terms))
        k0 = int(ks[-1]) + 1
        last_k, last_t = float(ks[-1]), float(terms[-1])
        if last_t == 0.0 and np.all(terms[-8:] == 0.0):
            return total
        estimate = None
        if ks.size >= 8 and last_t != 0.0:
            prev_k, prev_t = float(ks[-8]), float(terms[-8])
            if prev_t * last_t > 0.0 and abs(last_t) < abs(prev_t):
                p = math.log(prev_t / last_t) / math.log(last_k / prev_k)
                # p barely above 1 is rounding noise on a harmonic-like tail
                if p > 1.0 + 1e-3:
                    c = last_t * last_k ** p
                    upper_int = c * last_k ** (1.0 - p) / (p - 1.0)          # int_N^inf
                    lower_int = c * (last_k + 1.0) ** (1.0 - p) / (p - 1.0)  # int_{N+1}^inf
                    estimate = total + 0.5 * (upper_int + lower_int)
                    bound = 0.5 * abs(upper_int - lower_int)
                    stable = previous is not None and abs(estimate - previous) <= max(
                        bound, rel_tol * abs(estimate))
                    if bound <= rel_tol * abs(estimate) and stable:
                        return estimate
        previous = estimate
    if total == 0.0:
        return 0.0
    raise SeriesTruncationError(f"series not converged within k_max={k_max}")


@dataclass(frozen=True)
class AbelResult:
    """Abel-regularised limit ``lim eps int e^{-eps t} f(t) dt`` with a convergence report."""

    value: float
    converged: bool
    eps: tuple[float, ...]
    raw: tuple[float, ...]
    extrapolated: tuple[float, ...] = field(default=())
    spread: float = math.inf


def _abel_transform(f: ArrayFn, eps: float, rel_tol: float) -> float:
    # eps * int_0^inf e^{-eps t} f(t) dt = int_0^U e^{-u} f(u / eps) du, U where e^{-u} < 1e-16
    u_max = -math.log(1e-16)
    breaks = [eps * 10.0 ** k for k in range(-3, 8)] + [1.0, 4.0, 10.0, 20.0]

    def g(u):
        return np.exp(-u) * np.asarray(f(u / eps), dtype=float)

    return integrate_interval(g, 0.0, u_max, rel_tol=rel_tol, abs_tol=1e-15,
                              breakpoints=breaks).value


def _aitken(seq: np.ndarray) -> np.ndarray:
    d1 = seq[1:-1] - seq[:-2]
    d2 = seq[2:] - 2.0 * seq[1:-1] + seq[:-2]
    safe = np.where(d2 == 0.0, 1.0, d2)
    return np.where(d2 == 0.0, seq[2:], seq[2:] - (seq[2:] - seq[1:-1]) ** 2 / safe)


def abel_limit(f: ArrayFn, eps_sequence: Sequence[float] | None = None,
               tol: float = 1e-4, rel_tol: float = 1e-11) -> AbelResult:
    """Long-time limit of ``f`` through the Abel mean ``eps int e^{-eps t} f(t) dt``.

    The Abel means are computed for a decreasing ``eps_sequence`` (default:
    geometric, 1e-1 down to 1e-7) and extrapolated to eps -> 0 by repeated
    Aitken delta-squared passes, i.e. Richardson extrapolation with the
    convergence order estimated from the data; this handles the fractional
    powers and eps*log(eps) terms that slowly decaying tails produce. The
    result is flagged as not converged (no exception) when the last
    extrapolants disagree by more than ``tol`` absolute-or-relative, e.g. for
    growing or persistently oscillating ``f``.
    """
    if eps_sequence is None:
        eps_sequence = [10.0 ** (-k / 2.0) for k in range(2, 15)]
    eps = np.asarray(eps_sequence, dtype=float)
    if eps.size < 3 or np.any(eps <= 0.0) or np.any(np.diff(eps) >= 0.0):
        raise ValueError("eps_sequence needs >= 3 strictly decreasing positive values")
    raw = np.array([_abel_transform(f, e, rel_tol) for e in eps])
    if not np.all(np.isfinite(raw)):
        return AbelResult(math.nan, False, tuple(eps), tuple(raw))

    levels = [raw]
    while levels[-1].size >= 3:
        levels.append(_aitken(levels[-1]))
    # candidates: tail of each extrapolation level
    best = raw
    for lev in levels[1:]:
        if lev.size >= 2:
            best = lev
    last_two = best[-2:]
    value = float(best[-1])
    spread = float(abs(last_two[-1] - last_two[0])) if last_two.size == 2 else math.inf
    steps = np.abs(np.diff(raw))
    settling = bool(np.all(steps[-3:] <= steps[-4:-1] * 1.0000001)) if steps.size >= 4 else True
    converged = spread <= tol * max(1.0, abs(value)) and settling
    return AbelResult(value, converged, tuple(eps), tuple(raw),
                      tuple(float(x) for x in best), spread)
