"""Qualitative time-behaviour labels for the decoherence contributions.

Two kinds of label are produced:

* ``table_labels(s, lam)``: the expected behaviour per contribution, a pure
  function of the exponent and the coupling.
* ``observed_label(series, limit)``: a label read off a computed series from
  its extrema and its t -> inf limit.

Thresholds for the observed labels:
  - steps smaller than ``FLAT_TOL`` times the series range count as flat,
  - "Saturation" needs a finite nonzero limit with the last grid value
    within ``SATURATION_TOL`` (relative) of it and no interior maximum; a
    plateau reached after a maximum is "Peak structure",
  - "Nonmonotonic decay" needs an interior maximum, a zero limit and a last
    value below ``DECAY_TOL`` times the maximum.
"""

from __future__ import annotations

import math

import numpy as np

from .spectral import OHMIC_TOLERANCE

FLAT_TOL = 1e-9
SATURATION_TOL = 0.05
DECAY_TOL = 0.05

MONOTONIC = "Monotonic increase"
SATURATION = "Saturation"
OSCILLATIONS = "Oscillations"
PEAK = "Peak structure"
DECAY = "Nonmonotonic decay"
ZERO = "Zero"


def table_labels(s: float, lam: float) -> dict[str, str]:
    """Expected label per contribution for the power-law bath with exponential cutoff."""
    if not s > 0.0:
        raise ValueError("s must be > 0")
    if abs(s - 1.0) < OHMIC_TOLERANCE:
        even = lam > 0 and abs(lam / 2.0 - round(lam / 2.0)) < 1e-12
        plateau = "gamma_corr(inf) = 0" if even else "gamma_corr(inf) != 0"
        return {"gamma_vac": MONOTONIC, "gamma_th": MONOTONIC, "gamma_corr": f"{PEAK}; {plateau}"}
    if s < 1.0:
        return {"gamma_vac": MONOTONIC, "gamma_th": MONOTONIC, "gamma_corr": OSCILLATIONS}
    if s <= 2.0:
        return {"gamma_vac": SATURATION, "gamma_th": MONOTONIC, "gamma_corr": DECAY}
    return {"gamma_vac": SATURATION, "gamma_th": SATURATION, "gamma_corr": DECAY}


def extrema_counts(series) -> dict[str, int]:
    """Interior local maxima and minima, ignoring steps below FLAT_TOL of the range."""
    y = np.asarray(series, dtype=float)
    y = y[np.isfinite(y)]
    if y.size < 3:
        return {"maxima": 0, "minima": 0}
    span = float(np.max(y) - np.min(y))
    if span == 0.0:
        return {"maxima": 0, "minima": 0}
    d = np.diff(y)
    sign = np.where(d > FLAT_TOL * span, 1, np.where(d < -FLAT_TOL * span, -1, 0))
    sign = sign[sign != 0]
    if sign.size < 2:
        return {"maxima": 0, "minima": 0}
    change = np.diff(sign)
    return {"maxima": int(np.sum(change < 0)), "minima": int(np.sum(change > 0))}


def sign_changes(series) -> int:
    y = np.asarray(series, dtype=float)
    s = np.sign(y[y != 0.0])
    return int(np.sum(s[1:] != s[:-1]))


def observed_label(series, limit: float | None) -> str:
    """Label from the series shape; ``limit`` is the t -> inf value (inf, finite, or None)."""
    y = np.asarray(series, dtype=float)
    finite = y[np.isfinite(y)]
    if finite.size == 0 or np.max(np.abs(finite)) == 0.0:
        return ZERO
    ext = extrema_counts(finite)
    peak = float(np.max(finite))
    last = float(finite[-1])
    if limit is not None and math.isfinite(limit) and limit != 0.0:
        if abs(last - limit) <= SATURATION_TOL * abs(limit):
            return SATURATION if ext["maxima"] == 0 else PEAK
    if limit == 0.0 and ext["maxima"] >= 1 and abs(last) <= DECAY_TOL * peak:
        return DECAY
    if ext["maxima"] == 0:
        return MONOTONIC if ext["minima"] == 0 else PEAK
    return PEAK if ext["maxima"] == 1 else OSCILLATIONS
