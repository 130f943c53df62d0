import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dephasing import labels
from dephasing.labels import (
    DECAY,
    MONOTONIC,
    OSCILLATIONS,
    PEAK,
    SATURATION,
    ZERO,
    extrema_counts,
    observed_label,
    sign_changes,
    table_labels,
)


def test_table_rows():
    assert table_labels(0.5, 1.0) == {"gamma_vac": MONOTONIC, "gamma_th": MONOTONIC, "gamma_corr": OSCILLATIONS}
    assert table_labels(1.5, 1.0) == {"gamma_vac": SATURATION, "gamma_th": MONOTONIC, "gamma_corr": DECAY}
    assert table_labels(2.0, 1.0)["gamma_th"] == MONOTONIC
    assert table_labels(3.0, 1.0) == {"gamma_vac": SATURATION, "gamma_th": SATURATION, "gamma_corr": DECAY}


@pytest.mark.parametrize("lam, plateau", [(2.0, "= 0"), (4.0, "= 0"), (1.0, "!= 0"), (3.0, "!= 0"), (0.5, "!= 0")])
def test_ohmic_row_depends_on_coupling_parity(lam, plateau):
    row = table_labels(1.0, lam)
    assert row["gamma_vac"] == MONOTONIC and row["gamma_th"] == MONOTONIC
    assert row["gamma_corr"].startswith(PEAK)
    assert row["gamma_corr"].endswith(f"gamma_corr(inf) {plateau}")


@given(st.floats(0.01, 10.0), st.floats(0.0, 10.0), st.floats(0.0, 10.0))
def test_labels_pure_function_of_s_off_ohmic(s, lam1, lam2):
    if abs(s - 1.0) < 1e-6:
        return
    assert table_labels(s, lam1) == table_labels(s, lam2)


def test_table_domain():
    with pytest.raises(ValueError):
        table_labels(0.0, 1.0)


def test_extrema_counts():
    t = np.linspace(0.0, 4 * math.pi, 400)
    assert extrema_counts(np.sin(t)) == {"maxima": 2, "minima": 2}
    assert extrema_counts(t) == {"maxima": 0, "minima": 0}
    assert extrema_counts([1.0, 1.0, 1.0]) == {"maxima": 0, "minima": 0}
    assert extrema_counts([1.0, 2.0]) == {"maxima": 0, "minima": 0}
    # steps below FLAT_TOL of the range are ignored
    y = np.concatenate([np.linspace(0, 1, 50), 1.0 + 1e-12 * np.array([1, -1, 1, -1])])
    assert extrema_counts(y) == {"maxima": 0, "minima": 0}


def test_sign_changes():
    assert sign_changes([1.0, -1.0, 0.0, 2.0, -3.0]) == 3
    assert sign_changes([0.0, 0.0]) == 0


def test_observed_labels():
    t = np.linspace(0.0, 50.0, 500)
    assert observed_label(np.zeros(10), 0.0) == ZERO
    assert observed_label(np.log1p(t), math.inf) == MONOTONIC
    assert observed_label(1.0 - np.exp(-t), 1.0) == SATURATION
    assert observed_label(t * np.exp(-t), 0.0) == DECAY
    assert observed_label(t * np.exp(-0.1 * t) + 0.5, 0.5 + 1.0) == PEAK
    assert observed_label(np.sin(t) ** 2, None) == OSCILLATIONS


def test_observed_label_ignores_infinities():
    y = np.array([0.0, 0.1, np.inf, 0.3, 0.4])
    assert observed_label(y, math.inf) == MONOTONIC


def test_thresholds_are_documented_constants():
    assert 0.0 < labels.SATURATION_TOL < 1.0
    assert 0.0 < labels.DECAY_TOL < 1.0
    assert labels.FLAT_TOL < 1e-6


def test_plateau_after_maximum_is_peak_structure():
    t = np.linspace(0.0, 60.0, 600)
    y = 1.0 - np.exp(-t) + 2.0 * t * np.exp(-t)  # overshoots, then settles on 1
    assert extrema_counts(y)["maxima"] == 1
    assert observed_label(y, 1.0) == PEAK
    assert observed_label(1.0 - np.exp(-t), 1.0) == SATURATION
