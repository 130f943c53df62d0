import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dephasing.spectral import (
    BathSpec,
    ExponentialCutoff,
    SpectralDensity,
    TabulatedCutoff,
    classify_regime,
    evaluate,
    reorganization_shift,
    tabulated_from_function,
)
from dephasing.numerics import integrate_semi_infinite

import oracles


def test_evaluate_examples():
    assert evaluate(SpectralDensity(1.0, 1.0, 1.0), 0.0) == 0.0
    assert evaluate(SpectralDensity(1.0, 1.0, 1.0), 1.0) == pytest.approx(math.exp(-1.0), rel=1e-15)
    assert evaluate(SpectralDensity(2.0, 3.0, 2.0), 2.0) == pytest.approx(2 * 2 ** -2 * 8 * math.exp(-1), rel=1e-15)
    assert evaluate(SpectralDensity(2.0, 3.0, 2.0), 2.0) == pytest.approx(1.471518, abs=1e-6)


@given(st.floats(0.05, 6.0), st.floats(0.0, 5.0), st.floats(0.1, 10.0))
def test_evaluate_matches_formula_on_grid(s, lam, omega_c):
    w = np.linspace(0.0, 30.0 * omega_c, 101)
    j = SpectralDensity(lam, s, omega_c)
    ref = lam * omega_c ** (1.0 - s) * w ** s * np.exp(-w / omega_c)
    assert np.allclose(evaluate(j, w), ref, rtol=1e-14, atol=1e-300)


@given(st.floats(0.1, 5.0), st.floats(0.01, 50.0))
def test_evaluate_matches_mpmath(s, w):
    j = SpectralDensity(1.3, s, 2.0)
    assert evaluate(j, w) == pytest.approx(oracles.spectral(1.3, s, 2.0, w), rel=1e-13)


def test_evaluate_rejects_negative_frequency():
    with pytest.raises(ValueError):
        evaluate(SpectralDensity(1.0, 1.0, 1.0), -0.1)
    with pytest.raises(ValueError):
        evaluate(SpectralDensity(1.0, 1.0, 1.0), np.array([1.0, -1.0]))


def test_callable_shortcut():
    j = SpectralDensity(1.0, 2.0, 1.0)
    assert j(1.5) == evaluate(j, 1.5)


@pytest.mark.parametrize("kwargs", [
    dict(lambda_s=-1.0, s=1.0, Omega=1.0),
    dict(lambda_s=1.0, s=0.0, Omega=1.0),
    dict(lambda_s=1.0, s=1.0, Omega=0.0),
])
def test_spectral_density_validation(kwargs):
    with pytest.raises(ValueError):
        SpectralDensity(**kwargs)


def test_bath_spec():
    j = SpectralDensity(1.0, 1.0, 2.0)
    assert BathSpec(j).zero_temperature
    b = BathSpec(j, beta=5.0)
    assert b.omega_beta == 10.0
    assert b.tau_b == pytest.approx(5.0 / math.pi)
    with pytest.raises(ValueError):
        BathSpec(j, beta=0.0)
    with pytest.raises(ValueError):
        BathSpec(j, beta=-1.0)


# --- tabulated cutoffs ---

def _gauss_table():
    xs = np.concatenate([[0.0], np.geomspace(1e-3, 6.0, 80)])
    return TabulatedCutoff(tuple(xs), tuple(np.exp(-xs ** 2)))


def test_tabulated_interpolates_and_extrapolates():
    cut = _gauss_table()
    x = np.array([0.0, 0.37, 1.2, 2.9])
    assert np.allclose(cut(x), np.exp(-x ** 2), rtol=2e-3, atol=1e-9)
    tail = cut(np.array([7.0, 8.0]))
    assert np.all(tail > 0.0) and tail[1] < tail[0] < cut(np.array([6.0]))[0]


def test_tabulated_from_exponential_matches_exponential_cutoff():
    cut = tabulated_from_function(lambda x: math.exp(-x), np.geomspace(1e-4, 40.0, 200))
    x = np.linspace(0.0, 60.0, 241)
    assert np.allclose(cut(x), ExponentialCutoff()(x), rtol=1e-5, atol=1e-12)


@pytest.mark.parametrize("xs, vals", [
    ((0.0, 1.0, 2.0), (0.9, 0.5, 1e-9)),       # F(0) != 1
    ((0.0, 1.0, 2.0), (1.0, 0.5, 0.1)),        # no decay
    ((0.0, 2.0, 1.0), (1.0, 0.5, 1e-9)),       # not increasing
    ((0.1, 1.0, 2.0), (1.0, 0.5, 1e-9)),       # does not start at 0
    ((0.0, 1.0), (1.0, 1e-9)),                 # too few samples
    ((0.0, 1.0, 2.0), (1.0, -0.5, 1e-9)),      # negative value
])
def test_tabulated_validation(xs, vals):
    with pytest.raises(ValueError):
        TabulatedCutoff(xs, vals)


def test_tabulated_density_is_nonnegative():
    j = SpectralDensity(1.0, 0.7, 1.0, _gauss_table())
    w = np.linspace(0.0, 20.0, 500)
    assert np.all(evaluate(j, w) >= 0.0)
    assert not j.is_exponential


# --- regime ---

@pytest.mark.parametrize("s, kind, decoherence", [
    (1.5, "superohmic", "complete"),
    (3.0, "superohmic", "incomplete"),
    (0.5, "subohmic", "complete"),
    (1.0, "ohmic", "complete"),
    (1.0 + 5e-10, "ohmic", "complete"),
    (2.0, "superohmic", "complete"),
    (2.0 + 1e-9, "superohmic", "incomplete"),
])
def test_classify_regime(s, kind, decoherence):
    r = classify_regime(s)
    assert (r.kind, r.decoherence) == (kind, decoherence)


@pytest.mark.parametrize("s", [0.0, -1.0])
def test_classify_regime_domain(s):
    with pytest.raises(ValueError):
        classify_regime(s)


@given(st.floats(0.05, 8.0), st.floats(0.0, 10.0), st.floats(0.01, 100.0))
def test_regime_independent_of_coupling_and_cutoff(s, lam, omega_c):
    j = SpectralDensity(lam, s, omega_c)
    assert classify_regime(j.s) == classify_regime(s)
    assert j.is_ohmic == (classify_regime(s).kind == "ohmic")


# --- reorganization shift ---

def test_reorganization_examples():
    assert reorganization_shift(SpectralDensity(1.0, 1.0, 1.0)) == pytest.approx(0.25, rel=1e-14)
    assert reorganization_shift(SpectralDensity(1.0, 2.0, 1.0)) == pytest.approx(0.25, rel=1e-14)
    assert reorganization_shift(SpectralDensity(0.0, 1.0, 3.0)) == 0.0


@pytest.mark.parametrize("s", [0.3, 1.0, 2.5, 4.0])
def test_reorganization_quadrature_matches_closed(s):
    j = SpectralDensity(1.0, s, 1.5)
    closed = reorganization_shift(j, method="closed")
    assert reorganization_shift(j, method="quadrature") == pytest.approx(closed, rel=1e-9)
    assert closed == pytest.approx(math.gamma(s) * 1.5 / 4.0, rel=1e-12)


def test_reorganization_tabulated():
    cut = _gauss_table()
    j = SpectralDensity(1.0, 2.0, 1.0, cut)
    # (1/4) int x e^{-x^2} dx = 1/8, up to interpolation error
    assert reorganization_shift(j) == pytest.approx(0.125, rel=1e-3)
    with pytest.raises(ValueError):
        reorganization_shift(j, method="closed")


@given(st.floats(0.2, 5.0), st.floats(0.01, 10.0), st.floats(0.01, 10.0), st.floats(0.1, 10.0))
def test_reorganization_is_linear(s, lam, omega_c, k):
    base = reorganization_shift(SpectralDensity(lam, s, omega_c))
    assert reorganization_shift(SpectralDensity(k * lam, s, omega_c)) == pytest.approx(k * base, rel=1e-12)
    assert reorganization_shift(SpectralDensity(lam, s, k * omega_c)) == pytest.approx(k * base, rel=1e-12)


def test_omega_max_bounds_the_tail():
    j = SpectralDensity(1.0, 3.0, 2.0)
    wm = j.omega_max()
    tail = integrate_semi_infinite(lambda w: evaluate(j, w + wm) * (w + wm) ** 2, scale=j.Omega).value
    bulk = integrate_semi_infinite(lambda w: evaluate(j, w) * w ** 2, scale=j.Omega).value
    assert tail < 1e-14 * bulk
