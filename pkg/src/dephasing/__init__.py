"""Exact pure-dephasing dynamics of a qubit in a bosonic bath.

Closed forms (exponential cutoff), adaptive quadrature (any cutoff) and a
discretized-bath oracle for the vacuum, thermal and initial-correlation
parts of the decoherence function, plus the resulting qubit coherences,
Bloch norm and entropy.
"""

from .decoherence import (
    CorrelationContext, DephasingBreakdown, LongTimeLimits, SufficiencyBounds, breakdown, chi,
    dgamma_th_dt, gamma_corr, gamma_th, gamma_vac, long_time_limits, phi, sufficiency_bounds,
)
from .discrete import DiscreteBath, alpha_k, discretize, gamma_discrete, phi_discrete
from .numerics import (
    AbelResult, DivergenceError, QuadratureError, QuadratureResult, SeriesTruncationError, abel_limit,
    integrate_semi_infinite, sum_series,
)
from .qubit import (
    OperatorList, PureProjector, QubitStateAtTime, bloch_norm, coherence_correlated, coherence_general,
    coherence_uncorrelated, effective_gamma_corr, entropy, entropy_limit, exp_form, initial_bath_weights,
    state_at,
)
from .special_functions import hurwitz_zeta, ln_abs_gamma_sq, ln_gamma_real
from .spectral import (
    BathSpec, ExponentialCutoff, SpectralDensity, TabulatedCutoff, classify_regime, evaluate,
    reorganization_shift,
)

__version__ = "0.1.0"
