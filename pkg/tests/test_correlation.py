import math

import numpy as np
import pytest

from ffcorr.errors import DomainError, InsufficientDataError, NoDecayError, PreconditionError
from ffcorr.models import CorrelationSeries
from ffcorr.services.correlation import (
    THEOREM_PREFACTOR,
    analytic_xxz_series,
    correlation_series,
    correlator_deg,
    entropy_profile,
    fit_xi,
    half_chain_entropy,
    theorem_bound_check,
    xi_scaling_sweep,
    xi_upper_formula,
    xxz_series,
)
from ffcorr.services.agsp import correlator_bound_check
from ffcorr.services.hamiltonian import identity_observable, number_operator, pauli_z
from ffcorr.services.spectral import ground_space
from ffcorr.services.xxz import xxz_gap_closed_form, xxz_psi1, xxz_spec, xxz_xi_lower_bound


def test_correlator_matches_closed_form_q05_n4(xxz4):
    value = correlator_deg(xxz4, xxz_psi1(0.5, 4), number_operator(1), number_operator(3))
    assert value == pytest.approx(0.0354325259515571, abs=1e-12)


@pytest.mark.parametrize("q", [0.3, 0.5, 0.8])
def test_xxz_series_agrees_with_reference(q):
    series = xxz_series(q, 6)
    assert series.distances == (1, 2, 3, 4, 5)
    np.testing.assert_allclose(series.values, series.reference, atol=1e-12)
    assert series.b_label == "n(1+d)"


def test_correlation_series_reuses_one_basis():
    spec = xxz_spec(0.5, 5)
    series = correlation_series(spec, xxz_psi1(0.5, 5), lambda d: pauli_z(1), lambda d: pauli_z(1 + d), [1, 2, 4])
    assert series.a_label == "Z1"
    assert series.distances == (1, 2, 4)
    assert all(value >= 0 for value in series.values)


def test_correlator_rejects_excited_state(xxz4):
    psi = np.zeros(xxz4.dim, dtype=complex)
    psi[0b0110] = 1.0
    with pytest.raises(PreconditionError, match="not a ground state"):
        correlator_deg(xxz4, psi, number_operator(1), number_operator(4))


def test_correlator_rejects_overlap(xxz4):
    with pytest.raises(PreconditionError, match="overlap"):
        correlator_deg(xxz4, xxz_psi1(0.5, 4), number_operator(2), number_operator(2))


def test_correlator_vanishes_on_product_ground_state(xxz4):
    basis = ground_space(xxz4)
    psi = np.zeros(xxz4.dim, dtype=complex)
    psi[0] = 1.0
    assert correlator_deg(xxz4, psi, pauli_z(1), pauli_z(4), basis=basis) == pytest.approx(0.0, abs=1e-12)


def test_correlator_with_identity_vanishes(xxz4):
    value = correlator_deg(xxz4, xxz_psi1(0.5, 4), identity_observable(1), number_operator(3))
    assert value == pytest.approx(0.0, abs=1e-12)


@pytest.mark.slow
@pytest.mark.parametrize("q", [0.3, 0.5, 0.7, 0.9])
@pytest.mark.parametrize("n", range(3, 11))
def test_xxz_correlator_grid(q, n):
    series = xxz_series(q, n)
    assert series.distances == tuple(range(1, n))
    np.testing.assert_allclose(series.values, series.reference, rtol=0, atol=1e-10)

    rows = theorem_bound_check(series, c=2, r=2, g=2, epsilon=xxz_gap_closed_form(q, n))
    assert all(row.passed for row in rows)

    chain = correlator_bound_check(xxz_spec(q, n), None, number_operator(1), number_operator(n), psi=xxz_psi1(q, n))
    assert chain.distance == n - 1
    assert chain.passed


@pytest.mark.parametrize("q", [0.5, 0.7, 0.9])
def test_fit_recovers_infinite_chain_length(q):
    fit = fit_xi(analytic_xxz_series(q, range(1, 21)))
    assert fit.xi == pytest.approx(xxz_xi_lower_bound(q), rel=1e-9)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.amplitude == pytest.approx((1 - q * q) ** 2, rel=1e-9)


def test_fit_drops_values_below_floor():
    series = CorrelationSeries(distances=(1, 2, 3, 4), values=(1e-2, 1e-4, 1e-6, 0.0))
    fit = fit_xi(series)
    assert fit.window == (1, 2, 3)
    assert fit.xi == pytest.approx(1 / math.log(100), rel=1e-9)


def test_fit_needs_three_points():
    with pytest.raises(InsufficientDataError):
        fit_xi(CorrelationSeries(distances=(1, 2), values=(0.1, 0.01)))


def test_fit_rejects_growth():
    with pytest.raises(NoDecayError):
        fit_xi(CorrelationSeries(distances=(1, 2, 3), values=(0.01, 0.02, 0.04)))


def test_xi_upper_formula_xxz_finite_gap():
    assert xi_upper_formula(2, 2, 2, 0.4343146) == pytest.approx(4.7929, abs=1e-3)


@pytest.mark.parametrize("epsilon", [0.0, -0.1])
def test_xi_upper_formula_needs_gap(epsilon):
    with pytest.raises(DomainError):
        xi_upper_formula(2, 2, 2, epsilon)


def test_theorem_bound_holds_on_finite_chain():
    series = xxz_series(0.5, 8)
    rows = theorem_bound_check(series, c=2, r=2, g=2, epsilon=xxz_gap_closed_form(0.5, 8))
    assert [row.d for row in rows] == list(range(1, 8))
    assert all(row.passed for row in rows)
    assert rows[0].bound < THEOREM_PREFACTOR


def test_theorem_bound_flags_slow_decay():
    series = CorrelationSeries(distances=(1, 50), values=(0.1, 1.0))
    rows = theorem_bound_check(series, c=2, r=2, g=2, epsilon=0.5)
    assert rows[0].passed
    assert not rows[1].passed


def test_xi_lower_bound_values():
    assert xxz_xi_lower_bound(0.9) == pytest.approx(4.7455967, abs=1e-6)
    assert xxz_xi_lower_bound(0.5) == pytest.approx(0.7213475, abs=1e-6)


def test_sweep_slope_near_gap_closing():
    result = xi_scaling_sweep([0.95, 0.96, 0.97, 0.98, 0.99])
    assert [row.q for row in result.rows] == [0.95, 0.96, 0.97, 0.98, 0.99]
    assert all(row.passed for row in result.rows)
    assert result.slope == pytest.approx(-0.5, abs=0.05)
    assert result.slope_passed


def test_sweep_threads_keep_order():
    serial = xi_scaling_sweep([0.5, 0.7, 0.9])
    parallel = xi_scaling_sweep([0.5, 0.7, 0.9], threads=3)
    assert serial == parallel


def test_sweep_needs_two_points():
    with pytest.raises(InsufficientDataError):
        xi_scaling_sweep([0.9])


def test_entropy_of_product_and_bell_states():
    product = np.zeros(4, dtype=complex)
    product[0] = 1.0
    bell = np.array([1, 0, 0, 1]) / math.sqrt(2)
    assert half_chain_entropy(product, 1) == pytest.approx(0.0, abs=1e-14)
    assert half_chain_entropy(bell, 1) == pytest.approx(math.log(2), abs=1e-12)


def test_entropy_of_one_magnon_state():
    q, n = 0.8, 6
    profile = entropy_profile(xxz_psi1(q, n))
    assert len(profile) == n - 1
    for cut, value in enumerate(profile, start=1):
        p = (1 - q ** (2 * cut)) / (1 - q ** (2 * n))
        assert value == pytest.approx(-p * math.log(p) - (1 - p) * math.log(1 - p), abs=1e-12)


def test_entropy_preconditions():
    with pytest.raises(PreconditionError, match="normalized"):
        half_chain_entropy(np.ones(4), 1)
    with pytest.raises(PreconditionError, match="cut"):
        half_chain_entropy(xxz_psi1(0.5, 4), 4)


def _reverse_sites(psi, n):
    return np.asarray(psi).reshape((2,) * n).transpose(tuple(reversed(range(n)))).reshape(-1)


@pytest.mark.parametrize("q, n", [(0.5, 5), (0.8, 6)])
def test_entropy_is_symmetric_across_the_cut(q, n):
    psi = xxz_psi1(q, n)
    flipped = _reverse_sites(psi, n)
    for cut in range(1, n):
        assert half_chain_entropy(psi, cut) == pytest.approx(half_chain_entropy(flipped, n - cut), abs=1e-12)


def test_entropy_matches_dense_partial_trace():
    psi = xxz_psi1(0.5, 4)
    block = psi.reshape(4, 4)
    weights = np.linalg.eigvalsh(block @ block.conj().T)
    weights = weights[weights > 1e-15]
    assert half_chain_entropy(psi, 2) == pytest.approx(float(-np.sum(weights * np.log(weights))), abs=1e-12)
