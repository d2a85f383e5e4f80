import math

import numpy as np
import pytest

from ffcorr.errors import DegenerateRangeError, DomainError, PreconditionError
from ffcorr.models import ChebyshevParams
from ffcorr.services.agsp import (
    agsp_apply,
    agsp_context,
    agsp_operator,
    agsp_sweep,
    causal_cone_check,
    chebyshev_T,
    correlator_bound_check,
    max_m_for_distance,
    qm_eval,
    scalar_bound_check,
)
from ffcorr.services.hamiltonian import number_operator, pauli_z
from ffcorr.services.linalg import dense_materialize, random_state
from ffcorr.services.xxz import xxz_gap_closed_form, xxz_psi1, xxz_spec


def test_chebyshev_small_cases():
    assert chebyshev_T(3, 0.5) == pytest.approx(-1.0, abs=1e-15)
    assert chebyshev_T(0, 0.3) == 1.0
    assert chebyshev_T(1, 0.3) == 0.3
    for m in range(12):
        assert chebyshev_T(m, 1.0) == pytest.approx(1.0, abs=1e-12)


def test_chebyshev_matches_trigonometric_forms():
    x = np.linspace(-1, 1, 201)
    for m in range(51):
        np.testing.assert_allclose(chebyshev_T(m, x), np.cos(m * np.arccos(x)), atol=1e-12)
    for m in range(8):
        assert chebyshev_T(m, 1.3) == pytest.approx(math.cosh(m * math.acosh(1.3)), rel=1e-12)


def test_qm_is_one_at_one():
    for m in range(0, 31, 5):
        for delta in (0.01, 0.1, 0.5):
            assert qm_eval(ChebyshevParams(m=m, delta=delta), 1.0) == pytest.approx(1.0, abs=1e-12)


def test_qm_linear_case():
    assert qm_eval(ChebyshevParams(m=1, delta=0.1), 0.0) == pytest.approx(-0.8181818, abs=1e-7)


def test_qm_xxz_degree_three_scan():
    params = ChebyshevParams(m=3, delta=0.09794)
    x = np.linspace(0.0, 1.0 - params.delta, 10_000)
    assert np.abs(qm_eval(params, x)).max() <= params.bound
    assert params.bound == pytest.approx(0.3059, abs=1e-4)
    assert params.normalization > 0.5 * math.exp(2 * 3 * math.sqrt(params.delta))


@pytest.mark.parametrize("delta", [0.0, 1.0, -0.2])
def test_delta_domain(delta):
    with pytest.raises(DomainError, match="delta"):
        ChebyshevParams(m=2, delta=delta)


def test_scalar_bound_grid():
    rows = scalar_bound_check(30, [0.01, 0.05, 0.1, 0.25, 0.5], points=10_000)
    assert len(rows) == 5 * 31
    assert all(row.passed for row in rows)


def test_ground_states_are_fixed_points(xxz4):
    psi = xxz_psi1(0.5, 4)
    for m in (0, 1, 4):
        np.testing.assert_allclose(agsp_apply(xxz4, None, m, psi), psi, atol=1e-10)


@pytest.mark.parametrize("n", [3, 4, 6])
def test_operator_polynomial_matches_dense_eigendecomposition(n, rng):
    spec = xxz_spec(0.6, n)
    context = agsp_context(spec)
    PP = dense_materialize(context.PP, spec.dim)
    values, vectors = np.linalg.eigh(0.5 * (PP + PP.conj().T))
    v = random_state(spec.dim, rng)
    for m in (1, 2, 5):
        params = ChebyshevParams(m=m, delta=context.delta)
        expected = vectors @ (qm_eval(params, values) * (vectors.conj().T @ v))
        np.testing.assert_allclose(agsp_operator(spec, None, m, context).matvec(v), expected, atol=1e-9)


def test_agsp_sweep_respects_bound():
    rows = agsp_sweep(xxz_spec(0.5, 6), None, range(0, 11))
    assert [row.m for row in rows] == list(range(11))
    assert rows[0].measured_norm == pytest.approx(1.0, abs=1e-10)
    assert all(row.passed for row in rows)
    assert all(row.margin >= -1e-9 for row in rows)


@pytest.mark.slow
@pytest.mark.parametrize("q", [0.5, 0.9])
@pytest.mark.parametrize("n", [6, 8])
def test_agsp_bound_grid(q, n):
    rows = agsp_sweep(xxz_spec(q, n), None, range(1, 11))
    assert all(row.passed for row in rows)


@pytest.mark.parametrize("d, expected", [(10, 3), (3, 0), (8, 2), (1, 0)])
def test_max_m_for_distance(d, expected):
    assert max_m_for_distance(d, 2, 2) == expected


def test_max_m_degenerate_range():
    with pytest.raises(DegenerateRangeError):
        max_m_for_distance(5, 2, 1)


def test_causal_cone_n10():
    report = causal_cone_check(xxz_spec(0.5, 10), None, pauli_z(1), pauli_z(9), m_max=2)
    assert report.distance == 8
    assert report.m_admissible == 2
    assert report.passed
    guaranteed = [row for row in report.rows if row.guaranteed]
    assert {row.m for row in guaranteed} == {0, 1, 2}
    assert len({row.state_index for row in guaranteed}) == 11
    assert max(row.residual for row in guaranteed) <= 1e-10


def test_causal_cone_adjacent_sites_reports_only():
    report = causal_cone_check(xxz_spec(0.5, 4), None, pauli_z(1), pauli_z(2), m_max=1)
    assert report.m_admissible == 0
    assert {row.m for row in report.rows if row.guaranteed} == {0}
    assert report.passed


def test_causal_cone_rejects_overlap(xxz4):
    with pytest.raises(PreconditionError, match="overlap"):
        causal_cone_check(xxz4, None, pauli_z(2), pauli_z(2), m_max=1)


@pytest.mark.slow
@pytest.mark.parametrize("d", [4, 5, 6, 7, 8])
def test_causal_cone_acceptance(d):
    spec = xxz_spec(0.5, 10)
    report = causal_cone_check(spec, None, number_operator(1), number_operator(1 + d), m_max=max_m_for_distance(d, 2, 2))
    assert report.passed


def test_correlator_chain_bound():
    epsilon = xxz_gap_closed_form(0.5, 8)
    delta = epsilon / (4 + epsilon)
    report = correlator_bound_check(xxz_spec(0.5, 8), None, pauli_z(1), pauli_z(8))
    assert report.m == 2
    assert report.passed
    assert report.bound == pytest.approx(2 * math.exp(-4 * math.sqrt(delta)), rel=1e-6)

