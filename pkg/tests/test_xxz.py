import math

import numpy as np
import pytest

from ffcorr.errors import DomainError
from ffcorr.services.linalg import apply_hamiltonian
from ffcorr.services.xxz import (
    INF,
    magnetization,
    magnetization_sector,
    phi,
    xxz_correlator_closed_form,
    xxz_gap_closed_form,
    xxz_psi1,
    xxz_spec,
    xxz_xi_lower_bound,
)


def test_phi_is_normalized_and_orthogonal_to_aligned_states():
    vector = phi(0.5)
    assert np.linalg.norm(vector) == pytest.approx(1.0)
    assert vector[0] == 0 and vector[3] == 0


@pytest.mark.parametrize("q", [0.3, 0.5, 0.9, 1.0])
def test_terms_are_rank_one_projectors(q):
    for term in xxz_spec(q, 5).terms:
        H = term.matrix
        assert np.linalg.norm(H @ H - H) <= 1e-12
        assert np.linalg.norm(H, 2) == pytest.approx(1.0)


def test_q_equal_one_warns(caplog):
    with caplog.at_level("WARNING", logger="ffcorr.services.xxz"):
        xxz_spec(1.0, 3)
    assert "gap closes" in caplog.text


@pytest.mark.parametrize("q, n", [(0.0, 4), (1.2, 4), (0.5, 1)])
def test_spec_domain(q, n):
    with pytest.raises(DomainError):
        xxz_spec(q, n)


def test_gap_closed_form_values():
    assert xxz_gap_closed_form(0.5, 4) == pytest.approx(0.4343145750507619, abs=1e-12)
    assert xxz_gap_closed_form(0.5) == pytest.approx(0.2, abs=1e-12)
    assert xxz_gap_closed_form(1.0, 2) == pytest.approx(1.0, abs=1e-12)


def test_correlator_closed_form():
    assert xxz_correlator_closed_form(0.5, 4, 2) == pytest.approx(0.0354325259515571, abs=1e-14)
    assert xxz_correlator_closed_form(0.5, INF, 1) == pytest.approx(0.75 ** 2 * 0.25)
    assert xxz_correlator_closed_form(0.9, INF, 400) < 1e-30
    with pytest.raises(DomainError, match="distance"):
        xxz_correlator_closed_form(0.5, 4, 4)


def test_xi_lower_bound():
    assert xxz_xi_lower_bound(0.9) == pytest.approx(4.7455967, abs=1e-6)
    assert xxz_xi_lower_bound(math.exp(-0.5)) == pytest.approx(1.0)
    assert xxz_xi_lower_bound(0.5) == pytest.approx(0.7213475, abs=1e-7)
    with pytest.raises(DomainError):
        xxz_xi_lower_bound(1.0)


@pytest.mark.parametrize("q, n", [(0.5, 4), (0.3, 7), (1.0, 5)])
def test_psi1_is_a_normalized_ground_state_with_one_flip(q, n):
    psi = xxz_psi1(q, n)
    assert np.linalg.norm(psi) == pytest.approx(1.0)
    assert np.linalg.norm(apply_hamiltonian(xxz_spec(q, n), psi)) <= 1e-10
    assert magnetization_sector(psi) == 1


def test_magnetization_counts_down_spins():
    np.testing.assert_array_equal(magnetization(2), [0, 1, 1, 2])
    mixed = np.zeros(4)
    mixed[[0, 3]] = 1 / np.sqrt(2)
    assert magnetization_sector(mixed) is None
