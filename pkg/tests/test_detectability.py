import math

import numpy as np
import pytest

from ffcorr.errors import ScheduleMismatchError
from ffcorr.models import InteractionGraph, LayerSchedule
from ffcorr.services.detectability import (
    build_P,
    dl_bound,
    dl_check,
    gap_delta,
    greedy_color,
    remark_scan,
)
from ffcorr.services.hamiltonian import commutator_norm, interaction_graph
from ffcorr.services.linalg import complement_operator, dense_materialize, operator_norm, product, random_state
from ffcorr.services.spectral import ground_space
from ffcorr.services.xxz import xxz_gap_closed_form, xxz_psi1, xxz_spec

GAP_Q05_N4 = 0.4343145750507619


def test_path_graph_gets_even_odd_layers():
    schedule = greedy_color(interaction_graph(xxz_spec(0.5, 6)))
    assert schedule.c == 2
    assert schedule.assignment == (1, 2, 1, 2, 1)
    assert schedule.order == (1, 2)


def test_edgeless_and_triangle_graphs():
    assert greedy_color(InteractionGraph(n_terms=4)).c == 1
    triangle = InteractionGraph(n_terms=3, edges=((0, 1), (0, 2), (1, 2)), g=2)
    schedule = greedy_color(triangle)
    assert schedule.c == 3 == triangle.g + 1
    assert sorted(schedule.assignment) == [1, 2, 3]


@pytest.mark.parametrize("n", [3, 6, 9])
def test_layers_commute(n):
    spec = xxz_spec(0.7, n)
    schedule = greedy_color(interaction_graph(spec))
    for color in range(1, schedule.c + 1):
        layer = schedule.layer(color)
        for i in layer:
            for j in layer:
                assert commutator_norm(spec.terms[i], spec.terms[j], 2) <= 1e-10


def test_P_for_three_sites_is_L2_L1():
    spec = xxz_spec(0.5, 3)
    schedule = greedy_color(interaction_graph(spec))
    P = dense_materialize(build_P(spec, schedule), 8)
    L1 = dense_materialize(complement_operator(spec.terms[0], spec), 8)
    L2 = dense_materialize(complement_operator(spec.terms[1], spec), 8)
    np.testing.assert_allclose(P, L2 @ L1, atol=1e-12)


def test_P_fixes_ground_states_and_G_absorbs_it(xxz4, rng):
    P = build_P(xxz4, greedy_color(interaction_graph(xxz4)))
    psi = xxz_psi1(0.5, 4)
    np.testing.assert_allclose(P.matvec(psi), psi, atol=1e-12)
    G = ground_space(xxz4).projector()
    v = random_state(16, rng)
    np.testing.assert_allclose(G.matvec(P.matvec(v)), G.matvec(v), atol=1e-12)
    np.testing.assert_allclose(P.matvec(G.matvec(v)), G.matvec(v), atol=1e-12)


def test_schedule_mismatch(xxz4):
    with pytest.raises(ScheduleMismatchError, match="colors 2 terms"):
        build_P(xxz4, LayerSchedule(c=2, assignment=(1, 2)))
    with pytest.raises(ScheduleMismatchError, match="do not commute"):
        build_P(xxz4, LayerSchedule(c=2, assignment=(1, 1, 2)))


def test_bound_arithmetic():
    assert dl_bound(GAP_Q05_N4, 2) == pytest.approx(0.9497664, abs=1e-6)
    assert dl_bound(0.5, 0) == 0.0
    assert gap_delta(GAP_Q05_N4, 2) == pytest.approx(GAP_Q05_N4 / (4 + GAP_Q05_N4))
    assert gap_delta(math.inf, 2) == 1.0


def test_dl_check_xxz(xxz4):
    report = dl_check(xxz4)
    assert report.g == 2 and report.c == 2
    assert report.epsilon == pytest.approx(GAP_Q05_N4, abs=1e-10)
    assert report.bound == pytest.approx(0.9497664, abs=1e-6)
    assert report.passed and report.pp_passed
    assert report.pp_min >= -1e-10
    assert report.pp_max <= 1 - report.delta + 1e-10
    assert report.dl_norm == pytest.approx(1 - GAP_Q05_N4, abs=1e-8)


def test_dl_norm_cross_checks(xxz4):
    schedule = greedy_color(interaction_graph(xxz4))
    P = build_P(xxz4, schedule)
    G = ground_space(xxz4).projector()
    dense = np.linalg.norm(dense_materialize(P - G, 16), 2)
    assert operator_norm(P - G, 16).value == pytest.approx(dense, abs=1e-8)
    assert dl_check(xxz4, schedule).dl_norm == pytest.approx(dense, abs=1e-10)


def test_commuting_spec_gives_P_equal_G(commuting):
    report = dl_check(commuting)
    assert report.g == 0 and report.c == 1
    assert report.dl_norm <= 1e-12
    assert report.passed


def test_within_layer_order_is_irrelevant(rng):
    spec = xxz_spec(0.5, 7)
    schedule = greedy_color(interaction_graph(spec))
    P = build_P(spec, schedule)

    def layer(indices):
        return product([complement_operator(spec.terms[i], spec) for i in indices], spec.dim)

    shuffled = layer([5, 1, 3]) @ layer([4, 0, 2])
    v = random_state(spec.dim, rng)
    np.testing.assert_allclose(P.matvec(v), shuffled.matvec(v), atol=1e-12)


def test_reversed_layers_give_the_same_norm(xxz4):
    schedule = greedy_color(interaction_graph(xxz4))
    forward = dl_check(xxz4, schedule)
    backward = dl_check(xxz4, schedule.reversed())
    assert backward.dl_norm == pytest.approx(forward.dl_norm, abs=1e-12)


def test_remark_single_point():
    (row,) = remark_scan([0.5], [4], reverse=True)
    assert row.residual <= 1e-8
    assert row.reversed_residual <= 1e-8
    assert row.passed


def test_remark_two_sites_and_gapless_chain():
    rows = remark_scan([1.0], [2, 3])
    assert [row.n for row in rows] == [2, 3]
    assert rows[0].epsilon == pytest.approx(1.0)
    assert rows[0].dl_norm == pytest.approx(0.0, abs=1e-12)
    assert all(row.passed for row in rows)


def test_remark_scan_order_does_not_depend_on_threads():
    serial = remark_scan([0.3, 0.7], [3, 4], threads=1)
    parallel = remark_scan([0.3, 0.7], [3, 4], threads=3)
    assert [(r.q, r.n) for r in parallel] == [(0.3, 3), (0.3, 4), (0.7, 3), (0.7, 4)]
    assert [r.dl_norm for r in parallel] == pytest.approx([r.dl_norm for r in serial], abs=1e-14)


@pytest.mark.slow
@pytest.mark.parametrize("q", [0.3, 0.5, 0.7, 0.9])
def test_detectability_grid(q):
    for n in range(3, 11):
        report = dl_check(xxz_spec(q, n))
        assert report.epsilon == pytest.approx(xxz_gap_closed_form(q, n), abs=1e-8)
        assert report.passed, f"n={n}"
        assert report.pp_min >= -1e-9 and report.pp_max <= 1 - report.delta + 1e-9


@pytest.mark.slow
def test_remark_grid():
    rows = remark_scan([0.3, 0.5, 0.7, 0.9], range(3, 11))
    failures = [(row.q, row.n, row.residual) for row in rows if not row.passed]
    assert failures == []
