import math

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings, strategies as st

from conftest import Q_MINUS, Q_PLUS
from lgallee.equilibria import (
    Kind,
    boundary_equilibria,
    collapsed_classification,
    cubic_analysis,
    cubic_discriminant,
    fold_function,
    hopf_function,
    hopf_maximum,
    on_diagonal_det,
    on_diagonal_trace,
    positive_equilibria,
    saddle_node_thresholds,
)
from lgallee.errors import PreconditionError, ValidationError
from lgallee.model import ModelParams, jacobian


def sign_scan_count(A, M, Q, n=100_000):
    """Oracle: count sign changes of g on a uniform grid of (0, 1]."""
    u = np.linspace(0.0, 1.0, n + 1)[1:]
    T, L = 1 - A + M, A * (M + 1) - Q - M
    g = u**3 - T * u**2 - L * u + A * M
    s = np.sign(g)
    return int(np.count_nonzero(s[1:] * s[:-1] < 0))


def test_thresholds_closed_form():
    sn = saddle_node_thresholds(0.1, -0.1)
    assert sn.q_minus == pytest.approx(Q_MINUS, abs=1e-12)
    assert sn.q_plus == pytest.approx(Q_PLUS, abs=1e-12)
    assert sn.u_minus == pytest.approx((5 - math.sqrt(5)) / 20, abs=1e-12)
    assert sn.u_plus == pytest.approx((5 + math.sqrt(5)) / 20, abs=1e-12)


def test_no_thresholds_when_no_fold():
    assert saddle_node_thresholds(0.9, -0.9) is None


def test_threshold_validation():
    with pytest.raises(ValidationError):
        saddle_node_thresholds(1.2, -0.1)


@pytest.mark.parametrize("Q,count,case", [
    (0.2, 1, "II.i"), (0.363, 3, "II.ii"), (0.345, 1, None), (0.40, 1, None),
])
def test_root_counts(Q, count, case):
    ca = cubic_analysis(ModelParams(0.1, -0.1, Q, 0.2))
    assert ca.n_counted == count
    assert ca.n_counted == sign_scan_count(0.1, -0.1, Q)
    assert ca.consistent
    if case:
        assert ca.lemma_case == case


def test_case_I():
    ca = cubic_analysis(ModelParams(0.5, -0.05, 0.51, 0.1))
    assert ca.lemma_case == "I"
    assert ca.n_counted == 1


@pytest.mark.parametrize("Q", [Q_MINUS, Q_PLUS])
def test_double_roots_at_thresholds(Q):
    ca = cubic_analysis(ModelParams(0.1, -0.1, Q, 0.25))
    assert ca.has_double
    assert ca.n_counted == 3 and ca.n_distinct == 2
    assert abs(ca.delta) < 1e-12


@given(st.floats(0.01, 0.99), st.floats(-0.9, -0.001), st.floats(0.01, 1.5))
def test_roots_are_roots(A, M, Q):
    ca = cubic_analysis(ModelParams(A, M, Q, 0.2))
    for u, _ in ca.roots:
        assert 0 < u < 1
        assert abs(ca.g(u)) < 1e-10
    assert ca.consistent


@given(st.floats(0.01, 0.99), st.floats(-0.9, -0.001), st.floats(0.01, 1.5))
def test_root_count_matches_sign_scan(A, M, Q):
    ca = cubic_analysis(ModelParams(A, M, Q, 0.2))
    assume(not ca.has_double)
    gaps = np.diff([0.0] + [u for u, _ in ca.roots] + [1.0])
    assume(gaps.min() > 1e-4)
    assert ca.n_counted == sign_scan_count(A, M, Q)


def test_discriminant_sign():
    # three real roots -> positive discriminant
    assert cubic_discriminant(0.8, -0.173, -0.01) > 0


def _kinds(Q, S, A=0.1, M=-0.1):
    return [e.kind for e in positive_equilibria(ModelParams(A, M, Q, S))]


def test_figure_kinds():
    A_, S_, R_ = Kind.ATTRACTOR, Kind.SADDLE, Kind.REPELLER
    assert _kinds(0.51, 0.1, 0.5, -0.05) == [A_]
    assert _kinds(0.51, 0.045, 0.5, -0.05) == [R_]
    assert _kinds(0.363, 0.3) == [A_, S_, A_]
    assert _kinds(0.363, 0.2) == [A_, S_, R_]
    assert _kinds(0.363, 0.13) == [R_, S_, R_]
    assert _kinds(Q_MINUS, 0.25) == [Kind.STABLE_SADDLE_NODE, A_]
    assert _kinds(Q_PLUS, 0.25) == [A_, Kind.UNSTABLE_SADDLE_NODE]


def test_collapsed_labels_and_thresholds():
    e = collapsed_classification(ModelParams(0.1, -0.1, Q_PLUS, 0.25))
    assert e.label == "P2=P3" and e.multiplicity == 2
    e = collapsed_classification(ModelParams(0.1, -0.1, Q_MINUS, 0.25))
    assert e.label == "P1=P2"
    # below the threshold the P1=P2 node is unstable
    e = collapsed_classification(ModelParams(0.1, -0.1, Q_MINUS, 0.1))
    assert e.kind is Kind.UNSTABLE_SADDLE_NODE


def test_collapsed_requires_fold():
    with pytest.raises(PreconditionError):
        collapsed_classification(ModelParams(0.1, -0.1, 0.363, 0.25))


def test_cusp_at_bt_value():
    us = 0.8 - 2 * (5 + math.sqrt(5)) / 20
    s_bt = Q_PLUS * (0.8 - us) / (1 + 0.1 - 0.1 - us)
    e = collapsed_classification(ModelParams(0.1, -0.1, Q_PLUS, s_bt))
    assert e.kind is Kind.CUSP


def test_boundary():
    o, e1 = boundary_equilibria(ModelParams(0.1, -0.1, 0.363, 0.2))
    assert o.kind is Kind.NONHYPERBOLIC_SADDLE and o.u == 0 and o.v == 0
    assert e1.kind is Kind.SADDLE and e1.det < 0 and (e1.u, e1.v) == (1.0, 0.0)


def test_hopf_maximum_value():
    u, f = hopf_maximum(0.1, -0.1)
    assert f == pytest.approx(361 / 1200, abs=1e-12)
    assert u == pytest.approx(0.31666666666, abs=1e-8)


def _three_root_params(A, M, t, S):
    sn = saddle_node_thresholds(A, M)
    assume(sn is not None and sn.q_plus - sn.q_minus > 1e-6)
    Q = sn.q_minus + t * (sn.q_plus - sn.q_minus)
    return ModelParams(A, M, Q, S)


@settings(suppress_health_check=[HealthCheck.filter_too_much])
@given(st.floats(0.02, 0.3), st.floats(-0.3, -0.02), st.floats(0.01, 0.99), st.floats(0.01, 1.0))
def test_middle_of_three_is_saddle(A, M, t, S):
    p = _three_root_params(A, M, t, S)
    eqs = positive_equilibria(p)
    assume(len(eqs) == 3)
    assert eqs[1].kind is Kind.SADDLE
    assert eqs[0].kind is not Kind.SADDLE and eqs[2].kind is not Kind.SADDLE


@given(st.floats(0.01, 0.99), st.floats(-0.9, -0.001), st.floats(0.01, 1.5), st.floats(0.01, 1.0))
def test_closed_forms_match_matrix(A, M, Q, S):
    p = ModelParams(A, M, Q, S)
    for e in positive_equilibria(p):
        J = jacobian(e.position, p)
        assert abs(np.linalg.det(J) - float(on_diagonal_det(e.u, p))) < 1e-10
        assert abs(np.trace(J) - float(on_diagonal_trace(e.u, p))) < 1e-10


@given(st.floats(0.01, 0.99), st.floats(-0.9, -0.001), st.floats(0.01, 1.5), st.floats(0.01, 1.0))
def test_kinds_agree_with_eigenvalues(A, M, Q, S):
    p = ModelParams(A, M, Q, S)
    for e in positive_equilibria(p):
        if e.multiplicity != 1 or e.kind is Kind.MARGINAL:
            continue
        w = np.linalg.eigvals(jacobian(e.position, p))
        d = float(fold_function(e.u, A, M))
        assume(abs(d) > 1e-9 and abs(S - float(hopf_function(e.u, A, M))) > 1e-9)
        if e.kind is Kind.SADDLE:
            assert w.real.min() < 0 < w.real.max()
        elif e.kind is Kind.ATTRACTOR:
            assert np.all(w.real < 0)
        else:
            assert np.all(w.real > 0)


@given(st.floats(0.01, 0.99), st.floats(-0.9, -0.001), st.floats(0.01, 1.5), st.floats(0.01, 1.0))
def test_no_saddle_when_cubic_condition_holds(A, M, Q, S):
    T = 1 - A + M
    assume(T**3 < -27 * A * M)
    assert all(e.kind is not Kind.SADDLE for e in positive_equilibria(ModelParams(A, M, Q, S)))


@given(st.floats(0.01, 0.99), st.floats(-0.9, -0.001), st.floats(0.01, 1.5),
       st.floats(0.01, 1.0), st.floats(0.01, 1.0))
def test_positions_do_not_depend_on_S(A, M, Q, S1, S2):
    a = [e.u for e in positive_equilibria(ModelParams(A, M, Q, S1))]
    b = [e.u for e in positive_equilibria(ModelParams(A, M, Q, S2))]
    assert a == b
