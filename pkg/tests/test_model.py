import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lgallee.errors import DomainError, ScopeWarning, ValidationError
from lgallee.model import (
    DimensionalParams,
    ModelParams,
    blowup_jacobian,
    blowup_vector_field,
    dimensional_vector_field,
    dimensionalize,
    jacobian,
    nondimensionalize,
    origin_character,
    prey_nullcline,
    time_scale,
    vector_field,
)

A_ = st.floats(0.01, 0.99)
M_ = st.floats(-0.9, -0.001)
Q_ = st.floats(0.01, 2.0)
S_ = st.floats(0.01, 2.0)
UV = st.floats(0.001, 1.5)


@pytest.mark.parametrize("kw,msg", [
    (dict(A=1.5, M=-0.1, Q=0.3, S=0.2), "A must lie in (0,1)"),
    (dict(A=0.0, M=-0.1, Q=0.3, S=0.2), "A must lie in (0,1)"),
    (dict(A=0.1, M=-0.1, Q=0.0, S=0.2), "Q must be positive"),
    (dict(A=0.1, M=-0.1, Q=0.3, S=-1.0), "S must be positive"),
    (dict(A=0.1, M=math.nan, Q=0.3, S=0.2), "finite"),
])
def test_params_validation(kw, msg):
    with pytest.raises(ValidationError, match=msg.replace("(", r"\(").replace(")", r"\)")):
        ModelParams(**kw)


def test_nonnegative_m_warns_but_builds():
    with pytest.warns(ScopeWarning):
        p = ModelParams(0.1, 0.05, 0.3, 0.2)
    assert p.M == 0.05


def test_dimensional_validation():
    with pytest.raises(ValidationError):
        DimensionalParams(r=1, K=1, q=1, a=2, s=1, h=1, m=-0.1)  # a/K >= 1
    with pytest.raises(ValidationError):
        DimensionalParams(r=-1, K=1, q=1, a=0.5, s=1, h=1, m=-0.1)


def test_nondimensionalize_values():
    dp = DimensionalParams(r=2.0, K=4.0, q=3.0, a=1.0, s=0.5, h=1.5, m=-0.4)
    p, st_ = nondimensionalize(dp, (2.0, 3.0))
    assert p.A == pytest.approx(0.25)
    assert p.M == pytest.approx(-0.1)
    assert p.Q == pytest.approx(1.5 * 3.0 / 8.0)
    assert p.S == pytest.approx(0.5 / 8.0)
    assert st_ == pytest.approx((0.5, 3.0 / 6.0))


@given(A_, M_, Q_, S_, st.floats(0.1, 5), st.floats(0.5, 10), st.floats(0.1, 4))
def test_dimensionalize_round_trip(A, M, Q, S, r, K, h):
    p = ModelParams(A, M, Q, S)
    dp, ds = dimensionalize(p, (0.3, 0.4), r=r, K=K, h=h)
    p2, s2 = nondimensionalize(dp, ds)
    assert np.allclose(p2.as_tuple(), p.as_tuple(), rtol=1e-12)
    assert np.allclose(s2, (0.3, 0.4), rtol=1e-12)


@given(A_, M_, Q_, S_, UV, UV, st.floats(0.2, 3), st.floats(0.5, 5), st.floats(0.2, 3))
def test_dimensional_field_is_rescaled_field(A, M, Q, S, u, v, r, K, h):
    """dN/dt = K du/dtau * dtau/dt and dP/dt = hK dv/dtau * dtau/dt."""
    p = ModelParams(A, M, Q, S)
    dp, (N, P) = dimensionalize(p, (u, v), r=r, K=K, h=h)
    lhs = dimensional_vector_field((N, P), dp)
    scale = time_scale((u, v), p, r, K)
    rhs = vector_field((u, v), p) * np.array([K, h * K]) * scale
    assert np.allclose(lhs, rhs, rtol=1e-9, atol=1e-12)


def test_dimensional_field_domain():
    dp = DimensionalParams(r=1, K=1, q=1, a=0.5, s=1, h=1, m=-0.1)
    with pytest.raises(DomainError):
        dimensional_vector_field((0.0, 1.0), dp)


def test_vector_field_rejects_nonfinite():
    with pytest.raises(DomainError):
        vector_field((math.inf, 0.1), ModelParams(0.1, -0.1, 0.3, 0.2))


@given(A_, M_, Q_, S_, UV, UV)
def test_jacobian_matches_central_differences(A, M, Q, S, u, v):
    p = ModelParams(A, M, Q, S)
    h = 1e-6
    fd = np.column_stack([
        (vector_field((u + h, v), p) - vector_field((u - h, v), p)) / (2 * h),
        (vector_field((u, v + h), p) - vector_field((u, v - h), p)) / (2 * h),
    ])
    assert np.allclose(jacobian((u, v), p), fd, rtol=1e-6, atol=1e-8)


@given(A_, M_, Q_, S_, st.floats(0.01, 2.0), st.floats(0.01, 1.5))
def test_blowup_is_pulled_back_field_over_y(A, M, Q, S, x, y):
    """(u, v) = (xy, y): x' = (u' - x v')/y, y' = v'; the chart field divides that by y."""
    p = ModelParams(A, M, Q, S)
    du, dv = vector_field((x * y, y), p)
    pulled = np.array([(du - x * dv) / y, dv]) / y
    assert np.allclose(blowup_vector_field((x, y), p), pulled, rtol=1e-9, atol=1e-12)


def test_origin_character():
    p = ModelParams(0.1, -0.1, 0.363, 0.2)
    rep = origin_character(p)
    assert rep.verdict == "nonhyperbolic-saddle"
    assert rep.has_I_x and rep.I_x == pytest.approx(0.2 / 0.1)
    J = blowup_jacobian((rep.I_x, 0.0), p)
    assert np.allclose(J, rep.jacobian_I, atol=1e-7)
    w0 = np.sort(np.linalg.eigvals(blowup_jacobian((0.0, 0.0), p)).real)
    assert np.allclose(w0, sorted(rep.eigenvalues_O), atol=1e-9)
    # S <= |M|: no interior point on the blow-up axis
    assert not origin_character(ModelParams(0.1, -0.3, 0.363, 0.2)).has_I_x


def test_jacobian_is_zero_at_origin():
    assert np.all(jacobian((0.0, 0.0), ModelParams(0.1, -0.1, 0.363, 0.2)) == 0)


def test_prey_nullcline_vanishes_on_equilibria():
    p = ModelParams(0.1, -0.1, 0.363, 0.2)
    from lgallee.equilibria import positive_equilibria

    for e in positive_equilibria(p):
        assert prey_nullcline(e.u, p) == pytest.approx(e.v, abs=1e-12)


def test_with_and_tuple():
    p = ModelParams(0.1, -0.1, 0.363, 0.2)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        q = p.with_(S=0.3)
    assert q.as_tuple() == (0.1, -0.1, 0.363, 0.3)
    assert p.T == pytest.approx(0.8) and p.L == pytest.approx(0.1 * 0.9 - 0.363 + 0.1)
