import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp

from lgallee.dynamics import (
    Section,
    attracting_sets,
    basins,
    connection_search,
    find_branch,
    find_limit_cycles,
    integrate,
    trace_manifolds,
    winding_number,
)
from lgallee.equilibria import Kind, all_equilibria, positive_equilibria
from lgallee.errors import DomainError, PreconditionError, StiffnessError, ValidationError
from lgallee.model import DimensionalParams, ModelParams, dimensional_vector_field, nondimensionalize, time_scale, vector_field

F04A = ModelParams(0.5, -0.05, 0.51, 0.1)
F04B = ModelParams(0.5, -0.05, 0.51, 0.045)
F05B = ModelParams(0.1, -0.1, 0.363, 0.2)
F09A = ModelParams(0.1, -0.1, 0.363, 0.3)

pytestmark = pytest.mark.usefixtures("jit")


def _eq(params, label):
    return next(e for e in all_equilibria(params) if e.label == label)


def _open_polyline_distance(poly, p):
    a, b = poly[:-1], poly[1:]
    ab = b - a
    L2 = np.einsum("ij,ij->i", ab, ab)
    t = np.clip(np.einsum("ij,ij->i", p - a, ab) / np.where(L2 > 0, L2, 1.0), 0.0, 1.0)
    return float(np.min(np.hypot(*(a + t[:, None] * ab - p).T)))


# integrator ----------------------------------------------------------------

def test_start_at_equilibrium_stops_immediately():
    p1 = positive_equilibria(F04A)[0]
    tr = integrate(p1.position, F04A, 100.0)
    assert tr.reason == "converged-to-equilibrium"
    assert tr.t[-1] == 0.0


@pytest.mark.parametrize("start", [(0.5, 0.2), (0.6, 0.4), (0.9, 0.9)])
def test_attractor_is_reached(start):
    p = positive_equilibria(F04A)[0]
    tr = integrate(start, F04A, 1e5)
    assert tr.reason == "converged-to-equilibrium"
    assert math.hypot(tr.end[0] - p.u, tr.end[1] - p.v) < 1e-9


def test_samples_strictly_increasing():
    tr = integrate((0.6, 0.4), F05B, 200.0)
    assert np.all(np.diff(tr.t) > 0)


def test_matches_scipy_dop853():
    tau = 80.0
    ours = integrate((0.6, 0.4), F05B, tau)
    ref = solve_ivp(lambda t, y: vector_field(y, F05B), (0, tau), [0.6, 0.4],
                    method="DOP853", rtol=1e-12, atol=1e-14)
    assert ours.reason == "time-limit"
    assert np.max(np.abs(np.array(ours.end) - ref.y[:, -1])) < 1e-6


def test_dense_output_matches_scipy():
    ours = integrate((0.6, 0.4), F05B, 40.0)
    ref = solve_ivp(lambda t, y: vector_field(y, F05B), (0, 40.0), [0.6, 0.4],
                    method="DOP853", rtol=1e-12, atol=1e-14, dense_output=True)
    for t in np.linspace(0.3, 39.7, 25):
        assert np.max(np.abs(np.asarray(ours(t)) - ref.sol(t))) < 1e-6


@pytest.mark.parametrize("start", [(0.6, 0.4), (0.3, 0.7), (0.8, 0.1)])
def test_reversibility(start):
    fw = integrate(start, F05B, 5.0, equilibria=[])
    bw = integrate(fw.end, F05B, 5.0, "backward", equilibria=[])
    assert math.hypot(bw.end[0] - start[0], bw.end[1] - start[1]) < 1e-6


@given(st.floats(0.01, 2.0), st.sampled_from([F04A, F05B, F09A]))
def test_axis_invariance(v0, params):
    tr = integrate((0.0, v0), params, 50.0)
    assert np.all(tr.u == 0.0)
    assert np.all(np.diff(tr.v) < 0)


@settings(max_examples=50)
@given(st.floats(1e-3, 2.0), st.floats(1e-3, 2.0), st.sampled_from([F04A, F05B, F09A]))
def test_trapping_region(u0, v0, params):
    tr = integrate((u0, v0), params, 5e3, box=(-1e-12, 10.0, -1e-12, 10.0))
    inside = (tr.u <= 1 + 1e-6) & (tr.v <= 1 + 1e-6) & (tr.u >= 0) & (tr.v >= 0)
    assert inside[-1]
    first = int(np.argmax(inside))
    assert inside[first:].all()


def test_conjugacy_with_dimensional_orbit():
    dp = DimensionalParams(r=1.5, K=2.0, q=0.51 * 1.5 * 2.0 / 0.5, a=1.0, s=0.1 * 1.5 * 2.0, h=0.5, m=-0.1)
    params, st0 = nondimensionalize(dp, (1.2, 0.4))
    assert params.as_tuple() == pytest.approx(F04A.as_tuple())
    t_end = 15.0
    ref = solve_ivp(lambda t, y: dimensional_vector_field(y, dp), (0, t_end), [1.2, 0.4],
                    method="DOP853", rtol=1e-12, atol=1e-14, dense_output=True)
    ts = np.linspace(0, t_end, 400)
    Y = ref.sol(ts)
    mapped = np.column_stack([Y[0] / dp.K, Y[1] / (dp.h * dp.K)])
    rates = [time_scale(s, params, dp.r, dp.K) for s in mapped]
    tau_end = float(np.trapezoid(rates, ts)) if hasattr(np, "trapezoid") else float(np.trapz(rates, ts))
    tr = integrate(st0, params, tau_end * 1.05, equilibria=[])
    dense = np.array([tr(t) for t in np.linspace(0, tr.t[-1], 20000)])
    d = max(_open_polyline_distance(dense, p) for p in mapped)
    assert d < 1e-6


def test_section_event():
    p3 = positive_equilibria(F05B)[2]
    sec = Section(1, p3.v, 1, p3.u, math.inf, 1)
    tr = integrate((p3.u + 0.05, p3.v), F05B, 1e4, section=sec)
    assert tr.reason == "section-event"
    _, u, v = tr.events[0]
    assert abs(v - p3.v) < 1e-10 and u > p3.u


def test_stiffness_error_carries_trajectory():
    with pytest.raises(StiffnessError) as exc:
        integrate((1e5, 0.5), F05B, 1.0, box=(-1.0, 1e12, -1.0, 1e12))
    assert len(exc.value.trajectory) >= 1


def test_integrate_validation():
    with pytest.raises(DomainError):
        integrate((math.nan, 0.1), F05B, 1.0)
    with pytest.raises(ValidationError):
        integrate((0.5, 0.1), F05B, -1.0)
    with pytest.raises(ValidationError):
        integrate((0.5, 0.1), F05B, 1.0, direction="sideways")


def test_trajectories_deterministic():
    a = integrate((0.6, 0.4), F05B, 300.0)
    b = integrate((0.6, 0.4), F05B, 300.0)
    assert np.array_equal(a.states, b.states) and np.array_equal(a.t, b.t)


# cycles ----------------------------------------------------------------------

def test_f04b_single_stable_cycle():
    p = positive_equilibria(F04B)[0]
    assert p.kind is Kind.REPELLER
    cyc = find_limit_cycles(F04B, p)
    assert len(cyc) == 1
    c = cyc[0]
    assert c.stability == "stable" and abs(c.slope) < 1
    assert c.closure < 1e-7 and c.residual < 1e-9
    assert winding_number(c.orbit, p.position) == 1
    # forward orbits from both sides approach the cycle
    for x in (c.x - 0.05, c.x + 0.05):
        tr = integrate((x, p.v), F04B, 5e3, equilibria=[])
        assert np.min(np.hypot(*(c.orbit - np.array(tr.end)).T)) < 1e-3


def test_no_cycle_around_f04a_attractor():
    p = positive_equilibria(F04A)[0]
    assert find_limit_cycles(F04A, p) == []


def test_cycle_search_rejects_saddle():
    with pytest.raises(PreconditionError):
        find_limit_cycles(F05B, positive_equilibria(F05B)[1])


def test_enclosure_winding_numbers():
    params = ModelParams(0.1, -0.1, 0.363, 0.13)
    p1 = positive_equilibria(params)[0]
    cyc = [c for c in find_limit_cycles(params, p1) if c.stability == "stable"]
    assert cyc
    c = cyc[-1]
    assert set(c.enclosed) == {"P1", "P2", "P3"}
    for e in positive_equilibria(params):
        assert winding_number(c.orbit, e.position) == 1
    assert winding_number(c.orbit, (0.95, 0.05)) == 0


# manifolds -------------------------------------------------------------------

def test_manifold_verdicts_f09a():
    branches = trace_manifolds(_eq(F09A, "E"), F09A)
    assert find_branch(branches, "unstable", "NW").verdict == "eq:P3"


def test_manifold_verdicts_f09e():
    p = ModelParams(0.1, -0.1, 0.363, 0.18)
    assert find_branch(trace_manifolds(_eq(p, "E"), p), "unstable", "NW").verdict == "eq:P1"


def test_manifold_verdicts_f09c():
    p = ModelParams(0.1, -0.1, 0.363, 0.235)
    br = trace_manifolds(_eq(p, "P2"), p)
    assert find_branch(br, "stable", "NE").verdict == "eq:O"
    e_br = trace_manifolds(_eq(p, "E"), p)
    assert find_branch(e_br, "unstable", "NW").verdict == "eq:P1"


def test_manifold_seeds_on_eigenvectors():
    p2 = _eq(F05B, "P2")
    for b in trace_manifolds(p2, F05B):
        d = np.hypot(b.polyline[0, 0] - p2.u, b.polyline[0, 1] - p2.v)
        assert d == pytest.approx(1e-6, rel=1e-9)


def test_manifolds_need_saddle():
    with pytest.raises(PreconditionError):
        trace_manifolds(positive_equilibria(F05B)[0], F05B)


# basins ----------------------------------------------------------------------

def test_attractor_cells_map_to_themselves():
    att, cyc = attracting_sets(F09A)
    assert [e.label for e in att] == ["P1", "P3"] and cyc == []
    for k, e in enumerate(att):
        g = basins(F09A, (e.u - 1e-4, e.u + 1e-4, e.v - 1e-4, e.v + 1e-4), 1, attractors=(att, cyc))
        assert g.ids[0, 0] == k


def test_separatrix_splits_basins():
    # points just either side of W^s(P2) at the P2 abscissa go to different attractors
    p2 = _eq(F09A, "P2")
    br = find_branch(trace_manifolds(p2, F09A), "stable", "SW")
    att = attracting_sets(F09A)
    ids = set()
    for dv in (-2e-3, 2e-3):
        g = basins(F09A, (p2.u - 1e-5, p2.u + 1e-5, p2.v + dv - 1e-5, p2.v + dv + 1e-5), 1,
                   attractors=att)
        ids.add(int(g.ids[0, 0]))
    assert ids == {0, 1}
    assert br.polyline.shape[0] > 2


def test_basins_deterministic_across_workers():
    a = basins(F09A, resolution=20, workers=1)
    b = basins(F09A, resolution=20, workers=4)
    assert np.array_equal(a.ids, b.ids)
    assert set(a.counts()) <= {"P1", "P3", "undecided"}


def test_basins_validation():
    with pytest.raises(ValidationError):
        basins(F09A, (0, 0, 0, 1), 10)
    with pytest.raises(ValidationError):
        basins(F09A, (0, 1, 0, 1), 0)
    with pytest.raises(PreconditionError):
        basins(ModelParams(0.1, -0.1, 0.363, 0.13), resolution=2, detect_cycles=False)


# connections -----------------------------------------------------------------

def test_connection_without_sign_change():
    r = connection_search(0.1, -0.1, 0.363, (0.26, 0.3), "heteroclinic")
    assert r.S_c is None and not r.found
    assert len(r.log) == 2


def test_connection_validation():
    with pytest.raises(ValidationError):
        connection_search(0.1, -0.1, 0.363, (0.3, 0.235))
    with pytest.raises(ValidationError):
        connection_search(0.1, -0.1, 0.363, (0.235, 0.3), "periodic")
