"""Bisection in S for heteroclinic and homoclinic connections at fixed (A, M, Q).

Separation functionals (first crossing only):

* heteroclinic: W^u_NW(1,0) forward against W^s_SW(P2) backward, compared by
  their v-values on the vertical line u = u(P3);
* homoclinic: W^u_NE(P2) forward against W^s_SW(P2) backward, compared by
  their u-values on the ray v = v(P3), u > u(P3).

A zero of the functional is a connection.  Branches that miss the section or
graze it are reported with :class:`ManifoldSectionError`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..equilibria import all_equilibria
from ..errors import ManifoldSectionError, PreconditionError, ValidationError
from ..model import ModelParams, vector_field
from .integrator import Section, integrate
from .manifolds import SEED_OFFSET, saddle_directions

CONN_RTOL = 1e-11
CONN_ATOL = 1e-13
CONN_TAU = 1.0e5
GRAZE_TOL = 1e-3  # min |normal field component| / |field| at the crossing
BRACKET_TOL = 1e-8


@dataclass
class ConnectionResult:
    kind: str
    S_c: float | None
    bracket: tuple[float, float]
    log: list[tuple[float, float]] = field(default_factory=list)  # (S, separation)

    @property
    def found(self) -> bool:
        return self.S_c is not None


def _equilibria(params):
    eqs = {e.label: e for e in all_equilibria(params)}
    pos = [e for e in eqs.values() if e.label.startswith("P")]
    if len(pos) != 3 or any(e.multiplicity != 1 for e in pos):
        raise PreconditionError(f"three distinct positive equilibria needed at S={params.S!r}")
    return eqs


def _branch_crossing(params, saddle, kind, tag, section, name):
    es, eu = saddle_directions(saddle, params)
    base = es if kind == "stable" else eu
    # pick the side whose direction of motion matches the tag
    for side in (1, -1):
        vec = base * side
        motion = -vec if kind == "stable" else vec
        sx = "E" if motion[0] > 0 else "W"
        sy = "N" if motion[1] > 0 else "S"
        if sy + sx == tag:
            break
    else:
        raise ManifoldSectionError(f"{name}: no eigen-direction heading {tag}", name)
    seed = np.array(saddle.position) + SEED_OFFSET * vec
    direction = "backward" if kind == "stable" else "forward"
    tr = integrate(seed, params, CONN_TAU, direction, rtol=CONN_RTOL, atol=CONN_ATOL,
                   section=section, record=False)
    if tr.reason != "section-event":
        raise ManifoldSectionError(f"{name} never reached the section (ended: {tr.reason})", name)
    _, cu, cv = tr.events[0]
    f = vector_field((cu, cv), params)
    if abs(f[section.axis]) < GRAZE_TOL * float(np.hypot(*f)):
        raise ManifoldSectionError(f"{name} grazes the section at ({cu:.6g}, {cv:.6g})", name)
    return float(cu), float(cv)


def separation(A: float, M: float, Q: float, S: float, kind: str) -> float:
    params = ModelParams(A, M, Q, S)
    eqs = _equilibria(params)
    p2, p3 = eqs["P2"], eqs["P3"]
    if kind == "heteroclinic":
        sec = Section(0, p3.u, 0, 0.0, math.inf, 1)
        _, v_u = _branch_crossing(params, eqs["E"], "unstable", "NW", sec, "W^u_NW(1,0)")
        _, v_s = _branch_crossing(params, p2, "stable", "SW", sec, "W^s_SW(P2)")
        return v_u - v_s
    if kind == "homoclinic":
        sec = Section(1, p3.v, 0, p3.u, math.inf, 1)
        u_u, _ = _branch_crossing(params, p2, "unstable", "NE", sec, "W^u_NE(P2)")
        u_s, _ = _branch_crossing(params, p2, "stable", "SW", sec, "W^s_SW(P2)")
        return u_u - u_s
    raise ValidationError(f"kind must be heteroclinic or homoclinic, got {kind!r}")


def connection_search(A: float, M: float, Q: float, S_bracket, kind: str = "heteroclinic",
                      tol: float = BRACKET_TOL, callback=None) -> ConnectionResult:
    """Bisect the separation functional in S; ``S_c`` is None without a sign change."""
    lo, hi = map(float, S_bracket)
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise ValidationError("S bracket must satisfy lo < hi")
    if kind not in ("heteroclinic", "homoclinic"):
        raise ValidationError(f"kind must be heteroclinic or homoclinic, got {kind!r}")
    res = ConnectionResult(kind, None, (lo, hi))

    def ev(S):
        d = separation(A, M, Q, S, kind)
        res.log.append((S, d))
        if callback is not None:
            callback(S, d)
        return d

    f_lo, f_hi = ev(lo), ev(hi)
    if f_lo == 0.0:
        res.S_c = lo
        return res
    if f_hi == 0.0:
        res.S_c = hi
        return res
    if (f_lo > 0) == (f_hi > 0):
        return res
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = ev(mid)
        if f_mid == 0.0:
            lo = hi = mid
            break
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    res.S_c = 0.5 * (lo + hi)
    return res
