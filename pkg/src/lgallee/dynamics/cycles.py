"""Limit cycles from the first-return map on a horizontal ray."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ..equilibria import Equilibrium, Kind, all_equilibria, positive_equilibria
from ..errors import PreconditionError
from ..model import ModelParams
from .integrator import Section, integrate

CYCLE_RTOL = 1e-11
CYCLE_ATOL = 1e-13
RETURN_BUDGET = 2.0e4
DEDUP_TOL = 1e-6


@dataclass
class LimitCycle:
    anchor: tuple[float, float]  # equilibrium the section starts from
    x: float  # fixed point on the ray v = anchor v, u > anchor u
    period: float
    stability: str  # "stable" | "unstable"
    slope: float  # derivative of the forward return map at x
    residual: float  # |P(x) - x|
    orbit: np.ndarray = field(repr=False)
    enclosed: tuple[str, ...] = ()

    normal = (0.0, 1.0)

    @property
    def closure(self) -> float:
        return float(np.hypot(*(self.orbit[-1] - self.orbit[0])))

    @property
    def section_point(self) -> tuple[float, float]:
        return (self.x, self.anchor[1])


def winding_number(poly: np.ndarray, point) -> int:
    d = poly - np.asarray(point, dtype=float)
    ang = np.arctan2(d[:, 1], d[:, 0])
    dang = np.diff(np.concatenate([ang, ang[:1]]))
    dang = (dang + np.pi) % (2 * np.pi) - np.pi
    return int(round(dang.sum() / (2 * np.pi)))


def polyline_distance(poly: np.ndarray, point) -> float:
    """Euclidean distance from ``point`` to the closed polyline ``poly``."""
    p = np.asarray(point, dtype=float)
    a = poly
    b = np.roll(poly, -1, axis=0)
    ab = b - a
    L2 = np.einsum("ij,ij->i", ab, ab)
    t = np.clip(np.einsum("ij,ij->i", p - a, ab) / np.where(L2 > 0, L2, 1.0), 0.0, 1.0)
    proj = a + t[:, None] * ab
    return float(np.min(np.hypot(*(proj - p).T)))


class ReturnMap:
    """First return to the ray {v = ve, u > ue}, in forward (+1) or reversed (-1) time."""

    def __init__(self, params, anchor, sign=1, budget=RETURN_BUDGET,
                 rtol=CYCLE_RTOL, atol=CYCLE_ATOL, equilibria=None):
        self.params = params
        self.ue, self.ve = float(anchor[0]), float(anchor[1])
        self.sign = sign
        self.budget = budget
        self.rtol, self.atol = rtol, atol
        self.equilibria = equilibria
        self.section = Section(1, self.ve, sign, self.ue, math.inf, 1)

    def run(self, x, record=False):
        return integrate((x, self.ve), self.params, self.budget, self.sign,
                         rtol=self.rtol, atol=self.atol, equilibria=self.equilibria,
                         section=self.section, record=record)

    def __call__(self, x) -> float:
        tr = self.run(x)
        if tr.reason != "section-event":
            return math.nan
        return float(tr.events[0, 1])

    def displacement(self, x) -> float:
        return self(x) - x


def _slope(pmap, x, dx):
    a, b = pmap(x - dx), pmap(x + dx)
    return (b - a) / (2 * dx)


def _refine(pmap, a, b):
    return brentq(pmap.displacement, a, b, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)


def find_limit_cycles(params: ModelParams, around: Equilibrium, *, n_seeds: int = 32,
                      x_max: float = 1.0, budget: float = RETURN_BUDGET,
                      rtol: float = CYCLE_RTOL, atol: float = CYCLE_ATOL) -> list[LimitCycle]:
    """Cycles crossing the horizontal ray to the right of ``around``.

    Displacements of the forward and reversed return maps are sampled on a
    geometric fan of seeds; each sign change is refined with Brent's method.
    """
    if around.kind in (Kind.SADDLE, Kind.NONHYPERBOLIC_SADDLE):
        raise PreconditionError("cycles are searched around non-saddle equilibria only")
    ue, ve = around.u, around.v
    eqs = all_equilibria(params)
    targets = [e.position for e in eqs]
    span = x_max - ue
    if span <= 0:
        return []
    seeds = ue + span * np.geomspace(1e-4, 0.995, n_seeds)
    found: list[tuple[float, int]] = []
    for sign in (1, -1):
        pmap = ReturnMap(params, (ue, ve), sign, budget, rtol, atol, targets)
        d = np.array([pmap.displacement(x) for x in seeds])
        for i in range(n_seeds - 1):
            if not (math.isfinite(d[i]) and math.isfinite(d[i + 1])):
                continue
            if d[i] == 0.0:
                found.append((float(seeds[i]), sign))
            elif d[i] * d[i + 1] < 0:
                found.append((_refine(pmap, seeds[i], seeds[i + 1]), sign))

    cycles: list[LimitCycle] = []
    fwd = ReturnMap(params, (ue, ve), 1, budget, rtol, atol, targets)
    bwd = ReturnMap(params, (ue, ve), -1, budget, rtol, atol, targets)
    for x, sign in sorted(found):
        if any(abs(x - c.x) < DEDUP_TOL for c in cycles):
            continue
        dx = min(1e-6, 0.1 * (x - ue))
        slope = _slope(fwd, x, dx)
        if math.isfinite(slope):
            stable = abs(slope) < 1
        else:
            sb = _slope(bwd, x, dx)
            if not math.isfinite(sb):
                continue
            stable = abs(sb) > 1
            slope = 1.0 / sb if sb != 0 else math.inf
        pm = fwd if sign == 1 else bwd
        tr = pm.run(x, record=True)
        if tr.reason != "section-event":
            continue
        orbit = tr.states
        if sign == -1:
            orbit = orbit[::-1]
        enclosed = tuple(e.label for e in eqs
                         if e.u > 0 and winding_number(orbit, e.position) != 0)
        cycles.append(LimitCycle((ue, ve), x, float(tr.t[-1]), "stable" if stable else "unstable",
                                 float(slope), abs(float(tr.events[0, 1]) - x), orbit, enclosed))
    return cycles


def cycle_inventory(params: ModelParams, same: float = 1e-5) -> list[LimitCycle]:
    """All cycles found around the non-saddle positive equilibria, each listed once.

    A cycle enclosing several equilibria is found from each of them; copies
    whose section point lies within ``same`` of an earlier orbit are dropped.
    """
    out: list[LimitCycle] = []
    for e in positive_equilibria(params):
        if e.kind not in (Kind.ATTRACTOR, Kind.REPELLER):
            continue
        for c in find_limit_cycles(params, e):
            if any(o.stability == c.stability and polyline_distance(o.orbit, c.section_point) < same
                   for o in out):
                continue
            out.append(c)
    return out
