"""Stable and unstable manifolds of hyperbolic saddles."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..equilibria import Equilibrium, Kind, all_equilibria
from ..errors import PreconditionError
from ..model import ModelParams, jacobian
from .integrator import Trajectory, integrate

SEED_OFFSET = 1e-6
ARC_CAP = 50.0
BRANCH_TAU = 1.0e6
VERDICT_RADIUS = 1e-3


def compass(d) -> str:
    """Compass tag of a direction: E/N/W/S on the axes, NE/NW/SW/SE otherwise."""
    dx, dy = float(d[0]), float(d[1])
    n = math.hypot(dx, dy)
    if n == 0:
        raise ValueError("zero direction")
    ax, ay = abs(dx) / n < 1e-12, abs(dy) / n < 1e-12
    if ay:
        return "E" if dx > 0 else "W"
    if ax:
        return "N" if dy > 0 else "S"
    return ("N" if dy > 0 else "S") + ("E" if dx > 0 else "W")


@dataclass
class ManifoldBranch:
    saddle: str
    position: tuple[float, float]
    type: str  # "stable" | "unstable"
    tag: str  # direction of motion along the branch near the saddle
    seed: tuple[float, float]
    polyline: np.ndarray = field(repr=False)
    verdict: str = "undecided"  # "eq:<label>" | "cycle:<i>" | "domain-boundary" | "undecided"
    reason: str = ""
    trajectory: Trajectory | None = field(default=None, repr=False)

    @property
    def name(self) -> str:
        s = "s" if self.type == "stable" else "u"
        return f"W^{s}_{self.tag}({self.saddle})"


def saddle_directions(saddle: Equilibrium, params: ModelParams):
    """(stable unit eigenvector, unstable unit eigenvector) of a hyperbolic saddle."""
    J = jacobian(saddle.position, params)
    w, V = np.linalg.eig(J)
    if np.iscomplexobj(w) and np.any(np.abs(np.imag(w)) > 0):
        raise PreconditionError("complex eigenvalues: not a saddle")
    w = np.real(w)
    V = np.real(V)
    if not (w.min() < 0 < w.max()):
        raise PreconditionError(f"eigenvalues {w} do not form a saddle")
    i_s, i_u = int(np.argmin(w)), int(np.argmax(w))
    return V[:, i_s] / np.linalg.norm(V[:, i_s]), V[:, i_u] / np.linalg.norm(V[:, i_u])


def _verdict(tr: Trajectory, targets, cycles, radius):
    if tr.reason == "converged-to-equilibrium":
        return f"eq:{targets[tr.equilibrium][0]}"
    if tr.reason == "left-domain":
        return "domain-boundary"
    end = np.array(tr.end)
    best = None
    for lab, pos in targets:
        d = math.hypot(end[0] - pos[0], end[1] - pos[1])
        if d < radius and (best is None or d < best[0]):
            best = (d, f"eq:{lab}")
    if best is not None:
        return best[1]
    for k, c in enumerate(cycles or ()):
        if np.min(np.hypot(*(c.orbit - end).T)) < radius:
            return f"cycle:{k}"
    return "undecided"


def trace_branch(saddle: Equilibrium, params: ModelParams, kind: str, side: int, *,
                 offset=SEED_OFFSET, arc_cap=ARC_CAP, tau=BRANCH_TAU, rtol=1e-10, atol=1e-12,
                 cycles=None, record=True) -> ManifoldBranch:
    es, eu = saddle_directions(saddle, params)
    vec = (es if kind == "stable" else eu) * side
    seed = np.array(saddle.position) + offset * vec
    eqs = [e for e in all_equilibria(params) if e.label != saddle.label]
    targets = [(e.label, e.position) for e in eqs]
    direction = "backward" if kind == "stable" else "forward"
    tr = integrate(seed, params, tau, direction, rtol=rtol, atol=atol,
                   equilibria=[p for _, p in targets], arclength=arc_cap, record=record)
    tag = compass(-vec if kind == "stable" else vec)
    return ManifoldBranch(saddle.label, (saddle.u, saddle.v), kind, tag, tuple(seed),
                          tr.states, _verdict(tr, targets, cycles, VERDICT_RADIUS), tr.reason, tr)


def trace_manifolds(saddle: Equilibrium, params: ModelParams, *, cycles=None,
                    offset=SEED_OFFSET, arc_cap=ARC_CAP, tau=BRANCH_TAU) -> list[ManifoldBranch]:
    """The four branches (two stable, two unstable) of a hyperbolic saddle."""
    if saddle.kind is not Kind.SADDLE:
        raise PreconditionError(f"{saddle.label or saddle.position} is {saddle.kind}, not a saddle")
    return [trace_branch(saddle, params, kind, side, offset=offset, arc_cap=arc_cap, tau=tau,
                         cycles=cycles)
            for kind in ("stable", "unstable") for side in (1, -1)]


def find_branch(branches, kind: str, tag: str) -> ManifoldBranch:
    for b in branches:
        if b.type == kind and b.tag == tag:
            return b
    raise KeyError(f"no {kind} branch heading {tag}")
