"""Basin-of-attraction grids."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..equilibria import Kind, positive_equilibria
from ..errors import PreconditionError, ValidationError
from ..model import ModelParams
from . import _kernel as K
from .cycles import LimitCycle, cycle_inventory
from .integrator import ATOL, BOX, RTOL

CAPTURE = 1e-3
BASIN_TAU = 2.0e5
UNDECIDED = -1
SAME_CYCLE = 1e-5
DEFAULT_WINDOW = (0.0, 1.0, 0.0, 1.0)


@dataclass
class BasinGrid:
    window: tuple[float, float, float, float]  # umin umax vmin vmax
    resolution: int
    u: np.ndarray  # cell centres
    v: np.ndarray
    ids: np.ndarray = field(repr=False)  # ids[i, j] at (u[j], v[i]); -1 = undecided
    attractors: list[str] = field(default_factory=list)  # id -> name

    def name(self, i: int) -> str:
        return "undecided" if i == UNDECIDED else self.attractors[i]

    def counts(self) -> dict[str, int]:
        vals, n = np.unique(self.ids, return_counts=True)
        return {self.name(int(k)): int(c) for k, c in zip(vals, n)}

    @property
    def undecided_fraction(self) -> float:
        return float(np.mean(self.ids == UNDECIDED))


def attracting_sets(params: ModelParams, detect_cycles: bool = True):
    """(attracting equilibria, stable cycles) at ``params``."""
    att = [e for e in positive_equilibria(params)
           if e.kind in (Kind.ATTRACTOR, Kind.STABLE_SADDLE_NODE)]
    cycles: list[LimitCycle] = []
    if detect_cycles:
        cycles = [c for c in cycle_inventory(params, SAME_CYCLE) if c.stability == "stable"]
    return att, cycles


def _check(window, resolution):
    if len(window) != 4:
        raise ValidationError("window needs umin umax vmin vmax")
    w = tuple(map(float, window))
    if not all(math.isfinite(x) for x in w) or not (w[1] > w[0] and w[3] > w[2]):
        raise ValidationError("window must have positive width and height")
    if int(resolution) < 1:
        raise ValidationError("resolution must be >= 1")
    return w, int(resolution)


def basins(params: ModelParams, window=DEFAULT_WINDOW, resolution: int = 100, *,
           tau_budget: float = BASIN_TAU, capture: float = CAPTURE, workers: int = 1,
           detect_cycles: bool = True, attractors=None) -> BasinGrid:
    """Label each cell centre by the attractor its forward orbit reaches.

    ``attractors`` may pass a precomputed (equilibria, cycles) pair.
    """
    window, n = _check(window, resolution)
    att, cycles = attractors if attractors is not None else attracting_sets(params, detect_cycles)
    if not att and not cycles:
        raise PreconditionError("no attracting equilibrium or stable cycle")
    names = [e.label for e in att] + [f"cycle:{k}" for k in range(len(cycles))]
    eq_u = np.array([e.u for e in att], dtype=float)
    eq_v = np.array([e.v for e in att], dtype=float)
    cyc_v = np.array([c.anchor[1] for c in cycles], dtype=float)
    cyc_u0 = np.array([c.anchor[0] for c in cycles], dtype=float)
    cyc_x = np.array([c.x for c in cycles], dtype=float)

    umin, umax, vmin, vmax = window
    uc = umin + (np.arange(n) + 0.5) * (umax - umin) / n
    vc = vmin + (np.arange(n) + 0.5) * (vmax - vmin) / n
    UU, VV = np.meshgrid(uc, vc)
    us, vs = UU.ravel().copy(), VV.ravel().copy()
    A, M, Q, S = params.as_tuple()

    def chunk(sl):
        st, ei, ci = K.run_batch(us[sl], vs[sl], tau_budget, A, M, Q, S, RTOL, ATOL, math.inf,
                                 10_000_000, *BOX, eq_u, eq_v, capture,
                                 cyc_v, cyc_u0, cyc_x, capture)
        out = np.full(len(st), UNDECIDED, dtype=np.int64)
        out[st == K.CONVERGED_EQ] = ei[st == K.CONVERGED_EQ]
        out[st == K.CONVERGED_CYCLE] = len(att) + ci[st == K.CONVERGED_CYCLE]
        return out

    total = len(us)
    step = max(1, -(-total // max(1, workers * 4)))
    slices = [slice(i, min(i + step, total)) for i in range(0, total, step)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(chunk, slices))
    else:
        parts = [chunk(s) for s in slices]
    ids = np.concatenate(parts).reshape(n, n)
    return BasinGrid(window, n, uc, vc, ids, names)
