"""Adaptive integration of the rescaled field."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ..equilibria import all_equilibria
from ..errors import DomainError, StiffnessError, ValidationError
from ..model import ModelParams
from . import _kernel as K

RTOL = 1e-8
ATOL = 1e-10
EQ_RADIUS = 1e-9
FIELD_TOL = 1e-12
BOX = (-1e-12, 10.0, -1e-12, 10.0)  # umin, umax, vmin, vmax

REASONS = {
    K.TIME_LIMIT: "time-limit",
    K.CONVERGED_EQ: "converged-to-equilibrium",
    K.CONVERGED_CYCLE: "converged-to-cycle",
    K.LEFT_DOMAIN: "left-domain",
    K.STIFF: "stiff",
    K.STEP_LIMIT: "step-limit",
    K.EVENT_LIMIT: "section-event",
    K.ARCLENGTH_LIMIT: "arclength-limit",
}

_EMPTY = np.empty(0)


class Section(NamedTuple):
    """Line u = value (axis 0) or v = value (axis 1).

    direction +1 records crossings where the coordinate increases (in
    integration time), -1 decreasing, 0 both.  Crossings whose other coordinate
    falls outside [lo, hi] are ignored.  The run stops after ``stop_after``
    accepted crossings (0 = never).
    """

    axis: int
    value: float
    direction: int = 1
    lo: float = -math.inf
    hi: float = math.inf
    stop_after: int = 1


@dataclass
class Trajectory:
    t: np.ndarray
    u: np.ndarray
    v: np.ndarray
    fu: np.ndarray = field(repr=False)
    fv: np.ndarray = field(repr=False)
    reason: str
    n_accepted: int
    n_rejected: int
    direction: int = 1
    equilibrium: int = -1  # index into the equilibria list used for the run
    arclength: float = 0.0
    events: np.ndarray = field(default_factory=lambda: np.empty((0, 3)), repr=False)

    def __len__(self):
        return len(self.t)

    @property
    def states(self) -> np.ndarray:
        return np.column_stack([self.u, self.v])

    @property
    def end(self) -> tuple[float, float]:
        return float(self.u[-1]), float(self.v[-1])

    def __call__(self, tau):
        """Cubic Hermite interpolation between accepted steps."""
        tau = np.asarray(tau, dtype=float)
        if len(self.t) == 1:
            return np.broadcast_to(np.array([self.u[0], self.v[0]]), tau.shape + (2,)).copy()
        i = np.clip(np.searchsorted(self.t, tau, side="right") - 1, 0, len(self.t) - 2)
        t0, t1 = self.t[i], self.t[i + 1]
        h = t1 - t0
        s = (tau - t0) / h
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        # stored derivatives are w.r.t. integration time, which is what t measures
        u = h00 * self.u[i] + h10 * h * self.fu[i] + h01 * self.u[i + 1] + h11 * h * self.fu[i + 1]
        v = h00 * self.v[i] + h10 * h * self.fv[i] + h01 * self.v[i + 1] + h11 * h * self.fv[i + 1]
        return np.stack([u, v], axis=-1)


def _eq_arrays(params, equilibria):
    if equilibria is None:
        equilibria = [e.position for e in all_equilibria(params)]
    pts = np.array([(float(p[0]), float(p[1])) for p in equilibria], dtype=float).reshape(-1, 2)
    return np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1])


def integrate(start, params: ModelParams, tau_max: float, direction="forward", *,
              rtol: float = RTOL, atol: float = ATOL, equilibria=None,
              eq_radius: float = EQ_RADIUS, field_tol: float = FIELD_TOL,
              box=BOX, h_max: float = math.inf, max_steps: int = 2_000_000,
              section: Section | None = None, arclength: float = math.inf,
              record: bool = True) -> Trajectory:
    """Integrate the rescaled field from ``start`` over integration time tau_max.

    ``direction`` is "forward"/"backward" (or +1/-1); backward integrates the
    reversed field so ``t`` is always increasing.  ``equilibria`` are the
    targets for early termination (default: all equilibria at ``params``).
    """
    u0, v0 = float(start[0]), float(start[1])
    if not (math.isfinite(u0) and math.isfinite(v0)):
        raise DomainError(f"start must be finite, got ({u0!r}, {v0!r})")
    if not (tau_max > 0 and math.isfinite(tau_max)):
        raise ValidationError("tau_max must be positive and finite")
    sg = _sign(direction)
    eu, ev = _eq_arrays(params, equilibria)
    if section is None:
        sec = (-1, 0.0, 0, 0.0, 0.0, 0)
    else:
        sec = (int(section.axis), float(section.value), int(section.direction),
               float(section.lo), float(section.hi), int(section.stop_after))
    res = K.run(u0, v0, float(tau_max), float(sg), params.A, params.M, params.Q, params.S,
                float(rtol), float(atol), 0.0, float(h_max), int(max_steps),
                *map(float, box), eu, ev, float(eq_radius), float(field_tol),
                _EMPTY, _EMPTY, _EMPTY, 0.0, *sec, float(arclength), bool(record))
    (status, t, u, v, n_acc, n_rej, eq_idx, _cyc, arc,
     rt, ru, rv, rfu, rfv, n_rec, et, evu, evv, n_ev) = res
    if not record:
        rt, ru, rv = np.array([t]), np.array([u]), np.array([v])
        rfu = rfv = np.array([math.nan])
    traj = Trajectory(rt, ru, rv, rfu, rfv, REASONS[status], n_acc, n_rej, sg, eq_idx, arc,
                      np.column_stack([et, evu, evv]))
    if status == K.STIFF:
        raise StiffnessError(f"step size underflow at tau={t:.6g}, state=({u:.6g}, {v:.6g})", traj)
    return traj


def _sign(direction) -> int:
    if direction in ("forward", 1, 1.0):
        return 1
    if direction in ("backward", -1, -1.0):
        return -1
    raise ValidationError(f"direction must be forward or backward, got {direction!r}")
