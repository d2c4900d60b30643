"""Two-parameter (Q, S) bifurcation structure at fixed (A, M).

Saddle-node loci are the vertical lines Q = Q-/Q+.  The Hopf locus is written in
closed form through the abscissa u of an on-diagonal equilibrium:

    Q(u) = (u + A)(1 - u)(u - M) / u,   S(u) = f(u)

which is the set of (Q, S) where the equilibrium at (u, u) has zero trace.
Where that equilibrium is a saddle (det < 0) the trace-zero points are neutral
saddles, not Hopf points; they are kept and flagged so that the curve stays
connected through the BT points.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .equilibria import (
    Kind,
    _check_AM,
    cubic_analysis,
    fold_function,
    hopf_function,
    hopf_maximum,
    positive_equilibria,
    saddle_node_thresholds,
)
from .errors import NumericalError, PreconditionError, ValidationError
from .model import ModelParams, jacobian

__all__ = [
    "HopfCurve",
    "BTPoint",
    "SotomayorReport",
    "CuspReport",
    "RegionLabel",
    "BifurcationDiagram",
    "hopf_curve",
    "bt_points",
    "bt_points_newton",
    "sotomayor_check",
    "cusp_check",
    "region_classify",
    "diagram",
]

DEFAULT_WINDOW = (0.3, 0.42, 0.0, 0.45)


def hopf_q(u, A, M):
    u = np.asarray(u, dtype=float)
    return (u + A) * (1 - u) * (u - M) / u


@dataclass(frozen=True)
class HopfCurve:
    """Trace-zero locus of the on-diagonal equilibria, split at the fold abscissae.

    Arrays are aligned; ``branch`` numbers the pieces in increasing u and each
    piece is sorted by Q.  ``neutral`` marks points whose equilibrium is a saddle.
    """

    A: float
    M: float
    u: np.ndarray
    q: np.ndarray
    s: np.ndarray
    neutral: np.ndarray
    branch: np.ndarray

    def __len__(self):
        return len(self.u)

    @property
    def hopf_mask(self) -> np.ndarray:
        """Points with det > 0, i.e. genuine Hopf candidates."""
        return fold_function(self.u, self.A, self.M) > 0

    def hopf_points(self):
        m = self.hopf_mask
        return self.q[m], self.s[m], self.u[m]

    def branches(self):
        return [np.flatnonzero(self.branch == b) for b in np.unique(self.branch)]

    def max_s(self) -> tuple[float, float, float]:
        """(Q, S, u) at the largest S along the locus."""
        i = int(np.argmax(self.s))
        return float(self.q[i]), float(self.s[i]), float(self.u[i])


def hopf_curve(A: float, M: float, n_points: int = 400) -> HopfCurve:
    _check_AM(A, M)
    if n_points < 2:
        raise ValidationError("n_points must be at least 2")
    grid = np.linspace(0.0, 1.0, n_points + 2)[1:-1]
    folds = []
    sn = saddle_node_thresholds(A, M)
    if sn is not None:
        folds = sorted({sn.u_minus, sn.u_plus})
    u_max, _ = hopf_maximum(A, M)
    u = np.unique(np.concatenate([grid, folds, [u_max]]))
    s = hopf_function(u, A, M)
    keep = s > 0
    u, s = u[keep], s[keep]
    q = hopf_q(u, A, M)
    neutral = fold_function(u, A, M) < 0
    # fold abscissae close one piece and open the next
    branch = np.zeros(len(u), dtype=int)
    for uf in folds:
        branch += (u > uf).astype(int)
    order = np.lexsort((q, branch))
    return HopfCurve(A, M, u[order], q[order], s[order], neutral[order], branch[order])


class BTPoint(NamedTuple):
    q: float
    s: float
    u: float
    label: str  # which pair collapses: "P1=P2" or "P2=P3"


def _bt_from_thresholds(A, M, sn):
    T = 1 - A + M
    out = []
    for q, ud in sorted({(sn.q_minus, sn.u_minus), (sn.q_plus, sn.u_plus)}):
        us = T - 2 * ud  # the simple root: the three roots sum to T
        s = q * (T - us) / (1 + A + M - us)
        if s > 0:
            out.append(BTPoint(q, s, ud, "P1=P2" if ud < us else "P2=P3"))
    return out


def bt_points(A: float, M: float) -> list[BTPoint]:
    """Cusp (BT) points: the fold lines at S = Q (T - u*) / (1 + A + M - u*)."""
    _check_AM(A, M)
    sn = saddle_node_thresholds(A, M)
    if sn is None:
        raise PreconditionError("no saddle-node thresholds for these (A, M)")
    return _bt_from_thresholds(A, M, sn)


def _bt_residual(x, A, M):
    u, Q, S = x
    p = ModelParams(A, M, Q, S)
    J = jacobian((u, u), p)
    g = (u + A) * (1 - u) * (u - M) - Q * u
    return np.array([g, np.linalg.det(J), np.trace(J)])


def bt_points_newton(A: float, M: float, guesses=None, tol=1e-13, max_iter=50):
    """Solve g = det = tr = 0 over (u, Q, S) by Newton with a finite-difference Jacobian.

    Works only from the raw Jacobian matrix; the default guesses are rough
    perturbations of the fold abscissae.
    """
    _check_AM(A, M)
    if guesses is None:
        sn = saddle_node_thresholds(A, M)
        if sn is None:
            return []
        guesses = [(sn.u_minus + 0.01, sn.q_minus * 1.01, 0.2),
                   (sn.u_plus - 0.01, sn.q_plus * 0.99, 0.3)]
    out = []
    for x0 in guesses:
        x = np.array(x0, dtype=float)
        for _ in range(max_iter):
            F = _bt_residual(x, A, M)
            Jn = np.empty((3, 3))
            for k in range(3):
                dx = np.zeros(3)
                dx[k] = 1e-7 * max(1.0, abs(x[k]))
                Jn[:, k] = (_bt_residual(x + dx, A, M) - _bt_residual(x - dx, A, M)) / (2 * dx[k])
            step = np.linalg.solve(Jn, -F)
            x = x + step
            if np.max(np.abs(step)) < tol:
                break
        else:
            raise NumericalError(f"BT Newton did not converge from {x0}")
        out.append(x)
    out.sort(key=lambda r: r[1])
    return [(float(u), float(q), float(s)) for u, q, s in out]


@dataclass(frozen=True)
class SotomayorReport:
    """Scalars certifying a fold at a double equilibrium.

    ``transversality`` and ``nondegeneracy`` use the reduced field
    ((u+A)(1-u)(u-M) - Qv, u - v), the null vector V = (1, 1) and the left
    null vector U of the full Jacobian scaled to U = (U1, 1).  ``full_*`` are
    the same scalars for the full polynomial field.  ``*_closed`` hold the
    closed forms S(1+A+M-u*)/(2Q) and -2S(2+A-M)(1+A+M-u*)/(Q(u*-T)); the latter
    evaluates the second derivative at u = 1 rather than at the double root, so
    ``nondegeneracy_corrected`` = U1 (3u* - T) is also given.
    """

    Q: float
    S: float
    u_double: float
    u_simple: float
    U: tuple[float, float]
    transversality: float
    nondegeneracy: float
    nondegeneracy_fd: float
    transversality_closed: float
    nondegeneracy_closed: float
    nondegeneracy_corrected: float
    full_transversality: float
    full_nondegeneracy: float

    @property
    def genuine(self) -> bool:
        return self.full_transversality != 0 and self.full_nondegeneracy != 0 \
            and self.transversality != 0 and self.nondegeneracy != 0


def _reduced_field(u, v, A, M, Q):
    return np.array([(u + A) * (1 - u) * (u - M) - Q * v, u - v])


def _full_field(u, v, A, M, Q, S):
    return np.array([u * u * ((u + A) * (1 - u) * (u - M) - Q * v), S * (u + A) * (u - v) * v])


def sotomayor_check(A: float, M: float, Q: float, S: float, fd_step: float = 1e-4) -> SotomayorReport:
    params = ModelParams(A, M, Q, S)
    ca = cubic_analysis(params)
    if not ca.has_double or not ca.simple_roots:
        raise PreconditionError(f"no fold at Q={Q!r}: delta={ca.delta!r}, roots={ca.roots!r}")
    ud = ca.double_roots[0]
    us = ca.simple_roots[0]
    T = params.T
    J = jacobian((ud, ud), params)
    # left null vector of the full Jacobian with second component 1
    U1 = -J[1, 0] / J[0, 0]
    U = np.array([U1, 1.0])
    trans = float(U @ np.array([-ud, 0.0]))
    nondeg = U1 * (2 * T - 6 * ud)
    h = fd_step
    d2 = (_reduced_field(ud + h, ud + h, A, M, Q) - 2 * _reduced_field(ud, ud, A, M, Q)
          + _reduced_field(ud - h, ud - h, A, M, Q)) / (h * h)
    nondeg_fd = float(U @ d2)
    d2_full = (_full_field(ud + h, ud + h, A, M, Q, S) - 2 * _full_field(ud, ud, A, M, Q, S)
               + _full_field(ud - h, ud - h, A, M, Q, S)) / (h * h)
    return SotomayorReport(
        Q=Q, S=S, u_double=ud, u_simple=us, U=(float(U1), 1.0),
        transversality=trans,
        nondegeneracy=float(nondeg),
        nondegeneracy_fd=nondeg_fd,
        transversality_closed=S * (1 + A + M - us) / (2 * Q),
        nondegeneracy_closed=-2 * S * (2 + A - M) * (1 + A + M - us) / (Q * (us - T)),
        nondegeneracy_corrected=S * (1 + A + M - us) / (Q * (us - T)) * (3 * us - T),
        full_transversality=float(U @ np.array([-ud ** 3, 0.0])),
        full_nondegeneracy=float(U @ d2_full),
    )


@dataclass(frozen=True)
class CuspReport:
    point: BTPoint
    det: float
    trace: float
    jacobian: np.ndarray
    transform: np.ndarray
    jordan: np.ndarray
    entry_printed: float  # -(1/4) S (1+A+M-u*)(u*-T)

    @property
    def entry(self) -> float:
        return float(self.jordan[0, 1])

    @property
    def nilpotent_block_nonzero(self) -> bool:
        return abs(self.entry) > 1e-12 and np.allclose(
            [self.jordan[0, 0], self.jordan[1, 0], self.jordan[1, 1]], 0.0, atol=1e-9)


def cusp_check(A: float, M: float, which: str = "upper") -> CuspReport:
    """Jordan structure of the Jacobian at a BT point ("upper" = larger Q)."""
    pts = bt_points(A, M)
    if not pts:
        raise PreconditionError("no BT point with S > 0")
    pt = pts[-1] if which == "upper" else pts[0]
    params = ModelParams(A, M, pt.q, pt.s)
    J = jacobian((pt.u, pt.u), params)
    Y = np.array([[1.0, -1.0], [1.0, 0.0]])
    jordan = np.linalg.solve(Y, J @ Y)
    us = params.T - 2 * pt.u
    printed = -0.25 * pt.s * (1 + A + M - us) * (us - params.T)
    return CuspReport(pt, float(np.linalg.det(J)), float(np.trace(J)), J, Y, jordan, printed)


_SHORT = {
    Kind.ATTRACTOR: "A", Kind.REPELLER: "R", Kind.SADDLE: "S",
    Kind.STABLE_SADDLE_NODE: "SNs", Kind.UNSTABLE_SADDLE_NODE: "SNu",
    Kind.CUSP: "C", Kind.MARGINAL: "H",
}


@dataclass(frozen=True)
class RegionLabel:
    count: int
    kinds: tuple[Kind, ...]
    cycles: tuple[str, ...] | None = None
    named_region: str | None = None

    @property
    def code(self) -> str:
        return f"{self.count}:" + ",".join(_SHORT[k] for k in self.kinds)


def _roman(params: ModelParams, kinds, cycles):
    sn = saddle_node_thresholds(params.A, params.M)
    if sn is None:
        return None
    if len(kinds) == 1:
        k = kinds[0]
        if k not in (Kind.ATTRACTOR, Kind.REPELLER):
            return None
        low = params.Q < sn.q_minus
        if k is Kind.ATTRACTOR:
            return "I" if low else "VII"
        return "II" if low else "VIII"
    if len(kinds) == 3 and kinds[1] is Kind.SADDLE:
        pair = (kinds[0], kinds[2])
        if pair == (Kind.ATTRACTOR, Kind.ATTRACTOR):
            if cycles is None:
                return "III/IV"
            return "IV" if any(c.startswith("unstable") for c in cycles) else "III"
        if pair == (Kind.ATTRACTOR, Kind.REPELLER):
            return "V"
        if pair == (Kind.REPELLER, Kind.REPELLER):
            return "VI"
    return None


def region_classify(params: ModelParams, cycles=None) -> RegionLabel:
    """Root count and kinds of the positive equilibria (ascending u).

    ``cycles`` is an optional inventory such as ("unstable@P3",) from the
    dynamics module; it only sharpens the named-region guess.
    """
    eqs = positive_equilibria(params)
    kinds = tuple(e.kind for e in eqs)
    named = None
    if abs(params.A - 0.1) < 1e-12 and abs(params.M + 0.1) < 1e-12:
        named = _roman(params, kinds, cycles)
    return RegionLabel(sum(e.multiplicity for e in eqs), kinds,
                       tuple(cycles) if cycles is not None else None, named)


@dataclass(frozen=True)
class BifurcationDiagram:
    A: float
    M: float
    window: tuple[float, float, float, float]
    sn_lines: tuple[float, ...]
    hopf: HopfCurve
    bt: list[BTPoint]
    q_centers: np.ndarray
    s_centers: np.ndarray
    regions: list[list[RegionLabel]] = field(repr=False)  # regions[i][j] at (q_centers[j], s_centers[i])


def _check_window(window):
    if len(window) != 4:
        raise ValidationError("window needs qmin qmax smin smax")
    qmin, qmax, smin, smax = map(float, window)
    if not all(math.isfinite(x) for x in (qmin, qmax, smin, smax)):
        raise ValidationError("window bounds must be finite")
    if not (qmax > qmin and smax > smin):
        raise ValidationError("window must have positive width and height")
    if qmin < 0 or smin < 0:
        raise ValidationError("window must lie in Q >= 0, S >= 0")
    return qmin, qmax, smin, smax


def cell_centers(window, resolution):
    qmin, qmax, smin, smax = _check_window(window)
    if resolution < 1:
        raise ValidationError("resolution must be >= 1")
    n = int(resolution)
    qs = qmin + (np.arange(n) + 0.5) * (qmax - qmin) / n
    ss = smin + (np.arange(n) + 0.5) * (smax - smin) / n
    return qs, ss


def diagram(A: float, M: float, window=DEFAULT_WINDOW, resolution: int = 40,
            workers: int = 1, n_hopf: int = 400) -> BifurcationDiagram:
    _check_AM(A, M)
    window = _check_window(window)
    qs, ss = cell_centers(window, resolution)
    sn = saddle_node_thresholds(A, M)
    sn_lines = () if sn is None else tuple(sorted({sn.q_minus, sn.q_plus}))
    bts = _bt_from_thresholds(A, M, sn) if sn is not None else []

    def row(i):
        return [region_classify(ModelParams(A, M, float(q), float(ss[i]))) for q in qs]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            regions = list(ex.map(row, range(len(ss))))
    else:
        regions = [row(i) for i in range(len(ss))]
    return BifurcationDiagram(A, M, window, sn_lines, hopf_curve(A, M, n_hopf), bts, qs, ss, regions)
