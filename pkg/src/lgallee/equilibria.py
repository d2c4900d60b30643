"""Equilibria of the rescaled model: location, root counting and classification.

Positive equilibria sit on the diagonal u = v at the roots in (0,1) of

    g(u) = u^3 - T u^2 - L u + A M,   T = 1 - A + M,   L = A(M + 1) - Q - M.

Roots come from the companion matrix followed by a Newton polish (on g for
simple roots, on g' for merged double roots, which is well conditioned there).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import PreconditionError, ValidationError
from .model import ModelParams, State, jacobian

__all__ = [
    "Kind",
    "Equilibrium",
    "CubicAnalysis",
    "SaddleNodeThresholds",
    "cubic_analysis",
    "cubic_discriminant",
    "saddle_node_thresholds",
    "positive_equilibria",
    "boundary_equilibria",
    "all_equilibria",
    "hopf_function",
    "hopf_maximum",
    "fold_function",
    "collapsed_classification",
    "on_diagonal_det",
    "on_diagonal_trace",
    "ROOT_MERGE_TOL",
    "DELTA_DEADBAND",
    "MARGINAL_TOL",
    "FOLD_DEADBAND",
]

ROOT_MERGE_TOL = 1e-7
DELTA_DEADBAND = 1e-12
MARGINAL_TOL = 1e-9
FOLD_DEADBAND = 1e-12


class Kind(str, Enum):
    NONHYPERBOLIC_SADDLE = "nonhyperbolic-saddle"
    SADDLE = "saddle"
    ATTRACTOR = "attractor"
    REPELLER = "repeller"
    STABLE_SADDLE_NODE = "stable-saddle-node"
    UNSTABLE_SADDLE_NODE = "unstable-saddle-node"
    CUSP = "cusp"
    MARGINAL = "marginal"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Equilibrium:
    position: State
    kind: Kind
    eigenvalues: tuple[complex, complex]
    det: float
    trace: float
    multiplicity: int = 1
    label: str = ""
    near_fold: bool = False

    @property
    def u(self) -> float:
        return self.position.u

    @property
    def v(self) -> float:
        return self.position.v

    @property
    def is_attracting(self) -> bool:
        return self.kind is Kind.ATTRACTOR

    @property
    def is_repelling(self) -> bool:
        return self.kind is Kind.REPELLER


@dataclass(frozen=True)
class CubicAnalysis:
    T: float
    L: float
    AM: float
    roots: tuple[tuple[float, int], ...]
    delta: float
    lemma_case: str
    pivot: float | None = None

    @property
    def coefficients(self) -> tuple[float, float, float, float]:
        return (1.0, -self.T, -self.L, self.AM)

    def g(self, u):
        u = np.asarray(u, dtype=float)
        return ((u - self.T) * u - self.L) * u + self.AM

    def dg(self, u):
        u = np.asarray(u, dtype=float)
        return (3 * u - 2 * self.T) * u - self.L

    @property
    def n_distinct(self) -> int:
        return len(self.roots)

    @property
    def n_counted(self) -> int:
        return sum(m for _, m in self.roots)

    @property
    def simple_roots(self) -> list[float]:
        return [r for r, m in self.roots if m == 1]

    @property
    def double_roots(self) -> list[float]:
        return [r for r, m in self.roots if m == 2]

    @property
    def has_double(self) -> bool:
        return any(m >= 2 for _, m in self.roots)

    @property
    def consistent(self) -> bool:
        """Root list agrees with the root count implied by the lemma case."""
        expected = 3 if self.lemma_case == "II.ii" else 1
        return self.n_counted == expected


class SaddleNodeThresholds(NamedTuple):
    q_minus: float
    q_plus: float
    u_minus: float
    u_plus: float


def _check_AM(A, M):
    if not (math.isfinite(A) and math.isfinite(M)):
        raise ValidationError("A and M must be finite")
    if not 0 < A < 1:
        raise ValidationError("A must lie in (0,1)")


def _polish_simple(u, T, L, AM, iters=3):
    for _ in range(iters):
        g = ((u - T) * u - L) * u + AM
        dg = (3 * u - 2 * T) * u - L
        if dg == 0:
            break
        step = g / dg
        u_new = u - step
        # keep the better iterate only
        if abs(((u_new - T) * u_new - L) * u_new + AM) > abs(g):
            break
        u = u_new
    return u


def _polish_double(u, T, L, iters=4):
    for _ in range(iters):
        dg = (3 * u - 2 * T) * u - L
        d2g = 6 * u - 2 * T
        if d2g == 0:
            break
        u -= dg / d2g
    return u


def _real_roots(coeffs):
    """Real roots (merged where closer than ROOT_MERGE_TOL) of a monic cubic."""
    c2, c1, c0 = coeffs[1], coeffs[2], coeffs[3]
    comp = np.array([[-c2, -c1, -c0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    eig = np.linalg.eigvals(comp)
    # a conjugate pair whose members are within the merge distance is a double real root
    reals = sorted(float(z.real) for z in eig if 2 * abs(z.imag) < ROOT_MERGE_TOL)
    groups: list[list[float]] = []
    for r in reals:
        if groups and r - groups[-1][-1] < ROOT_MERGE_TOL:
            groups[-1].append(r)
        else:
            groups.append([r])
    return [(sum(g) / len(g), len(g)) for g in groups]


def cubic_discriminant(T, L, AM):
    """Discriminant of u^3 - T u^2 - L u + AM (zero iff a repeated root)."""
    a, b, c, d = 1.0, -T, -L, AM
    return (18 * a * b * c * d - 4 * b**3 * d + b**2 * c**2 - 4 * a * c**3
            - 27 * a**2 * d**2)


def cubic_analysis(params: ModelParams) -> CubicAnalysis:
    """Roots of g in (0,1) with multiplicities, the deflation discriminant and lemma case."""
    T, L, AM = params.T, params.L, params.A * params.M
    roots = []
    for r, mult in _real_roots((1.0, -T, -L, AM)):
        r = _polish_simple(r, T, L, AM) if mult == 1 else _polish_double(r, T, L)
        if 0.0 < r < 1.0:
            roots.append((r, mult))
    roots.sort()

    simple = [r for r, m in roots if m == 1]
    pivot = simple[0] if simple else (roots[0][0] if roots else None)
    if pivot is None:
        delta = float("nan")
    else:
        delta = (pivot - T) ** 2 - 4.0 * (pivot * (pivot - T) - L)
        if abs(delta) < DELTA_DEADBAND:
            delta = 0.0

    if T <= 0 or L >= 0:
        case = "I"
    elif delta < 0:
        case = "II.i"
    else:
        case = "II.ii"
    return CubicAnalysis(T=T, L=L, AM=AM, roots=tuple(roots), delta=delta,
                         lemma_case=case, pivot=pivot)


def saddle_node_thresholds(A: float, M: float) -> SaddleNodeThresholds | None:
    """Q-values where g acquires a double root in (0,1), or None.

    A double root u_d satisfies g = g' = 0.  Eliminating L with g'(u_d) = 0
    (L = 3u^2 - 2Tu) leaves 2u^3 - T u^2 - AM = 0 for the abscissa, and then
    Q = A(M + 1) - M - L(u_d).
    """
    _check_AM(A, M)
    T, AM = 1.0 - A + M, A * M
    comp = np.array([[T / 2, 0.0, AM / 2], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    cands = []
    for z in np.linalg.eigvals(comp):
        if abs(z.imag) > ROOT_MERGE_TOL:
            continue
        u = float(z.real)
        for _ in range(4):
            p = (2 * u - T) * u * u - AM
            dp = (6 * u - 2 * T) * u
            if dp == 0:
                break
            u -= p / dp
        if 0.0 < u < 1.0:
            cands.append(u)
    if not cands:
        return None
    cands.sort()
    qs = [A * (M + 1) - M - (3 * u * u - 2 * T * u) for u in cands]
    pairs = sorted(zip(qs, cands))
    if len(pairs) == 1:
        (q, u), = pairs
        return SaddleNodeThresholds(q, q, u, u)
    (qm, um), (qp, up) = pairs[0], pairs[-1]
    return SaddleNodeThresholds(qm, qp, um, up)


def fold_function(u, A, M):
    """u^2 (2u - T) - AM; negative exactly where an on-diagonal equilibrium is a saddle."""
    u = np.asarray(u, dtype=float)
    T = 1.0 - A + M
    return u * u * (2 * u - T) - A * M


def hopf_function(u, A, M):
    """S-value at which the on-diagonal equilibrium at u has zero trace."""
    u = np.asarray(u, dtype=float)
    return u * ((1 - u) * (u - M) + (u + A) * (1 - 2 * u + M)) / (A + u)


def hopf_maximum(A: float, M: float) -> tuple[float, float]:
    """(u_max, f_max) of :func:`hopf_function` over (0,1)."""
    _check_AM(A, M)
    grid = np.linspace(0.0, 1.0, 2001)[1:-1]
    i = int(np.argmax(hopf_function(grid, A, M)))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    res = minimize_scalar(lambda x: -float(hopf_function(x, A, M)), bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-12})
    return float(res.x), float(-res.fun)


def on_diagonal_det(u, params: ModelParams):
    u = np.asarray(u, dtype=float)
    A, S = params.A, params.S
    return S * u * u * (A + u) * fold_function(u, A, params.M)


def on_diagonal_trace(u, params: ModelParams):
    u = np.asarray(u, dtype=float)
    A, M, S = params.A, params.M, params.S
    return u * (((1 - u) * (u - M) + (u + A) * (1 - 2 * u + M)) * u - S * (A + u))


def _eigs_from(tr, det):
    disc = complex(tr * tr - 4 * det)
    root = disc ** 0.5
    lam = ((tr - root) / 2, (tr + root) / 2)
    return tuple(sorted(lam, key=lambda z: (z.real, z.imag)))


def _collapsed_kind(params: ModelParams, u_double: float, u_simple: float | None):
    A, M, Q, S, T = params.A, params.M, params.Q, params.S, params.T
    if u_simple is None or u_double < u_simple:
        threshold = Q * u_double / (A + u_double)
    else:
        threshold = Q * (T - u_simple) / (1 + A + M - u_simple)
    if abs(S - threshold) < MARGINAL_TOL:
        return Kind.CUSP, threshold
    if S < threshold:
        return Kind.UNSTABLE_SADDLE_NODE, threshold
    return Kind.STABLE_SADDLE_NODE, threshold


def _make(params, u, kind, mult, label):
    tr = float(on_diagonal_trace(u, params))
    det = float(on_diagonal_det(u, params))
    near_fold = abs(float(fold_function(u, params.A, params.M))) < FOLD_DEADBAND
    return Equilibrium(State(u, u), kind, _eigs_from(tr, det), det, tr, mult, label, near_fold)


def collapsed_classification(params: ModelParams, analysis: CubicAnalysis | None = None) -> Equilibrium:
    """Classify the double equilibrium present when the deflation discriminant vanishes."""
    ca = analysis or cubic_analysis(params)
    doubles = ca.double_roots
    if not doubles or abs(ca.delta) >= DELTA_DEADBAND:
        raise PreconditionError(
            f"no collapsed equilibrium: delta={ca.delta!r}, roots={ca.roots!r}")
    u_d = doubles[0]
    simple = ca.simple_roots
    u_s = simple[0] if simple else None
    kind, _ = _collapsed_kind(params, u_d, u_s)
    label = "P1=P2" if (u_s is None or u_d < u_s) else "P2=P3"
    return _make(params, u_d, kind, 2, label)


def positive_equilibria(params: ModelParams, analysis: CubicAnalysis | None = None) -> list[Equilibrium]:
    """Classified equilibria on the diagonal, ascending in u."""
    ca = analysis or cubic_analysis(params)
    A, M, S = params.A, params.M, params.S
    out = []
    has_double = ca.has_double
    for idx, (u, mult) in enumerate(ca.roots):
        if mult == 2:
            out.append(collapsed_classification(params, ca))
            continue
        if has_double:
            label = "P3" if ca.double_roots[0] < u else "P1"
        else:
            label = f"P{idx + 1}"
        if mult >= 3:
            out.append(_make(params, u, Kind.MARGINAL, mult, label))
            continue
        D = float(fold_function(u, A, M))
        if D < 0:
            kind = Kind.SADDLE
        else:
            margin = S - float(hopf_function(u, A, M))
            if abs(margin) < MARGINAL_TOL:
                kind = Kind.MARGINAL
            elif margin < 0:
                kind = Kind.REPELLER
            else:
                kind = Kind.ATTRACTOR
        out.append(_make(params, u, kind, 1, label))
    return out


def boundary_equilibria(params: ModelParams) -> list[Equilibrium]:
    """The origin (degenerate saddle) and (1, 0) (hyperbolic saddle)."""
    origin = Equilibrium(State(0.0, 0.0), Kind.NONHYPERBOLIC_SADDLE, (0j, 0j), 0.0, 0.0, 1, "O")
    J = jacobian((1.0, 0.0), params)
    det = float(np.linalg.det(J))
    tr = float(np.trace(J))
    eig = tuple(sorted((complex(z) for z in np.linalg.eigvals(J)), key=lambda z: z.real))
    e1 = Equilibrium(State(1.0, 0.0), Kind.SADDLE, eig, det, tr, 1, "E")
    return [origin, e1]


def all_equilibria(params: ModelParams) -> list[Equilibrium]:
    return boundary_equilibria(params) + positive_equilibria(params)
