"""Leslie-Gower predator-prey model with a weak Allee effect on the prey.

Two forms of the model live here:

* the dimensional system in (N, P, t), singular along N = 0, and
* the rescaled polynomial system in (u, v, tau) with parameters (A, M, Q, S)

    du/dtau = u^2 ((u + A)(1 - u)(u - M) - Q v)
    dv/dtau = S (u + A)(u - v) v

related by u = N/K, v = P/(hK) and the state-dependent time change
dtau/dt = rK / (u (u + A)).  Because the time change is positive for u > 0 the
two systems share orbits, not time stamps.

The origin of the rescaled system is degenerate (zero Jacobian); it is resolved
with the vertical blow-up (u, v) = (x y, y) followed by division by y.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, ScopeWarning, ValidationError

__all__ = [
    "DimensionalParams",
    "DimensionalState",
    "ModelParams",
    "State",
    "BlowupState",
    "OriginReport",
    "vector_field",
    "jacobian",
    "dimensional_vector_field",
    "nondimensionalize",
    "dimensionalize",
    "time_scale",
    "blowup_vector_field",
    "blowup_jacobian",
    "origin_character",
    "prey_nullcline",
]


def _require_finite(name, value):
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class DimensionalParams:
    """Parameters of the dimensional model (r, K, q, a, s, h, m)."""

    r: float
    K: float
    q: float
    a: float
    s: float
    h: float
    m: float

    def __post_init__(self):
        for name in ("r", "K", "q", "a", "s", "h", "m"):
            _require_finite(name, getattr(self, name))
        for name in ("r", "K", "q", "a", "s", "h"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive, got {getattr(self, name)!r}")
        if not 0 < self.a / self.K < 1:
            raise ValidationError("A = a/K must lie in (0,1)")
        if self.m >= 0:
            warnings.warn("m >= 0 is outside weak-Allee scope", ScopeWarning, stacklevel=3)


class DimensionalState(NamedTuple):
    N: float
    P: float


@dataclass(frozen=True)
class ModelParams:
    """Nondimensional parameters (A, M, Q, S).

    A in (0,1), Q > 0, S > 0.  M < 0 is the weak-Allee regime; M >= 0 is
    accepted with a :class:`ScopeWarning` and carries no correctness claims.
    """

    A: float
    M: float
    Q: float
    S: float

    def __post_init__(self):
        for name in ("A", "M", "Q", "S"):
            _require_finite(name, getattr(self, name))
        if not 0 < self.A < 1:
            raise ValidationError("A must lie in (0,1)")
        if self.Q <= 0:
            raise ValidationError("Q must be positive")
        if self.S <= 0:
            raise ValidationError("S must be positive")
        if self.M >= 0:
            warnings.warn("M >= 0 is outside weak-Allee scope", ScopeWarning, stacklevel=3)

    @property
    def T(self) -> float:
        return 1.0 - self.A + self.M

    @property
    def L(self) -> float:
        return self.A * (self.M + 1.0) - self.Q - self.M

    def with_(self, **changes) -> "ModelParams":
        values = {"A": self.A, "M": self.M, "Q": self.Q, "S": self.S}
        values.update(changes)
        return ModelParams(**values)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.A, self.M, self.Q, self.S)


class State(NamedTuple):
    u: float
    v: float


class BlowupState(NamedTuple):
    x: float
    y: float


def _unpack(state):
    u, v = float(state[0]), float(state[1])
    if not (math.isfinite(u) and math.isfinite(v)):
        raise DomainError(f"state must be finite, got ({u!r}, {v!r})")
    return u, v


def vector_field(state, params: ModelParams) -> np.ndarray:
    """Right-hand side (du/dtau, dv/dtau) of the rescaled system."""
    u, v = _unpack(state)
    A, M, Q, S = params.A, params.M, params.Q, params.S
    return np.array([
        u * u * ((u + A) * (1.0 - u) * (u - M) - Q * v),
        S * (u + A) * (u - v) * v,
    ])


def prey_nullcline(u, params: ModelParams):
    """Non-trivial prey nullcline v = (u + A)(1 - u)(u - M)/Q (vectorised)."""
    u = np.asarray(u, dtype=float)
    return (u + params.A) * (1.0 - u) * (u - params.M) / params.Q


def jacobian(state, params: ModelParams) -> np.ndarray:
    """Jacobian of the rescaled system, first row written with the expanded J11."""
    u, v = _unpack(state)
    A, M, Q, S = params.A, params.M, params.Q, params.S
    j11 = (4 * A * u**2 - 4 * M * u**2 + 2 * A * M - 3 * A * u + 3 * M * u
           + 2 * Q * v - 4 * u**2 + 5 * u**3 - 3 * A * M * u)
    return np.array([
        [-u * j11, -Q * u * u],
        [S * v * (A + 2 * u - v), S * (u - 2 * v) * (A + u)],
    ])


def dimensional_vector_field(state, params: DimensionalParams) -> np.ndarray:
    """Right-hand side (dN/dt, dP/dt) of the dimensional model; requires N > 0."""
    N, P = _unpack(state)
    if N <= 0:
        raise DomainError("dimensional field is singular for N <= 0 (P/(hN) undefined)")
    p = params
    W = p.r * (1.0 - N / p.K) * (N - p.m) - p.q * P / (N + p.a)
    R = p.s * (1.0 - P / (p.h * N))
    return np.array([N * W, P * R])


def nondimensionalize(dp: DimensionalParams, st=None):
    """Map dimensional parameters (and optionally a state) to (A, M, Q, S) and (u, v).

    Returns ``ModelParams`` when ``st`` is None, else ``(ModelParams, State)``.
    """
    params = ModelParams(
        A=dp.a / dp.K,
        M=dp.m / dp.K,
        Q=dp.h * dp.q / (dp.r * dp.K),
        S=dp.s / (dp.r * dp.K),
    )
    if st is None:
        return params
    N, P = _unpack(st)
    return params, State(N / dp.K, P / (dp.h * dp.K))


def dimensionalize(params: ModelParams, st=None, *, r: float, K: float, h: float):
    """Inverse of :func:`nondimensionalize` given the scales r, K and h."""
    dp = DimensionalParams(
        r=r, K=K, h=h,
        q=params.Q * r * K / h,
        a=params.A * K,
        s=params.S * r * K,
        m=params.M * K,
    )
    if st is None:
        return dp
    u, v = _unpack(st)
    return dp, DimensionalState(u * K, v * h * K)


def time_scale(state, params: ModelParams, r: float, K: float) -> float:
    """dtau/dt at a rescaled state, rK / (u (u + A)); positive for u > 0."""
    u, _ = _unpack(state)
    if u <= 0:
        raise DomainError("time change is singular at u <= 0")
    return r * K / (u * (u + params.A))


def blowup_vector_field(bs, params: ModelParams) -> np.ndarray:
    """Desingularised field in the vertical chart (u, v) = (x y, y)."""
    x, y = float(bs[0]), float(bs[1])
    A, M, Q, S = params.A, params.M, params.Q, params.S
    xy = x * y
    dx = x * (S * (1 - x) * (A + xy) + x * (M - xy) * (xy - 1) * (A + xy) - Q * xy)
    dy = S * y * (x - 1) * (xy + A)
    return np.array([dx, dy])


def blowup_jacobian(bs, params: ModelParams, step: float = 1e-7) -> np.ndarray:
    """Central-difference Jacobian of :func:`blowup_vector_field`."""
    x, y = float(bs[0]), float(bs[1])
    cols = []
    for dx, dy in ((step, 0.0), (0.0, step)):
        fp = blowup_vector_field((x + dx, y + dy), params)
        fm = blowup_vector_field((x - dx, y - dy), params)
        cols.append((fp - fm) / (2 * step))
    return np.column_stack(cols)


@dataclass(frozen=True)
class OriginReport:
    """Local character of the degenerate origin read off the blow-up chart."""

    eigenvalues_O: tuple[float, float]
    I_x: float | None
    eigenvalues_I: tuple[float, float] | None
    jacobian_I: np.ndarray | None
    verdict: str = "nonhyperbolic-saddle"

    @property
    def has_I_x(self) -> bool:
        return self.I_x is not None


def origin_character(params: ModelParams) -> OriginReport:
    A, M, Q, S = params.A, params.M, params.Q, params.S
    eig_O = (A * S, -A * S)
    if S > abs(M) and S + M != 0:
        mu = S / (S + M)
        lam2 = -A * M * S / (M + S)
        J = np.array([
            [-A * S, S * S * (A * S * (1 + M) - Q * (M + S)) / (M + S) ** 3],
            [0.0, lam2],
        ])
        return OriginReport(eig_O, mu, (-A * S, lam2), J)
    return OriginReport(eig_O, None, None, None)
