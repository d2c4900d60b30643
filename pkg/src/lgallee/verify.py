"""Invariant checks at a parameter point, each with a measured value and tolerance."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bifurcation as bif
from .equilibria import (
    Kind,
    all_equilibria,
    cubic_analysis,
    on_diagonal_det,
    on_diagonal_trace,
    positive_equilibria,
    saddle_node_thresholds,
)
from .errors import NumericalError, PreconditionError
from .model import ModelParams, blowup_jacobian, jacobian, origin_character, vector_field

DEFAULT_TOLS = {
    "root": 1e-10,  # |g| at reported roots and at the fold abscissae
    "det": 1e-10,  # closed-form det vs matrix det (relative to scale)
    "trace": 1e-10,
    "jacobian": 1e-6,  # analytic vs central-difference Jacobian
    "blowup": 1e-6,  # blow-up chart eigenvalues vs finite differences
    "bt": 1e-8,  # closed-form BT point vs Newton oracle
    "cusp": 1e-9,  # |det|, |tr| at the BT point
    "sotomayor": 1e-8,  # transversality vs closed form (relative)
    "fd2": 1e-6,  # second directional derivative vs finite differences
    "hopf": 1e-10,  # trace on the Hopf locus
}


@dataclass
class Check:
    name: str
    value: float
    tol: float
    passed: bool
    note: str = ""
    informational: bool = False

    def line(self) -> str:
        status = "info" if self.informational else ("PASS" if self.passed else "FAIL")
        extra = f"  ({self.note})" if self.note else ""
        return f"{status:4s}  {self.name:34s} value={self.value:.3e}  tol={self.tol:.1e}{extra}"


def _lt(name, value, tol, note=""):
    value = float(value)
    return Check(name, value, tol, bool(math.isfinite(value) and value < tol), note)


def _fd_jacobian(state, params, h=1e-7):
    cols = []
    for d in ((h, 0.0), (0.0, h)):
        fp = vector_field((state[0] + d[0], state[1] + d[1]), params)
        fm = vector_field((state[0] - d[0], state[1] - d[1]), params)
        cols.append((fp - fm) / (2 * h))
    return np.column_stack(cols)


def _kind_from_eigs(J):
    w = np.linalg.eigvals(J)
    det = float(np.linalg.det(J))
    if det < 0:
        return Kind.SADDLE
    return Kind.ATTRACTOR if np.all(w.real < 0) else Kind.REPELLER if np.all(w.real > 0) else None


def run_checks(params: ModelParams, tols: dict | None = None) -> list[Check]:
    t = dict(DEFAULT_TOLS)
    t.update(tols or {})
    A, M, Q, S = params.as_tuple()
    out: list[Check] = []

    ca = cubic_analysis(params)
    gmax = max((abs(ca.g(u)) for u, _ in ca.roots), default=0.0)
    out.append(_lt("cubic.root_residual", gmax, t["root"], f"case {ca.lemma_case}"))
    out.append(Check("cubic.count_matches_case", float(ca.n_counted), 0.0, ca.consistent,
                     f"{ca.n_counted} roots counted"))

    sn = saddle_node_thresholds(A, M)
    if sn is not None:
        T = params.T
        res = 0.0
        for q, ud in ((sn.q_minus, sn.u_minus), (sn.q_plus, sn.u_plus)):
            L = A * (M + 1) - q - M
            res = max(res, abs(ud**3 - T * ud**2 - L * ud + A * M), abs(3 * ud**2 - 2 * T * ud - L))
        out.append(_lt("thresholds.double_root_residual", res, t["root"]))

    for e in positive_equilibria(params, ca):
        J = jacobian(e.position, params)
        scale = max(1.0, float(np.max(np.abs(J))) ** 2)
        d_cf = float(on_diagonal_det(e.u, params))
        out.append(_lt(f"{e.label}.det_identity", abs(np.linalg.det(J) - d_cf) / scale, t["det"]))
        out.append(_lt(f"{e.label}.trace_identity", abs(np.trace(J) - float(on_diagonal_trace(e.u, params))),
                       t["trace"]))
        Jfd = _fd_jacobian(e.position, params)
        out.append(_lt(f"{e.label}.jacobian_vs_fd", float(np.max(np.abs(J - Jfd))), t["jacobian"]))
        if e.multiplicity == 1 and e.kind in (Kind.SADDLE, Kind.ATTRACTOR, Kind.REPELLER):
            k = _kind_from_eigs(Jfd)
            out.append(Check(f"{e.label}.kind_vs_fd_eigenvalues", 0.0 if k is e.kind else 1.0, 0.5,
                             k is e.kind, f"{e.kind.value} vs {k.value if k else 'undetermined'}"))

    E = next(e for e in all_equilibria(params) if e.label == "E")
    out.append(Check("E.saddle_det_negative", E.det, 0.0, E.det < 0))

    rep = origin_character(params)
    Jb = blowup_jacobian((0.0, 0.0), params)
    wb = np.sort(np.linalg.eigvals(Jb).real)
    out.append(_lt("origin.blowup_eigenvalues", float(np.max(np.abs(wb - np.sort(rep.eigenvalues_O)))),
                   t["blowup"]))
    if rep.has_I_x:
        Ji = blowup_jacobian((rep.I_x, 0.0), params)
        out.append(_lt("origin.I_x_jacobian", float(np.max(np.abs(Ji - rep.jacobian_I))), t["blowup"]))

    if sn is not None:
        try:
            pts = bif.bt_points(A, M)
            newton = bif.bt_points_newton(A, M)
            if len(newton) == len(pts):
                err = max(max(abs(p.q - q), abs(p.s - s), abs(p.u - u))
                          for p, (u, q, s) in zip(pts, newton))
                out.append(_lt("bt.closed_form_vs_newton", err, t["bt"], f"{len(pts)} points"))
        except (NumericalError, PreconditionError) as exc:
            out.append(Check("bt.closed_form_vs_newton", math.inf, t["bt"], False, str(exc)))

        hc = bif.hopf_curve(A, M, 200)
        trmax = 0.0
        for u, q, s in zip(*[hc.u, hc.q, hc.s]):
            p = ModelParams(A, M, float(q), float(s))
            trmax = max(trmax, abs(np.trace(jacobian((u, u), p))))
        out.append(_lt("hopf.trace_on_locus", trmax, t["hopf"]))

    if ca.has_double and ca.simple_roots:
        at_bt = False
        for p in bif._bt_from_thresholds(A, M, sn) if sn is not None else []:
            if abs(p.q - Q) < 1e-9 and abs(p.s - S) < 1e-9:
                at_bt = True
        rep_s = bif.sotomayor_check(A, M, Q, S)
        out.append(Check("sotomayor.transversality_nonzero", rep_s.full_transversality, 0.0,
                         rep_s.full_transversality != 0))
        out.append(Check("sotomayor.nondegeneracy_nonzero", rep_s.full_nondegeneracy, 0.0,
                         rep_s.full_nondegeneracy != 0))
        rel = abs(rep_s.transversality - rep_s.transversality_closed) / abs(rep_s.transversality_closed)
        out.append(_lt("sotomayor.transversality_closed_form", rel, t["sotomayor"]))
        out.append(_lt("sotomayor.nondegeneracy_vs_fd",
                       abs(rep_s.nondegeneracy - rep_s.nondegeneracy_fd), t["fd2"]))
        rel_printed = abs(rep_s.nondegeneracy - rep_s.nondegeneracy_closed) / abs(rep_s.nondegeneracy_closed)
        out.append(Check("sotomayor.nondegeneracy_printed_form", rel_printed, t["sotomayor"],
                         rel_printed < t["sotomayor"],
                         "printed form evaluates the second derivative at u=1", informational=True))
        if at_bt:
            out.append(Check("sotomayor.fold_at_bt", 0.0, 0.0, True,
                             "double zero eigenvalue: BT point, fold is not generic here",
                             informational=True))
            c = bif.cusp_check(A, M, "upper" if ud_is_upper(sn, Q) else "lower")
            out.append(_lt("cusp.det", abs(c.det), t["cusp"]))
            out.append(_lt("cusp.trace", abs(c.trace), t["cusp"]))
            out.append(Check("cusp.nilpotent_block_nonzero", c.entry, 0.0, c.nilpotent_block_nonzero))
            out.append(Check("cusp.entry_printed_sign", c.entry - c.entry_printed, 1e-10,
                             abs(c.entry - c.entry_printed) < 1e-10,
                             "printed entry has the opposite sign", informational=True))
    return out


def ud_is_upper(sn, Q):
    return abs(Q - sn.q_plus) <= abs(Q - sn.q_minus)


def failures(checks):
    return [c for c in checks if not c.informational and not c.passed]
