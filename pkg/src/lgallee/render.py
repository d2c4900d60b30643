"""Assemble analysis results into data files and SVG documents."""
from __future__ import annotations

import numpy as np

from . import bifurcation as bif
from .dynamics import (
    attracting_sets,
    basins as basin_grid,
    cycle_inventory,
    integrate,
    trace_manifolds,
)
from .dynamics.basins import BASIN_TAU, CAPTURE
from .dynamics.cycles import CYCLE_ATOL, CYCLE_RTOL
from .dynamics.integrator import ATOL, RTOL
from .dynamics.manifolds import ARC_CAP, SEED_OFFSET
from .equilibria import MARGINAL_TOL, ROOT_MERGE_TOL, Kind, all_equilibria, cubic_analysis, positive_equilibria, saddle_node_thresholds
from .io import DataFile
from .model import ModelParams, prey_nullcline
from .svg import PALETTE, UNDECIDED_COLOR, Canvas

PORTRAIT_LIM = (0.0, 1.1)
DEFAULT_STARTS = ((0.9, 0.9), (0.2, 0.8), (0.6, 0.05), (0.05, 0.4))
TRAJ_TAU = 5.0e3
TRAJ_ARC = 20.0


def tol_header() -> dict[str, str]:
    return {
        "tol.rtol": repr(RTOL), "tol.atol": repr(ATOL),
        "tol.cycle_rtol": repr(CYCLE_RTOL), "tol.cycle_atol": repr(CYCLE_ATOL),
        "tol.seed_offset": repr(SEED_OFFSET), "tol.arc_cap": repr(ARC_CAP),
        "tol.capture": repr(CAPTURE), "tol.basin_tau": repr(BASIN_TAU),
        "tol.root_merge": repr(ROOT_MERGE_TOL), "tol.marginal": repr(MARGINAL_TOL),
    }


def param_header(params: ModelParams) -> dict[str, str]:
    h = {f"param.{k}": repr(float(v)) for k, v in zip("AMQS", params.as_tuple())}
    h.update(tol_header())
    return h


def equilibria_report(params: ModelParams):
    """(text lines, DataFile) describing every equilibrium."""
    ca = cubic_analysis(params)
    sn = saddle_node_thresholds(params.A, params.M)
    lines = [f"A={params.A!r} M={params.M!r} Q={params.Q!r} S={params.S!r}",
             f"lemma case: {ca.lemma_case}   T={ca.T!r} L={ca.L!r} delta={ca.delta!r}"]
    if sn is not None:
        lines.append(f"Q- = {sn.q_minus!r}   Q+ = {sn.q_plus!r}")
    else:
        lines.append("Q-/Q+: none")
    pos = positive_equilibria(params, ca)
    lines.append(f"positive equilibria: {len(pos)}")
    df = DataFile("equilibria", param_header(params))
    df.header["lemma_case"] = ca.lemma_case
    df.header["q_minus"] = repr(sn.q_minus) if sn else ""
    df.header["q_plus"] = repr(sn.q_plus) if sn else ""
    df.columns = ["label", "u", "v", "kind", "multiplicity", "det", "trace",
                  "eig1_re", "eig1_im", "eig2_re", "eig2_im"]
    for e in all_equilibria(params):
        l1, l2 = e.eigenvalues
        lines.append(f"  {e.label:6s} ({e.u:.10g}, {e.v:.10g})  {e.kind.value:22s} "
                     f"eig=({complex(l1):.6g}, {complex(l2):.6g})")
        df.add(e.label, float(e.u), float(e.v), e.kind.value, e.multiplicity, float(e.det),
               float(e.trace), float(l1.real), float(l1.imag), float(l2.real), float(l2.imag))
    return lines, df


def root_scan(A, M, q_lo=0.30, q_hi=0.42, step=1e-3):
    """Root count along a Q sweep (S does not enter the cubic)."""
    n = int(round((q_hi - q_lo) / step))
    df = DataFile("rootscan", {"param.A": repr(float(A)), "param.M": repr(float(M)), **tol_header()},
                  ["Q", "count", "distinct", "roots"])
    for i in range(n + 1):
        q = q_lo + i * step
        ca = cubic_analysis(ModelParams(A, M, q, 1.0))
        df.add(q, ca.n_counted, ca.n_distinct,
               " ".join(f"{u!r}x{m}" for u, m in ca.roots))
    cv = Canvas((q_lo, q_hi), (0.0, 1.0), "Q", "u", "positive roots")
    uu = np.linspace(1e-3, 1.0, 600)
    cv.polyline(zip(bif.hopf_q(uu, A, M), uu), "#d62728")
    sn = saddle_node_thresholds(A, M)
    if sn is not None:
        for q in (sn.q_minus, sn.q_plus):
            cv.polyline([(q, 0.0), (q, 1.0)], "#555", dashed=True)
    return df, cv.render()


def _objects(params, starts, draw_orbits=True):
    objs = []  # (id, kind, points)
    uu = np.linspace(0.0, 1.0, 401)
    objs.append(("nullcline:prey", "nullcline-prey", np.column_stack([uu, prey_nullcline(uu, params)])))
    objs.append(("nullcline:predator", "nullcline-predator", np.array([[0.0, 0.0], [1.1, 1.1]])))
    eqs = all_equilibria(params)
    cycles = []
    if draw_orbits:
        cycles = cycle_inventory(params)
        for k, c in enumerate(cycles):
            objs.append((f"cycle:{k}", f"cycle-{c.stability}", c.orbit))
        for e in eqs:
            if e.kind is Kind.SADDLE:
                for b in trace_manifolds(e, params, cycles=cycles):
                    objs.append((b.name, f"manifold-{b.type}", b.polyline))
        for k, st in enumerate(starts):
            tr = integrate(st, params, TRAJ_TAU, arclength=TRAJ_ARC)
            objs.append((f"trajectory:{k}", "trajectory", tr.states))
    for e in eqs:
        objs.append((f"eq:{e.label}", f"equilibrium-{e.kind.value}", np.array([[e.u, e.v]])))
    return objs, cycles


_COLORS = {
    "nullcline-prey": "#d62728", "nullcline-predator": "#8c564b",
    "manifold-stable": "#1f77b4", "manifold-unstable": "#2ca02c",
    "cycle-stable": "#000000", "cycle-unstable": "#000000", "trajectory": "#7f7f7f",
}


def portrait(params: ModelParams, starts=DEFAULT_STARTS, draw_orbits=True, title=""):
    """(DataFile, svg text) of a phase portrait on [0, 1.1]^2."""
    objs, _ = _objects(params, list(starts), draw_orbits)
    df = DataFile("portrait", param_header(params), ["object_id", "object_kind", "u", "v"])
    cv = Canvas(PORTRAIT_LIM, PORTRAIT_LIM, "u", "v", title)
    for oid, kind, pts in objs:
        for u, v in pts:
            df.add(oid, kind, float(u), float(v))
        if kind.startswith("equilibrium-"):
            cv.glyph(kind[len("equilibrium-"):], pts[0, 0], pts[0, 1])
        else:
            cv.polyline(pts, _COLORS[kind], dashed=(kind == "cycle-unstable"),
                        width=2.0 if kind.startswith("cycle") else 1.2, cls=kind)
    return df, cv.render()


def bifurcation(diag: bif.BifurcationDiagram, title=""):
    qmin, qmax, smin, smax = diag.window
    df = DataFile("bifurcation", {"param.A": repr(float(diag.A)), "param.M": repr(float(diag.M)),
                                  "window": " ".join(repr(float(x)) for x in diag.window),
                                  "resolution": str(len(diag.q_centers)), **tol_header()},
                  ["object", "index", "Q", "S", "u", "info"])
    for k, q in enumerate(diag.sn_lines):
        df.add("sn", k, float(q), "", "", "vertical")
    h = diag.hopf
    for i in range(len(h)):
        df.add("hopf", int(h.branch[i]), float(h.q[i]), float(h.s[i]), float(h.u[i]),
               "neutral-saddle" if h.neutral[i] else "hopf")
    for k, p in enumerate(diag.bt):
        df.add("bt", k, p.q, p.s, p.u, p.label)
    for i, s in enumerate(diag.s_centers):
        for j, q in enumerate(diag.q_centers):
            lab = diag.regions[i][j]
            df.add("region", f"{i}:{j}", float(q), float(s), "", lab.code + (f" {lab.named_region}" if lab.named_region else ""))

    cv = Canvas((qmin, qmax), (smin, smax), "Q", "S", title)
    codes = sorted({lab.code for row in diag.regions for lab in row})
    color = {c: PALETTE[k % len(PALETTE)] for k, c in enumerate(codes)}
    dq = (qmax - qmin) / len(diag.q_centers)
    ds = (smax - smin) / len(diag.s_centers)
    for i, s in enumerate(diag.s_centers):
        for j, q in enumerate(diag.q_centers):
            cv.rect(q - dq / 2, s - ds / 2, q + dq / 2, s + ds / 2, _lighten(color[diag.regions[i][j].code]))
    for q in diag.sn_lines:
        cv.polyline([(q, smin), (q, smax)], "#000", width=2)
    for idx in h.branches():
        # split each branch into runs of equal neutral flag
        flags = h.neutral[idx]
        start = 0
        for k in range(1, len(idx) + 1):
            if k == len(idx) or flags[k] != flags[start]:
                seg = idx[start:min(k + 1, len(idx))]
                cv.polyline(zip(h.q[seg], h.s[seg]), "#d62728", width=2, dashed=bool(flags[start]))
                start = k
    for p in diag.bt:
        cv.glyph("cusp", p.q, p.s)
        cv.text(p.q, p.s, " BT")
    return df, cv.render()


def _lighten(hexcolor, f=0.55):
    r, g, b = (int(hexcolor[i:i + 2], 16) for i in (1, 3, 5))
    r, g, b = (int(c + (255 - c) * f) for c in (r, g, b))
    return f"#{r:02x}{g:02x}{b:02x}"


def basins(params: ModelParams, window=(0.0, 1.0, 0.0, 1.0), resolution=100, workers=1, title=""):
    att = attracting_sets(params)
    grid = basin_grid(params, window, resolution, workers=workers, attractors=att)
    df = DataFile("basins", param_header(params), ["cell_u", "cell_v", "attractor_id"])
    df.header["window"] = " ".join(repr(float(x)) for x in grid.window)
    df.header["resolution"] = str(grid.resolution)
    df.header["attractors"] = " ".join(grid.attractors)
    for i, v in enumerate(grid.v):
        for j, u in enumerate(grid.u):
            df.add(float(u), float(v), grid.name(int(grid.ids[i, j])))
    umin, umax, vmin, vmax = grid.window
    cv = Canvas((umin, umax), (vmin, vmax), "u", "v", title)
    du = (umax - umin) / grid.resolution
    dv = (vmax - vmin) / grid.resolution
    for i, v in enumerate(grid.v):
        for j, u in enumerate(grid.u):
            k = int(grid.ids[i, j])
            cv.rect(u - du / 2, v - dv / 2, u + du / 2, v + dv / 2,
                    UNDECIDED_COLOR if k < 0 else PALETTE[k % len(PALETTE)])
    for e in att[0]:
        cv.glyph("attractor", e.u, e.v)
    for c in att[1]:
        cv.polyline(c.orbit, "#000", width=2)
    return grid, df, cv.render()


def connection_log(result, A, M, Q):
    df = DataFile("connection", {"param.A": repr(float(A)), "param.M": repr(float(M)),
                                 "param.Q": repr(float(Q)), "kind": result.kind,
                                 "bracket": " ".join(repr(x) for x in result.bracket),
                                 "S_c": repr(result.S_c) if result.S_c is not None else "none", **tol_header()},
                  ["iteration", "S", "separation"])
    for k, (s, d) in enumerate(result.log):
        df.add(k, float(s), float(d))
    return df
