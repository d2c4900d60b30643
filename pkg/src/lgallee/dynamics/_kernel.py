"""Compiled Dormand-Prince 5(4) integrator for the rescaled model.

Everything here works on scalars and plain arrays so numba can compile it in
nopython mode.  The public wrappers live in ``integrator.py``.

Step control follows the PI controller of Hairer's DOPRI5 (beta = 0.04).
Section crossings are located by bisection on the DOPRI5 continuous extension.
"""
import math

import numpy as np
from numba import njit

# status codes
TIME_LIMIT = 0
CONVERGED_EQ = 1
CONVERGED_CYCLE = 2
LEFT_DOMAIN = 3
STIFF = 4
STEP_LIMIT = 5
EVENT_LIMIT = 6
ARCLENGTH_LIMIT = 7

C2, C3, C4, C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                           49.0 / 176.0, -5103.0 / 18656.0)
A71, A73, A74, A75, A76 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                           -2187.0 / 6784.0, 11.0 / 84.0)
E1, E3, E4, E5, E6, E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                          -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)
D1 = -12715105075.0 / 11282082432.0
D3 = 87487479700.0 / 32700410799.0
D4 = -10690763975.0 / 1880347072.0
D5 = 701980252875.0 / 199316789632.0
D6 = -1453857185.0 / 822651844.0
D7 = 69997945.0 / 29380423.0

SAFE = 0.9
FACC1 = 5.0   # 1/fac1, fac1 = 0.2
FACC2 = 0.1   # 1/fac2, fac2 = 10
BETA = 0.04
EXPO1 = 0.2 - BETA * 0.75
# h * spectral radius of the Jacobian stays below this; near a focus the error
# controller alone lets h drift onto the stability boundary and the orbit stalls
STAB = 2.0


@njit(cache=True, inline="always")
def rhs(u, v, A, M, Q, S, sg):
    du = u * u * ((u + A) * (1.0 - u) * (u - M) - Q * v)
    dv = S * (u + A) * (u - v) * v
    return sg * du, sg * dv


@njit(cache=True)
def _spectral_radius(u, v, A, M, Q, S):
    F = (u + A) * (1.0 - u) * (u - M)
    dF = (1.0 - u) * (u - M) - (u + A) * (u - M) + (u + A) * (1.0 - u)
    j11 = 2.0 * u * (F - Q * v) + u * u * dF
    j12 = -Q * u * u
    j21 = S * v * (2.0 * u + A - v)
    j22 = S * (u + A) * (u - 2.0 * v)
    tr = j11 + j22
    det = j11 * j22 - j12 * j21
    disc = tr * tr - 4.0 * det
    if disc >= 0.0:
        r = math.sqrt(disc)
        return max(abs(0.5 * (tr + r)), abs(0.5 * (tr - r)))
    return math.sqrt(det)


@njit(cache=True, inline="always")
def _contd(theta, y0, r2, r3, r4, r5):
    t1 = 1.0 - theta
    return y0 + theta * (r2 + t1 * (r3 + theta * (r4 + t1 * r5)))


@njit(cache=True)
def _grow(a, n):
    b = np.empty(max(2 * a.shape[0], n + 1))
    b[: a.shape[0]] = a
    return b


@njit(cache=True)
def _initial_step(u, v, fu, fv, A, M, Q, S, sg, rtol, atol, hmax):
    sku = atol + rtol * abs(u)
    skv = atol + rtol * abs(v)
    dnf = (fu / sku) ** 2 + (fv / skv) ** 2
    dny = (u / sku) ** 2 + (v / skv) ** 2
    if dnf <= 1e-10 or dny <= 1e-10:
        h = 1e-6
    else:
        h = math.sqrt(dny / dnf) * 0.01
    h = min(h, hmax)
    f1u, f1v = rhs(u + h * fu, v + h * fv, A, M, Q, S, sg)
    der2 = math.sqrt(((f1u - fu) / sku) ** 2 + ((f1v - fv) / skv) ** 2) / h
    der12 = max(abs(der2), math.sqrt(dnf))
    if der12 <= 1e-15:
        h1 = max(1e-6, h * 1e-3)
    else:
        h1 = (0.01 / der12) ** 0.2
    return min(100.0 * h, h1, hmax)


@njit(cache=True)
def run(u0, v0, t_max, sg, A, M, Q, S,
        rtol, atol, h_init, h_max, max_steps,
        umin, umax, vmin, vmax,
        eq_u, eq_v, eq_radius, field_tol,
        cyc_v, cyc_u0, cyc_x, cyc_radius,
        sec_axis, sec_value, sec_dir, sec_lo, sec_hi, sec_stop,
        arclen_cap, record):
    """Integrate from (u0, v0) over [0, t_max] in integration time.

    ``sg`` = -1 integrates the time-reversed field.  Returns a tuple
    (status, t, u, v, n_acc, n_rej, eq_idx, cyc_idx, arclen,
     rec_t, rec_u, rec_v, rec_fu, rec_fv, n_rec, ev_t, ev_u, ev_v, n_ev).
    """
    cap = 256 if record else 1
    rec_t = np.empty(cap)
    rec_u = np.empty(cap)
    rec_v = np.empty(cap)
    rec_fu = np.empty(cap)
    rec_fv = np.empty(cap)
    ev_cap = 16
    ev_t = np.empty(ev_cap)
    ev_u = np.empty(ev_cap)
    ev_v = np.empty(ev_cap)
    n_ev = 0
    n_rec = 0

    t = 0.0
    u = u0
    v = v0
    k1u, k1v = rhs(u, v, A, M, Q, S, sg)
    if record:
        rec_t[0] = t
        rec_u[0] = u
        rec_v[0] = v
        rec_fu[0] = k1u
        rec_fv[0] = k1v
        n_rec = 1

    n_acc = 0
    n_rej = 0
    arclen = 0.0
    status = TIME_LIMIT
    eq_idx = -1
    cyc_idx = -1

    # start already converged / outside?
    fn = math.sqrt(k1u * k1u + k1v * k1v)
    for k in range(eq_u.shape[0]):
        if math.hypot(u - eq_u[k], v - eq_v[k]) < eq_radius and fn < field_tol:
            return (CONVERGED_EQ, t, u, v, 0, 0, k, -1, 0.0,
                    rec_t[:n_rec], rec_u[:n_rec], rec_v[:n_rec], rec_fu[:n_rec],
                    rec_fv[:n_rec], n_rec, ev_t[:0], ev_u[:0], ev_v[:0], 0)
    if u < umin or u > umax or v < vmin or v > vmax:
        return (LEFT_DOMAIN, t, u, v, 0, 0, -1, -1, 0.0,
                rec_t[:n_rec], rec_u[:n_rec], rec_v[:n_rec], rec_fu[:n_rec],
                rec_fv[:n_rec], n_rec, ev_t[:0], ev_u[:0], ev_v[:0], 0)

    if h_init > 0.0:
        h = min(h_init, h_max)
    else:
        h = _initial_step(u, v, k1u, k1v, A, M, Q, S, sg, rtol, atol, h_max)
    facold = 1e-4
    last_rejected = False

    while True:
        if n_acc + n_rej >= max_steps:
            status = STEP_LIMIT
            break
        if t >= t_max:
            status = TIME_LIMIT
            break
        if t + h > t_max:
            h = t_max - t
        hmin = 1e-14 * max(1.0, abs(t))
        if h < hmin:
            status = STIFF
            break

        k2u, k2v = rhs(u + h * A21 * k1u, v + h * A21 * k1v, A, M, Q, S, sg)
        k3u, k3v = rhs(u + h * (A31 * k1u + A32 * k2u),
                       v + h * (A31 * k1v + A32 * k2v), A, M, Q, S, sg)
        k4u, k4v = rhs(u + h * (A41 * k1u + A42 * k2u + A43 * k3u),
                       v + h * (A41 * k1v + A42 * k2v + A43 * k3v), A, M, Q, S, sg)
        k5u, k5v = rhs(u + h * (A51 * k1u + A52 * k2u + A53 * k3u + A54 * k4u),
                       v + h * (A51 * k1v + A52 * k2v + A53 * k3v + A54 * k4v),
                       A, M, Q, S, sg)
        k6u, k6v = rhs(u + h * (A61 * k1u + A62 * k2u + A63 * k3u + A64 * k4u + A65 * k5u),
                       v + h * (A61 * k1v + A62 * k2v + A63 * k3v + A64 * k4v + A65 * k5v),
                       A, M, Q, S, sg)
        u1 = u + h * (A71 * k1u + A73 * k3u + A74 * k4u + A75 * k5u + A76 * k6u)
        v1 = v + h * (A71 * k1v + A73 * k3v + A74 * k4v + A75 * k5v + A76 * k6v)
        k7u, k7v = rhs(u1, v1, A, M, Q, S, sg)

        eu = h * (E1 * k1u + E3 * k3u + E4 * k4u + E5 * k5u + E6 * k6u + E7 * k7u)
        evv = h * (E1 * k1v + E3 * k3v + E4 * k4v + E5 * k5v + E6 * k6v + E7 * k7v)
        sku = atol + rtol * max(abs(u), abs(u1))
        skv = atol + rtol * max(abs(v), abs(v1))
        err = math.sqrt(0.5 * ((eu / sku) ** 2 + (evv / skv) ** 2))
        if not math.isfinite(err):
            err = 1e10

        fac11 = err ** EXPO1
        if err <= 1.0:
            fac = fac11 / facold ** BETA
            fac = max(FACC2, min(FACC1, fac / SAFE))
            h_new = h / fac
            facold = max(err, 1e-4)
            if last_rejected:
                h_new = min(h_new, h)
            last_rejected = False
            n_acc += 1

            # ---- section events within [t, t+h]
            stop_event = False
            if sec_axis >= 0:
                s0 = (u if sec_axis == 0 else v) - sec_value
                s1 = (u1 if sec_axis == 0 else v1) - sec_value
                hit = False
                if sec_dir >= 0 and s0 < 0.0 and s1 >= 0.0:
                    hit = True
                if sec_dir <= 0 and s0 > 0.0 and s1 <= 0.0:
                    hit = True
                if hit:
                    r2u = u1 - u
                    r3u = h * k1u - r2u
                    r4u = r2u - h * k7u - r3u
                    r5u = h * (D1 * k1u + D3 * k3u + D4 * k4u + D5 * k5u + D6 * k6u + D7 * k7u)
                    r2v = v1 - v
                    r3v = h * k1v - r2v
                    r4v = r2v - h * k7v - r3v
                    r5v = h * (D1 * k1v + D3 * k3v + D4 * k4v + D5 * k5v + D6 * k6v + D7 * k7v)
                    lo = 0.0
                    hi = 1.0
                    while (hi - lo) * h > 1e-12 and hi - lo > 1e-15:
                        mid = 0.5 * (lo + hi)
                        if sec_axis == 0:
                            sm = _contd(mid, u, r2u, r3u, r4u, r5u) - sec_value
                        else:
                            sm = _contd(mid, v, r2v, r3v, r4v, r5v) - sec_value
                        if (sm < 0.0) == (s0 < 0.0) and sm != 0.0:
                            lo = mid
                        else:
                            hi = mid
                    th = hi
                    uc = _contd(th, u, r2u, r3u, r4u, r5u)
                    vc = _contd(th, v, r2v, r3v, r4v, r5v)
                    if sec_axis == 0:
                        uc = sec_value
                        other = vc
                    else:
                        vc = sec_value
                        other = uc
                    if sec_lo <= other <= sec_hi:
                        if n_ev >= ev_cap:
                            ev_t = _grow(ev_t, n_ev)
                            ev_u = _grow(ev_u, n_ev)
                            ev_v = _grow(ev_v, n_ev)
                            ev_cap = ev_t.shape[0]
                        ev_t[n_ev] = t + th * h
                        ev_u[n_ev] = uc
                        ev_v[n_ev] = vc
                        n_ev += 1
                        if sec_stop > 0 and n_ev >= sec_stop:
                            stop_event = True
                            t = t + th * h
                            arclen += math.hypot(uc - u, vc - v)
                            u = uc
                            v = vc
                            k1u, k1v = rhs(u, v, A, M, Q, S, sg)

            if stop_event:
                if record:
                    if n_rec >= rec_t.shape[0]:
                        rec_t = _grow(rec_t, n_rec)
                        rec_u = _grow(rec_u, n_rec)
                        rec_v = _grow(rec_v, n_rec)
                        rec_fu = _grow(rec_fu, n_rec)
                        rec_fv = _grow(rec_fv, n_rec)
                    rec_t[n_rec] = t
                    rec_u[n_rec] = u
                    rec_v[n_rec] = v
                    rec_fu[n_rec] = k1u
                    rec_fv[n_rec] = k1v
                    n_rec += 1
                status = EVENT_LIMIT
                break

            # ---- cycle proximity targets (upward crossing of v = cyc_v right of cyc_u0)
            for k in range(cyc_v.shape[0]):
                c0 = v - cyc_v[k]
                c1 = v1 - cyc_v[k]
                if c0 < 0.0 and c1 >= 0.0:
                    w = c0 / (c0 - c1)
                    ux = u + w * (u1 - u)
                    if ux > cyc_u0[k] and abs(ux - cyc_x[k]) < cyc_radius:
                        cyc_idx = k
                        break

            arclen += math.hypot(u1 - u, v1 - v)
            t = t + h
            u = u1
            v = v1
            k1u = k7u
            k1v = k7v
            if record:
                if n_rec >= rec_t.shape[0]:
                    rec_t = _grow(rec_t, n_rec)
                    rec_u = _grow(rec_u, n_rec)
                    rec_v = _grow(rec_v, n_rec)
                    rec_fu = _grow(rec_fu, n_rec)
                    rec_fv = _grow(rec_fv, n_rec)
                rec_t[n_rec] = t
                rec_u[n_rec] = u
                rec_v[n_rec] = v
                rec_fu[n_rec] = k1u
                rec_fv[n_rec] = k1v
                n_rec += 1

            if cyc_idx >= 0:
                status = CONVERGED_CYCLE
                break
            if u < umin or u > umax or v < vmin or v > vmax:
                status = LEFT_DOMAIN
                break
            fn = math.sqrt(k1u * k1u + k1v * k1v)
            done = False
            for k in range(eq_u.shape[0]):
                if math.hypot(u - eq_u[k], v - eq_v[k]) < eq_radius and fn < field_tol:
                    eq_idx = k
                    done = True
                    break
            if done:
                status = CONVERGED_EQ
                break
            if arclen > arclen_cap:
                status = ARCLENGTH_LIMIT
                break
            rho = _spectral_radius(u, v, A, M, Q, S)
            if rho > 0.0:
                h_new = min(h_new, STAB / rho)
            h = min(h_new, h_max)
        else:
            h = h / min(FACC1, fac11 / SAFE)
            last_rejected = True
            n_rej += 1

    return (status, t, u, v, n_acc, n_rej, eq_idx, cyc_idx, arclen,
            rec_t[:n_rec], rec_u[:n_rec], rec_v[:n_rec], rec_fu[:n_rec], rec_fv[:n_rec],
            n_rec, ev_t[:n_ev], ev_u[:n_ev], ev_v[:n_ev], n_ev)


@njit(cache=True, nogil=True)
def run_batch(us, vs, t_max, A, M, Q, S, rtol, atol, h_max, max_steps,
              umin, umax, vmin, vmax, eq_u, eq_v, eq_radius,
              cyc_v, cyc_u0, cyc_x, cyc_radius):
    """Forward runs without recording; returns (status, eq_idx, cyc_idx) per start."""
    n = us.shape[0]
    status = np.empty(n, dtype=np.int64)
    eqi = np.empty(n, dtype=np.int64)
    cyi = np.empty(n, dtype=np.int64)
    for i in range(n):
        res = run(us[i], vs[i], t_max, 1.0, A, M, Q, S, rtol, atol, 0.0, h_max, max_steps,
                  umin, umax, vmin, vmax, eq_u, eq_v, eq_radius, np.inf,
                  cyc_v, cyc_u0, cyc_x, cyc_radius,
                  -1, 0.0, 0, 0.0, 0.0, 0, np.inf, False)
        status[i] = res[0]
        eqi[i] = res[6]
        cyi[i] = res[7]
    return status, eqi, cyi
