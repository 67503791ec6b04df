"""Compiled kernels for the simulation inner loop.

These mirror the closed-form planner in :mod:`vehstring.uncoupled` and the
switching law in :mod:`vehstring.following` as plain float functions so the
whole time-stepped run can be jitted.  The pure-Python modules remain the
reference implementation; the agreement of both paths is covered by tests.

Status codes returned by :func:`run_string`:
0 = all vehicles exited, 2 = safety violation, 3 = horizon exhausted.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

MODE_UNCOUPLED = 0
MODE_SAFE_FOLLOWING = 1

_V_CAP_TOL = 1e-9
_SIGMA_SLACK = 1e-6


@njit(cache=True)
def t_reach(d, v, uM, vM):
    if d <= 0.0:
        return 0.0
    if 2.0 * uM * d <= vM * vM - v * v:
        return (math.sqrt(2.0 * uM * d + v * v) - v) / uM
    return (vM - v) / uM + (2.0 * uM * d - vM * vM + v * v) / (2.0 * uM * vM)


@njit(cache=True)
def d_max(v, h, uM, vM):
    t1 = (vM - v) / uM
    if h <= t1:
        return v * h + 0.5 * uM * h * h
    return (vM * vM - v * v) / (2.0 * uM) + vM * (h - t1)


@njit(cache=True)
def d_min(v, h, um, uM, vnom):
    if v < vnom and h * uM < vnom - v:
        return math.inf
    nu = (v / -um + vnom / uM - h) / (1.0 / -um + 1.0 / uM)
    if v <= vnom and nu > v:
        nu = v
    if nu <= 0.0:
        return v * v / (-2.0 * um) + vnom * vnom / (2.0 * uM)
    if nu <= min(v, vnom):
        return (v * v - nu * nu) / (-2.0 * um) + (vnom * vnom - nu * nu) / (2.0 * uM)
    return v * h + 0.5 * um * h * h


@njit(cache=True)
def plan_segments(d, v, h, um, uM, vM, vnom):
    """Minimum-cost plan as up to three (duration, rate) segments.

    Returns (ok, t1, r1, t2, r2, t3, r3); ok = False when infeasible.
    """
    t1 = 0.0
    r1 = 0.0
    t2 = 0.0
    r2 = 0.0
    t3 = 0.0
    r3 = 0.0
    if d < 0.0 or h <= 0.0:
        return False, t1, r1, t2, r2, t3, r3
    dmin = d_min(v, h, um, uM, vnom)
    dmax = d_max(v, h, uM, vM)
    tol = 1e-9 * max(1.0, max(d, dmax))
    if d < dmin - tol or d > dmax + tol:
        return False, t1, r1, t2, r2, t3, r3
    if d < dmin:
        d = dmin
    if d > dmax:
        d = dmax
    am = -um
    if v >= vnom:
        if abs(d - v * h) <= tol:
            return True, h, 0.0, 0.0, 0.0, 0.0, 0.0
        if d < v * h:
            # brake to a cruise level at or above vnom, then hold
            disc = am * am * h * h - 2.0 * am * (v * h - d)
            if disc >= 0.0:
                c = am * h - math.sqrt(disc)
                nu = v - c
                if nu >= vnom - 1e-12:
                    if nu > v:
                        nu = v
                    td = (v - nu) / am
                    return True, td, -am, h - td, 0.0, 0.0, 0.0
            # brake to a low cruise level, hold, speed back up to vnom
            alpha = 0.5 / am + 0.5 / uM
            beta = h - v / am - vnom / uM
            K = v * v / (2.0 * am) + vnom * vnom / (2.0 * uM)
            disc = beta * beta - 4.0 * alpha * (K - d)
            if disc < 0.0:
                if disc > -1e-6 * max(1.0, beta * beta):
                    disc = 0.0
                else:
                    return False, t1, r1, t2, r2, t3, r3
            nu = (-beta + math.sqrt(disc)) / (2.0 * alpha)
            if nu < 0.0:
                nu = 0.0
            if nu > min(v, vnom):
                nu = min(v, vnom)
            td = (v - nu) / am
            tu = (vnom - nu) / uM
            tc = h - td - tu
            if tc < 0.0:
                tc = 0.0
            return True, td, -am, tc, 0.0, tu, uM
        # accelerate to a cruise level, then hold
        disc = uM * uM * h * h - 2.0 * uM * (d - v * h)
        if disc < 0.0:
            disc = 0.0
        c = uM * h - math.sqrt(disc)
        if c < 0.0:
            c = 0.0
        w = v + c
        if w > vM:
            w = vM
        tu = (w - v) / uM
        return True, tu, uM, h - tu, 0.0, 0.0, 0.0
    # current speed below the minimum approach speed
    tu = (vnom - v) / uM
    ramp = (vnom * vnom - v * v) / (2.0 * uM)
    d_low = v * (h - tu) + ramp
    d_high = ramp + vnom * (h - tu)
    if d <= d_low + tol:
        alpha = 0.5 / am + 0.5 / uM
        beta = h - v / am - vnom / uM
        K = v * v / (2.0 * am) + vnom * vnom / (2.0 * uM)
        disc = beta * beta - 4.0 * alpha * (K - d)
        if disc < 0.0:
            if disc > -1e-6 * max(1.0, beta * beta):
                disc = 0.0
            else:
                return False, t1, r1, t2, r2, t3, r3
        nu = (-beta + math.sqrt(disc)) / (2.0 * alpha)
        if nu < 0.0:
            nu = 0.0
        if nu > v:
            nu = v
        td = (v - nu) / am
        tu2 = (vnom - nu) / uM
        tc = h - td - tu2
        if tc < 0.0:
            tc = 0.0
        return True, td, -am, tc, 0.0, tu2, uM
    if d <= d_high:
        s = (d_high - d) / (vnom - v)
        if s < 0.0:
            s = 0.0
        if s > h - tu:
            s = h - tu
        return True, s, 0.0, tu, uM, h - s - tu, 0.0
    disc = uM * uM * h * h - 2.0 * uM * (d - v * h)
    if disc < 0.0:
        disc = 0.0
    c = uM * h - math.sqrt(disc)
    w = v + c
    if w > vM:
        w = vM
    tu = (w - v) / uM
    return True, tu, uM, h - tu, 0.0, 0.0, 0.0


@njit(cache=True)
def g_uc_accel(d, v, h, dt_avg, um, uM, vM, vnom):
    """Uncoupled control, total via the max-acceleration extension.

    With ``dt_avg > 0`` the returned value is the plan-following average
    acceleration over the next ``dt_avg`` seconds, which suppresses
    bang-bang chatter when a plan segment is shorter than the step.
    """
    ok, t1, r1, t2, r2, t3, r3 = plan_segments(d, v, h, um, uM, vM, vnom)
    if not ok:
        return uM
    if dt_avg <= 0.0:
        if t1 > 0.0:
            return r1
        if t2 > 0.0:
            return r2
        return r3
    horizon = min(dt_avg, h)
    if horizon <= 0.0:
        return uM
    dv = 0.0
    rem = horizon
    for dur, rate in ((t1, r1), (t2, r2), (t3, r3)):
        take = min(rem, dur)
        dv += rate * take
        rem -= take
        if rem <= 0.0:
            break
    return dv / horizon


@njit(cache=True)
def g_us_accel(v_lead, v_fol, sigma, u_lead, um):
    if v_fol <= 0.0:
        return u_lead
    return (v_lead / v_fol * (1.0 + sigma * u_lead / -um) - 1.0) * (-um / sigma)


@njit(cache=True)
def step_vehicle(v, u, dt, vM):
    """Exact constant-acceleration step with velocity clamps at 0 and vM.

    Acceleration drops to zero at the instant a bound is hit; returns
    (dx, v_end, |u| time-integral over the step).
    """
    if u > 0.0 and v + u * dt > vM:
        th = (vM - v) / u
        dx = v * th + 0.5 * u * th * th + vM * (dt - th)
        return dx, vM, abs(u) * th
    if u < 0.0 and v + u * dt < 0.0:
        th = -v / u
        dx = v * th + 0.5 * u * th * th
        return dx, 0.0, abs(u) * th
    return v * dt + 0.5 * u * dt * dt, v + u * dt, abs(u) * dt


@njit(cache=True)
def run_string(x0, v0, tau, dt, t_end, L, Delta, vM, um, uM, vnom, sigma0):
    """Time-stepped run of the whole string under the switching law.

    Returns (status, nsteps, T, X, V, U, SIG, MODE, fuel).  SIG for vehicle
    1 is filled with +inf.  Arrays are truncated by the caller to nsteps.
    """
    N = x0.shape[0]
    m = int(t_end / dt) + 2
    T = np.empty(m)
    X = np.empty((m, N))
    V = np.empty((m, N))
    U = np.empty((m, N))
    SIG = np.empty((m, N))
    MODE = np.zeros((m, N), dtype=np.int8)
    fuel = np.zeros(N)
    x = x0.copy()
    v = v0.copy()
    exit_pos = Delta + L
    status = 3
    nsteps = 0
    for i in range(m):
        t = i * dt
        T[i] = t
        all_out = True
        for j in range(N):
            X[i, j] = x[j]
            V[i, j] = v[j]
            if x[j] < exit_pos:
                all_out = False
        nsteps = i + 1
        # controls in ascending index; each follower sees the leader's
        # just-computed applied acceleration
        violation = False
        for j in range(N):
            if j == 0:
                sig = math.inf
            else:
                gap = x[j - 1] - x[j]
                excess = (v[j] * v[j] - v[j - 1] * v[j - 1]) / (-2.0 * um)
                D = L + max(0.0, excess)
                if gap <= 0.0:
                    violation = True
                    sig = 0.0
                else:
                    sig = gap / D
                if sig < 1.0 - _SIGMA_SLACK:
                    violation = True
            SIG[i, j] = sig
            h = tau[j] - t
            d = -x[j]
            at_cap = v[j] >= vM - _V_CAP_TOL
            vj = v[j] if v[j] < vM else vM
            coupled = (
                j > 0
                and vj >= v[j - 1]
                and 1.0 - _SIGMA_SLACK <= sig <= sigma0
            )
            u = g_uc_accel(d, vj, h, dt, um, uM, vM, vnom)
            if coupled:
                s = sig if sig > 1.0 else 1.0
                gus = g_us_accel(v[j - 1], vj, s, U[i, j - 1], um)
                if gus < u:
                    u = gus
                MODE[i, j] = MODE_SAFE_FOLLOWING
            else:
                MODE[i, j] = MODE_UNCOUPLED
            if at_cap:
                if u > 0.0:
                    u = 0.0
                elif u < um:
                    u = um
            U[i, j] = u
        if violation:
            status = 2
            break
        if all_out:
            status = 0
            break
        if t >= t_end:
            status = 3
            break
        for j in range(N):
            dx, vn, fu = step_vehicle(v[j], U[i, j], dt, vM)
            if x[j] < exit_pos:
                fuel[j] += fu
            x[j] = x[j] + dx
            v[j] = vn
    return status, nsteps, T, X, V, U, SIG, MODE, fuel
