"""Safe-following control and the per-vehicle switching law.

``g_us`` holds the safety ratio constant while the follower is at least as
fast as its leader.  ``g_sf`` is its pointwise minimum with the uncoupled
control, so a vehicle keeps optimizing whenever that does not erode the
safety margin.  ``local_control`` routes between the uncoupled and
safe-following controls based on coupling-set membership, clamping to
non-positive accelerations at the speed cap.

Mode tags: 0 = uncoupled, 1 = safe-following.
"""
from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from .model import CouplingState, RoadParams
from .safety import in_coupling_set, safety_ratio
from .uncoupled import g_uc

MODE_UNCOUPLED = 0
MODE_SAFE_FOLLOWING = 1

# equality with the speed cap is detected within this tolerance
V_CAP_TOL = 1e-9


class SafetyViolation(RuntimeError):
    """The safety ratio of some pair dropped below one."""


def g_us(z: CouplingState, u_lead: float, road: RoadParams) -> float:
    """Unsaturated safe-following control, constant-sigma by design.

    Defined for follower at least as fast as the leader with sigma in
    [1, sigma0]; the result stays within the acceleration bounds there.
    """
    if z.v_fol < z.v_lead or z.v_lead < 0:
        raise ValueError(
            f"follower must be at least as fast as leader, got ({z.v_lead}, {z.v_fol})"
        )
    if not 1.0 <= z.sigma <= road.sigma0:
        raise ValueError(f"sigma must lie in [1, sigma0], got {z.sigma}")
    if not road.um <= u_lead <= road.uM:
        raise ValueError(f"leader acceleration out of bounds: {u_lead}")
    if z.v_fol == 0.0:
        return u_lead
    ratio = z.v_lead / z.v_fol
    return (ratio * (1.0 + z.sigma * u_lead / -road.um) - 1.0) * (-road.um / z.sigma)


def g_sf(
    tau: float,
    t: float,
    x: float,
    z: CouplingState,
    u_lead: float,
    road: RoadParams,
) -> float:
    """Safe-following control: min of uncoupled and unsaturated controls."""
    return min(g_uc(tau, t, x, z.v_fol, road), g_us(z, u_lead, road))


def local_control(
    tau: float,
    t: float,
    x_fol: float,
    v_fol: float,
    x_lead: Optional[float],
    v_lead: Optional[float],
    u_lead: Optional[float],
    road: RoadParams,
) -> tuple[float, int]:
    """Switching law for one vehicle; returns (acceleration, mode tag).

    Pass ``None`` for the leader arguments for the first vehicle, which is
    always uncoupled.  Raises :class:`SafetyViolation` when the pair is
    already unsafe (sigma < 1), which is unreachable from valid scenarios.
    """
    if tau is None:
        raise ValueError("prescribed approach time is unset; run scheduling first")
    at_cap = v_fol >= road.vM - V_CAP_TOL
    if x_lead is None:
        u = g_uc(tau, t, x_fol, v_fol, road)
        if at_cap:
            u = min(max(u, road.um), 0.0)
        return u, MODE_UNCOUPLED
    sigma = safety_ratio(x_lead, x_fol, v_lead, v_fol, road)
    if sigma < 1.0 - 1e-6:
        raise SafetyViolation(
            f"sigma = {sigma:.9f} < 1 at t = {t:.3f} (gap {x_lead - x_fol:.3f} m)"
        )
    z = CouplingState(v_lead=v_lead, v_fol=min(v_fol, road.vM), sigma=max(sigma, 1.0))
    if in_coupling_set(z, road):
        u = g_sf(tau, t, x_fol, z, u_lead, road)
        mode = MODE_SAFE_FOLLOWING
    else:
        u = g_uc(tau, t, x_fol, v_fol, road)
        mode = MODE_UNCOUPLED
    if at_cap:
        u = min(max(u, road.um), 0.0)
    return u, mode


def simulate_unsaturated_pair(
    leader_accel: Callable[[float], float],
    x_lead0: float,
    v_lead0: float,
    x_fol0: float,
    v_fol0: float,
    road: RoadParams,
    t_end: float,
    dt: float = 0.001,
    v_lead_max: Optional[float] = None,
) -> dict[str, np.ndarray]:
    """Two-vehicle run with the follower applying ``g_us`` only.

    The follower velocity is deliberately uncapped and the switching law is
    bypassed; this isolates the constant-sigma behavior of the unsaturated
    control.  Integration is classical RK4 with the leader acceleration
    saturated so its velocity stays within [0, v_lead_max].
    """
    vmax = road.vM if v_lead_max is None else v_lead_max
    sigma0 = safety_ratio(x_lead0, x_fol0, v_lead0, v_fol0, road)
    um = -road.um
    L = road.L

    def lead_u(t: float, v: float) -> float:
        u = min(max(leader_accel(t), road.um), road.uM)
        if v <= 0.0 and u < 0.0:
            return 0.0
        if v >= vmax and u > 0.0:
            return 0.0
        return u

    def deriv(t, xl, vl, xf, vf):
        ul = lead_u(t, vl)
        vl = max(vl, 0.0)
        vf = max(vf, 0.0)
        sig = (xl - xf) / (L + max(0.0, (vf * vf - vl * vl) / (2.0 * um)))
        if vf <= 0.0:
            uf = max(ul, 0.0)
        else:
            uf = (vl / vf * (1.0 + sig * ul / um) - 1.0) * (um / sig)
        return vl, ul, vf, uf

    n = int(round(t_end / dt))
    ts = np.empty(n + 1)
    out = np.empty((n + 1, 4))
    sig_hist = np.empty(n + 1)
    u_lead_hist = np.empty(n + 1)
    xl, vl, xf, vf = x_lead0, v_lead0, x_fol0, v_fol0
    for i in range(n + 1):
        t = i * dt
        ts[i] = t
        out[i, 0], out[i, 1], out[i, 2], out[i, 3] = xl, vl, xf, vf
        sig_hist[i] = safety_ratio(xl, xf, max(vl, 0.0), max(vf, 0.0), road)
        u_lead_hist[i] = lead_u(t, vl)
        if i == n:
            break
        a1, b1, c1, d1 = deriv(t, xl, vl, xf, vf)
        a2, b2, c2, d2 = deriv(t + dt / 2, xl + dt / 2 * a1, vl + dt / 2 * b1,
                               xf + dt / 2 * c1, vf + dt / 2 * d1)
        a3, b3, c3, d3 = deriv(t + dt / 2, xl + dt / 2 * a2, vl + dt / 2 * b2,
                               xf + dt / 2 * c2, vf + dt / 2 * d2)
        a4, b4, c4, d4 = deriv(t + dt, xl + dt * a3, vl + dt * b3,
                               xf + dt * c3, vf + dt * d3)
        xl += dt / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
        vl += dt / 6 * (b1 + 2 * b2 + 2 * b3 + b4)
        xf += dt / 6 * (c1 + 2 * c2 + 2 * c3 + c4)
        vf += dt / 6 * (d1 + 2 * d2 + 2 * d3 + d4)
        vl = min(max(vl, 0.0), vmax)
        # v_fol = v_lead is invariant in continuous time; project discrete
        # overshoot back so the safe-distance kink is never crossed
        vf = max(vf, vl, 0.0)
    return {
        "t": ts,
        "x_lead": out[:, 0],
        "v_lead": out[:, 1],
        "x_fol": out[:, 2],
        "v_fol": out[:, 3],
        "sigma": sig_hist,
        "u_lead": u_lead_hist,
        "sigma_initial": np.full(1, sigma0),
    }
