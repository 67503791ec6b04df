"""Uncoupled minimum-fuel control toward a timed arrival at the target.

The planner works over piecewise-constant-rate velocity profiles.  Within
that family the |acceleration| integral equals the total variation of the
speed, so a minimum-cost plan uses at most one cruise level below or above
the current speed.  Every candidate shape then reduces to one scalar
unknown with a closed-form (quadratic) area constraint:

* ``cruise``     - hold the current speed for the whole horizon,
* ``down``       - brake at the minimum acceleration to a cruise level at
                   or above the minimum approach speed, then hold,
* ``down-up``    - brake to a low cruise level (possibly a full stop with a
                   wait), then accelerate to the minimum approach speed so
                   as to arrive exactly on time,
* ``cruise-up``  - hold the current speed, then accelerate to the minimum
                   approach speed (only relevant when starting below it),
* ``up``         - accelerate at the maximum rate to a cruise level, then
                   hold.

The feasibility test computes the closed reachable-distance window
``[d_min, d_max]`` for the horizon; boundary distances are feasible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .model import PlanSegment, RoadParams, VelocityPlan

_REL_TOL = 1e-9


class NoFeasiblePlan(ValueError):
    """No admissible velocity profile covers the distance in the horizon."""


@dataclass(frozen=True)
class FeasibilityResult:
    """Reachable-distance window for a given speed and horizon."""

    feasible: bool
    d_min: float
    d_max: float


def earliest_approach_time(d: float, v: float, road: RoadParams) -> float:
    """Minimum time to cover distance ``d`` starting at speed ``v``.

    Achieved by accelerating at the maximum rate until the speed limit and
    cruising thereafter; continuous across the case boundary.
    """
    if d <= 0:
        return 0.0
    uM, vM = road.uM, road.vM
    if 2.0 * uM * d <= vM * vM - v * v:
        return (math.sqrt(2.0 * uM * d + v * v) - v) / uM
    return (vM - v) / uM + (2.0 * uM * d - vM * vM + v * v) / (2.0 * uM * vM)


def tau_earliest(x0: float, v0: float, road: RoadParams) -> float:
    """Earliest possible approach time for a vehicle starting at ``x0 < 0``."""
    if x0 >= 0:
        raise ValueError(f"initial position must be negative, got {x0}")
    return earliest_approach_time(-x0, v0, road)


def _d_max(v: float, h: float, road: RoadParams) -> float:
    """Maximum distance coverable in ``h``: full acceleration, then cruise."""
    t1 = (road.vM - v) / road.uM if road.uM > 0 else math.inf
    if h <= t1:
        return v * h + 0.5 * road.uM * h * h
    return (road.vM**2 - v * v) / (2.0 * road.uM) + road.vM * (h - t1)


def _d_min(v: float, h: float, road: RoadParams) -> float:
    """Minimum distance coverable in ``h`` with terminal speed >= vnom.

    Returns ``inf`` when the horizon is too short to even reach the minimum
    approach speed.
    """
    um, uM, vnom = road.um, road.uM, road.vnom
    if v < vnom and h * uM < vnom - v:
        return math.inf
    # cruise level of the no-wait brake-then-accelerate profile
    nu = (v / -um + vnom / uM - h) / (1.0 / -um + 1.0 / uM)
    if v <= vnom:
        # rounding can push nu fractionally above v when h*uM == vnom - v
        nu = min(nu, v)
    if nu <= 0.0:
        # enough time to stop, wait and speed back up
        return v * v / (-2.0 * um) + vnom * vnom / (2.0 * uM)
    if nu <= min(v, vnom):
        return (v * v - nu * nu) / (-2.0 * um) + (vnom * vnom - nu * nu) / (2.0 * uM)
    # v > vnom and the horizon is shorter than braking down to vnom:
    # brake the whole time
    return v * h + 0.5 * um * h * h


def feasibility(d: float, v: float, h: float, road: RoadParams) -> FeasibilityResult:
    """Closed reachable-distance window test for the planning problem."""
    if d < 0 or h < 0:
        return FeasibilityResult(False, math.inf, -math.inf)
    if h == 0.0:
        ok = d <= _REL_TOL and v >= road.vnom - _REL_TOL
        return FeasibilityResult(ok, 0.0, 0.0)
    dmin = _d_min(v, h, road)
    dmax = _d_max(v, h, road)
    tol = _REL_TOL * max(1.0, d, dmax if math.isfinite(dmax) else 1.0)
    ok = dmin - tol <= d <= dmax + tol
    return FeasibilityResult(ok, dmin, dmax)


def _plan_down(d: float, v: float, h: float, road: RoadParams) -> VelocityPlan | None:
    """Brake to a cruise level >= vnom, then hold.  None if out of range."""
    um = -road.um
    disc = um * um * h * h - 2.0 * um * (v * h - d)
    if disc < 0:
        return None
    c = um * h - math.sqrt(disc)
    nu = v - c
    if nu < road.vnom - 1e-12:
        return None
    nu = min(nu, v)
    t_d = (v - nu) / um
    segs = []
    if t_d > 0:
        segs.append(PlanSegment(t_d, v, nu))
    if h - t_d > 0:
        segs.append(PlanSegment(h - t_d, nu, nu))
    return VelocityPlan(tuple(segs), terminal_speed=nu)


def _plan_down_up(d: float, v: float, h: float, road: RoadParams) -> VelocityPlan:
    """Brake to a low cruise level, hold, accelerate to vnom at the end."""
    um, uM, vnom = -road.um, road.uM, road.vnom
    alpha = 0.5 / um + 0.5 / uM
    beta = h - v / um - vnom / uM
    K = v * v / (2.0 * um) + vnom * vnom / (2.0 * uM)
    disc = beta * beta - 4.0 * alpha * (K - d)
    if disc < 0:
        # d == d_min makes the discriminant zero up to rounding
        if disc > -1e-6 * max(1.0, beta * beta):
            disc = 0.0
        else:
            raise NoFeasiblePlan(
                f"no brake-and-respeed profile for d={d}, v={v}, h={h}"
            )
    nu = (-beta + math.sqrt(disc)) / (2.0 * alpha)
    nu = min(max(nu, 0.0), v, vnom)
    t_d = (v - nu) / um
    t_u = (vnom - nu) / uM
    t_c = max(h - t_d - t_u, 0.0)
    segs = []
    if t_d > 0:
        segs.append(PlanSegment(t_d, v, nu))
    if t_c > 0:
        segs.append(PlanSegment(t_c, nu, nu))
    if t_u > 0:
        segs.append(PlanSegment(t_u, nu, vnom))
    return VelocityPlan(tuple(segs), terminal_speed=vnom)


def _plan_up(d: float, v: float, h: float, road: RoadParams) -> VelocityPlan:
    """Accelerate at the maximum rate to a cruise level, then hold."""
    uM = road.uM
    disc = uM * uM * h * h - 2.0 * uM * (d - v * h)
    disc = max(disc, 0.0)
    c = uM * h - math.sqrt(disc)
    w = min(max(v + c, v), road.vM)
    t_u = (w - v) / uM if uM > 0 else 0.0
    segs = []
    if t_u > 0:
        segs.append(PlanSegment(t_u, v, w))
    if h - t_u > 0:
        segs.append(PlanSegment(h - t_u, w, w))
    return VelocityPlan(tuple(segs), terminal_speed=w)


def plan(d: float, v: float, h: float, road: RoadParams) -> VelocityPlan:
    """Minimum-cost velocity plan covering ``d`` in exactly ``h`` seconds.

    Raises :class:`NoFeasiblePlan` when the reachable window excludes ``d``.
    The terminal speed is the cheapest feasible value at or above the
    minimum approach speed, tie-broken toward the current speed.
    """
    res = feasibility(d, v, h, road)
    if not res.feasible:
        raise NoFeasiblePlan(
            f"d={d} outside reachable window [{res.d_min}, {res.d_max}] "
            f"for v={v}, h={h}"
        )
    if h == 0.0:
        return VelocityPlan((), terminal_speed=v)
    d = min(max(d, res.d_min), res.d_max)
    vnom = road.vnom
    tol = _REL_TOL * max(1.0, d)
    if v >= vnom:
        if abs(d - v * h) <= tol:
            return VelocityPlan((PlanSegment(h, v, v),), terminal_speed=v)
        if d < v * h:
            down = _plan_down(d, v, h, road)
            return down if down is not None else _plan_down_up(d, v, h, road)
        return _plan_up(d, v, h, road)
    # starting below the minimum approach speed: must end at or above it
    t_u = (vnom - v) / road.uM
    d_low = v * (h - t_u) + (vnom * vnom - v * v) / (2.0 * road.uM)
    d_high = (vnom * vnom - v * v) / (2.0 * road.uM) + vnom * (h - t_u)
    if d <= d_low + tol:
        return _plan_down_up(d, v, h, road)
    if d <= d_high:
        # cruise, then a single ramp up to vnom timed to match the area
        s = (d_high - d) / (vnom - v)
        s = min(max(s, 0.0), h - t_u)
        segs = []
        if s > 0:
            segs.append(PlanSegment(s, v, v))
        segs.append(PlanSegment(t_u, v, vnom))
        rest = h - s - t_u
        if rest > 0:
            segs.append(PlanSegment(rest, vnom, vnom))
        return VelocityPlan(tuple(segs), terminal_speed=vnom)
    return _plan_up(d, v, h, road)


def g_uc(tau: float, t: float, x: float, v: float, road: RoadParams) -> float:
    """Uncoupled control: initial acceleration of the receding-horizon plan.

    Total by construction: whenever no feasible plan exists (including past
    the target or past the deadline) it returns the maximum acceleration.
    """
    h = tau - t
    d = -x
    if h < 0 or d < 0:
        return road.uM
    try:
        return plan(d, v, h, road).initial_accel
    except NoFeasiblePlan:
        return road.uM
