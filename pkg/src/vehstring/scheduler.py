"""Intersection-manager layer: spacing constants and prescribed schedules.

Aggregates the per-vehicle earliest arrival times into the group earliest
approach time, prescribes evenly spaced approach times controlled by the
aggressiveness parameter, and computes the guaranteed occupancy bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import Sequence

from scipy.optimize import minimize_scalar

from .model import RoadParams
from .safety import safe_following_distance
from .uncoupled import earliest_approach_time


@dataclass(frozen=True)
class ScheduleReport:
    """Schedule and spacing constants emitted for one vehicle group."""

    Te1: float
    taus: tuple[float, ...]
    Tnom: float
    Tiat: float
    occ_bound: float
    A: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["taus"] = list(d["taus"])
        return d


def t_nom(road: RoadParams) -> float:
    """Nominal safe inter-vehicle approach time.

    Safe gap behind a capped-speed follower whose leader moves at least at
    the minimum approach speed, divided by that minimum approach speed.
    """
    return safe_following_distance(road.vnom, road.vM, road) / road.vnom


def v_underline(road: RoadParams) -> float:
    """Leader-speed threshold below which a capped follower cannot speed up."""
    return (-road.um * road.vM) / (-road.um + road.sigma0 * road.uM)


def script_L(d: float, v: float, road: RoadParams) -> float:
    """Worst-case inter-approach lag for a capped follower.

    ``d`` is the leader's distance to the target and ``v`` its speed at the
    moment the follower leaves the coupling set at the speed cap.
    """
    D = safe_following_distance(v, road.vM, road)
    return (d + road.sigma0 * D) / road.vM - earliest_approach_time(d, v, road)


def _d_low(v: float, road: RoadParams) -> float:
    return (road.vnom**2 - v * v) / (2.0 * road.uM)


def t_iat_numeric(road: RoadParams, grid: int = 200) -> float:
    """Upper bound on consecutive approach-time gaps, by search.

    Maximizes the lag function over its feasible (distance, speed) region
    with a grid scan followed by golden-section refinement along the lower
    distance boundary (the lag is non-increasing, then constant, in the
    distance).
    """
    base = road.sigma0 * t_nom(road)
    vlo = v_underline(road)
    vhi = road.vnom
    if vlo > vhi:
        return base
    best = -math.inf
    for i in range(grid):
        v = vlo + (vhi - vlo) * i / max(grid - 1, 1)
        dlo = max(_d_low(v, road), 0.0)
        # one meter into the flat region of the lag bounds the scan
        dcap = (road.vM**2 - v * v) / (2.0 * road.uM) + 1.0
        for k in range(grid):
            d = dlo + (dcap - dlo) * k / max(grid - 1, 1)
            val = script_L(d, v, road)
            if val > best:
                best = val

    def neg(v: float) -> float:
        return -script_L(max(_d_low(v, road), 0.0), v, road)

    res = minimize_scalar(neg, bounds=(vlo, vhi), method="bounded",
                          options={"xatol": 1e-6})
    best = max(best, -res.fun)
    return max(base, best)


def t_fol(v: float, road: RoadParams) -> float:
    """Lag along the lower distance boundary, in closed form.

    Note the final term enters with a minus sign: it is the time already
    spent reaching the minimum approach speed, which shortens the lag.
    """
    D = safe_following_distance(v, road.vM, road)
    return (
        (road.vnom**2 - v * v) / (2.0 * road.uM * road.vM)
        + road.sigma0 * D / road.vM
        - (road.vnom - v) / road.uM
    )


def t_fol_plus_sign(v: float, road: RoadParams) -> float:
    """Diagnostic variant of :func:`t_fol` with the last term added.

    Kept for transparency only; it disagrees with the numeric search and is
    never used in the schedule.
    """
    D = safe_following_distance(v, road.vM, road)
    return (
        (road.vnom**2 - v * v) / (2.0 * road.uM * road.vM)
        + road.sigma0 * D / road.vM
        + (road.vnom - v) / road.uM
    )


def t_iat_analytic(road: RoadParams) -> float:
    """Closed-form value of the inter-approach-time bound."""
    base = road.sigma0 * t_nom(road)
    vlo = v_underline(road)
    if vlo > road.vnom:
        return base
    return max(base, t_fol(vlo, road))


def group_earliest(taue: Sequence[float], A: float, road: RoadParams) -> float:
    """Earliest approach time of the first vehicle consistent with spacing."""
    if not taue:
        raise ValueError("at least one vehicle required")
    if not 0.0 <= A <= 1.0:
        raise ValueError(f"aggressiveness must lie in [0, 1], got {A}")
    Tn = t_nom(road)
    return max(te - (j - 1) * A * Tn for j, te in enumerate(taue, start=1))


def prescribe_taus(tau1: float, N: int, A: float, road: RoadParams) -> list[float]:
    """Evenly spaced prescribed approach times starting at ``tau1``."""
    if N < 1:
        raise ValueError("need at least one vehicle")
    Tn = t_nom(road)
    return [tau1 + (j - 1) * A * Tn for j in range(1, N + 1)]


def occupancy_bound(N: int, road: RoadParams) -> float:
    """Guaranteed upper bound on the group's occupancy of the target region."""
    if N < 1:
        raise ValueError("need at least one vehicle")
    Tiat = t_iat_analytic(road)
    return (N - 1) * Tiat + max((road.L + road.Delta) / road.vnom, Tiat)


def schedule(
    x0: Sequence[float],
    v0: Sequence[float],
    A: float,
    road: RoadParams,
    tau1: float | None = None,
) -> ScheduleReport:
    """Full scheduling pass for one vehicle group.

    ``tau1`` defaults to the group earliest approach time.
    """
    taue = [earliest_approach_time(-x, v, road) for x, v in zip(x0, v0)]
    Te1 = group_earliest(taue, A, road)
    t1 = Te1 if tau1 is None else tau1
    if t1 < Te1 - 1e-9:
        raise ValueError(f"tau1 = {t1} is earlier than the group earliest {Te1}")
    taus = prescribe_taus(t1, len(taue), A, road)
    return ScheduleReport(
        Te1=Te1,
        taus=tuple(taus),
        Tnom=t_nom(road),
        Tiat=t_iat_analytic(road),
        occ_bound=occupancy_bound(len(taue), road),
        A=A,
    )
