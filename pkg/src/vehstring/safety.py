"""Safe-following distance, safety ratio and coupling-set membership.

The safe-following distance is the minimum gap that lets both vehicles of a
pair brake at the minimum acceleration until they stop without ever
overlapping, regardless of what the leader does.  The safety ratio is the
actual gap divided by that distance; values >= 1 mean the pair is safe.
"""
from __future__ import annotations

from .model import CouplingState, RoadParams


def mbm_stop_distance(v: float, road: RoadParams) -> float:
    """Distance traveled while braking at ``um`` from speed ``v`` to rest."""
    if v < 0:
        raise ValueError(f"speed must be nonnegative, got {v}")
    return v * v / (-2.0 * road.um)


def safe_following_distance(v_lead: float, v_fol: float, road: RoadParams) -> float:
    """Minimum gap under which both vehicles can fully brake without overlap.

    Equals one vehicle length plus the excess stopping distance of the
    follower over the leader (zero when the leader is at least as fast).
    Non-decreasing in the follower speed and non-increasing in the leader
    speed.
    """
    if v_lead < 0 or v_fol < 0:
        raise ValueError(f"speeds must be nonnegative, got ({v_lead}, {v_fol})")
    excess = (v_fol * v_fol - v_lead * v_lead) / (-2.0 * road.um)
    return road.L + max(0.0, excess)


def safety_ratio(
    x_lead: float, x_fol: float, v_lead: float, v_fol: float, road: RoadParams
) -> float:
    """Actual gap divided by the safe-following distance."""
    if x_lead <= x_fol:
        raise ValueError(
            f"leader must be strictly ahead of follower (x_lead={x_lead}, x_fol={x_fol})"
        )
    return (x_lead - x_fol) / safe_following_distance(v_lead, v_fol, road)


def in_coupling_set(z: CouplingState, road: RoadParams) -> bool:
    """True iff the follower is at least as fast and sigma is in [1, sigma0]."""
    return z.v_fol >= z.v_lead and 1.0 <= z.sigma <= road.sigma0
