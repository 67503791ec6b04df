"""Shared domain types, parameter validation and scenario representation.

All quantities are in SI units.  Positions are measured at the front of a
vehicle and are negative while the vehicle is still approaching the target
region ``[0, Delta]``.  Vehicle indices are 1-based throughout (index 1 is
the vehicle closest to the target), including in validation messages and
simulation traces.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence


@dataclass(frozen=True)
class RoadParams:
    """Physical and regulatory constants shared by every vehicle.

    Defaults correspond to a typical arterial road with passenger cars
    (speed limit 60 km/h, crossing speed 48 km/h).
    """

    L: float = 4.0          # vehicle length [m]
    Delta: float = 12.0     # target-region length [m]
    vM: float = 16.667      # maximum speed [m/s]
    um: float = -4.0        # minimum acceleration [m/s^2], strictly negative
    uM: float = 3.0         # maximum acceleration [m/s^2]
    vnom: float = 13.333    # minimum approach velocity [m/s]
    sigma0: float = 1.2     # coupling-set threshold, > 1

    def __post_init__(self) -> None:
        if not self.L > 0:
            raise ValueError(f"vehicle length must be positive, got {self.L}")
        if self.Delta < 0:
            raise ValueError(f"target-region length must be >= 0, got {self.Delta}")
        if not self.vM > 0:
            raise ValueError(f"max speed must be positive, got {self.vM}")
        # um strictly negative so the stopping distance v^2/(-2 um) is finite
        if not self.um < 0:
            raise ValueError(f"min acceleration must be strictly negative, got {self.um}")
        if self.uM < 0:
            raise ValueError(f"max acceleration must be >= 0, got {self.uM}")
        if not 0 < self.vnom <= self.vM:
            raise ValueError(
                f"min approach velocity must lie in (0, vM], got {self.vnom}"
            )
        if not self.sigma0 > 1:
            raise ValueError(f"coupling threshold must exceed 1, got {self.sigma0}")


@dataclass(frozen=True)
class VehicleState:
    """Kinematic state of one vehicle plus its prescribed approach time.

    ``tau`` is optional until scheduling has run; controllers refuse to
    operate on an unset value.
    """

    x: float                    # front position [m], negative before target
    v: float                    # speed [m/s]
    tau: Optional[float] = None  # prescribed approach time [s]


@dataclass(frozen=True)
class CouplingState:
    """Leader velocity, follower velocity and safety ratio triple."""

    v_lead: float
    v_fol: float
    sigma: float

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ValueError(f"safety ratio must be positive, got {self.sigma}")


@dataclass(frozen=True)
class PlanSegment:
    """One constant-rate piece of a velocity plan."""

    duration: float   # [s]
    v_start: float    # [m/s]
    v_end: float      # [m/s]

    @property
    def rate(self) -> float:
        if self.duration <= 0:
            return 0.0
        return (self.v_end - self.v_start) / self.duration


@dataclass(frozen=True)
class VelocityPlan:
    """Piecewise-constant-rate velocity profile covering a fixed distance.

    The time-integral of the speed over the plan equals the distance to go,
    and the cumulative |acceleration| cost equals the total variation of the
    speed across segments.
    """

    segments: tuple[PlanSegment, ...]
    terminal_speed: float

    @property
    def duration(self) -> float:
        return sum(s.duration for s in self.segments)

    @property
    def distance(self) -> float:
        return sum(0.5 * (s.v_start + s.v_end) * s.duration for s in self.segments)

    @property
    def cost(self) -> float:
        """Total variation of the velocity profile (equals integral of |u|)."""
        return sum(abs(s.v_end - s.v_start) for s in self.segments)

    @property
    def initial_accel(self) -> float:
        for s in self.segments:
            if s.duration > 0:
                return s.rate
        return 0.0

    def breakpoints(self) -> list[tuple[float, float]]:
        """(time, speed) pairs at segment boundaries, starting at t = 0."""
        pts = []
        t = 0.0
        if self.segments:
            pts.append((0.0, self.segments[0].v_start))
        for s in self.segments:
            t += s.duration
            pts.append((t, s.v_end))
        return pts

    def speed_at(self, t: float) -> float:
        """Speed at elapsed time ``t`` (clamped to the plan horizon)."""
        if t <= 0 or not self.segments:
            return self.segments[0].v_start if self.segments else self.terminal_speed
        acc = 0.0
        for s in self.segments:
            if t <= acc + s.duration or s is self.segments[-1]:
                if s.duration <= 0:
                    return s.v_end
                frac = min(max((t - acc) / s.duration, 0.0), 1.0)
                return s.v_start + frac * (s.v_end - s.v_start)
            acc += s.duration
        return self.terminal_speed


@dataclass(frozen=True)
class Scenario:
    """A string of vehicles, road parameters and simulation settings.

    ``tau_mode`` is either ``"explicit"`` (every vehicle carries its own
    ``tau``) or ``"im"`` (the scheduling layer assigns approach times using
    the aggressiveness parameter ``A``).
    """

    road: RoadParams
    vehicles: tuple[VehicleState, ...]
    tau_mode: str = "explicit"
    A: float = 1.0
    dt: float = 0.01
    t_end: float = 120.0
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        if self.tau_mode not in ("explicit", "im"):
            raise ValueError(f"unknown tau_mode {self.tau_mode!r}")
        if not 0.0 <= self.A <= 1.0:
            raise ValueError(f"aggressiveness must lie in [0, 1], got {self.A}")
        if not self.dt > 0:
            raise ValueError(f"integration step must be positive, got {self.dt}")

    @property
    def n(self) -> int:
        return len(self.vehicles)

    def with_taus(self, taus: Sequence[float]) -> "Scenario":
        if len(taus) != self.n:
            raise ValueError("one approach time required per vehicle")
        vehicles = tuple(
            replace(v, tau=float(tau)) for v, tau in zip(self.vehicles, taus)
        )
        return replace(self, vehicles=vehicles)


def suff_cond_threshold(road: RoadParams) -> float:
    """Initial-position threshold below which every approach time is open.

    A vehicle starting at or left of this position can come to a full stop,
    wait arbitrarily long, and still speed back up to the minimum approach
    velocity before reaching the target, so its feasible approach-time set
    is the whole half-line from its earliest arrival onward.
    """
    return road.vM**2 / (2.0 * road.um) - road.vnom**2 / (2.0 * road.uM)


def validate_scenario(s: Scenario) -> list[str]:
    """Check scenario invariants; returns a (possibly empty) violation list.

    Violations are data, not failures: each entry names the vehicle index
    (1-based) and the failed condition.
    """
    from .safety import safe_following_distance

    out: list[str] = []
    for j, veh in enumerate(s.vehicles, start=1):
        if veh.x >= 0:
            out.append(f"vehicle {j}: initial position nonnegative (x0={veh.x})")
        if not 0 <= veh.v <= s.road.vM + 1e-12:
            out.append(f"vehicle {j}: initial speed outside [0, vM] (v0={veh.v})")
    for j in range(2, s.n + 1):
        lead, fol = s.vehicles[j - 2], s.vehicles[j - 1]
        if not lead.x > fol.x:
            out.append(f"vehicle {j}: not behind vehicle {j - 1} (ordering)")
            continue
        gap = lead.x - fol.x
        D = safe_following_distance(lead.v, fol.v, s.road)
        if gap < D:
            out.append(
                f"vehicle {j}: sigma_{j}(0) < 1 (gap {gap:.3f} m < safe distance {D:.3f} m)"
            )
    if s.tau_mode == "im":
        thr = suff_cond_threshold(s.road)
        for j, veh in enumerate(s.vehicles, start=1):
            if veh.x > thr:
                out.append(
                    f"vehicle {j}: x0 {veh.x:.3f} m exceeds scheduling threshold {thr:.3f} m"
                )
    return out


# -- scenario file round-trip -------------------------------------------------

def scenario_to_dict(s: Scenario) -> dict:
    r = s.road
    doc = {
        "road": {
            "L": r.L, "Delta": r.Delta, "vM": r.vM, "um": r.um,
            "uM": r.uM, "vnom": r.vnom, "sigma0": r.sigma0,
        },
        "vehicles": [
            {"x0": v.x, "v0": v.v, **({"tau": v.tau} if v.tau is not None else {})}
            for v in s.vehicles
        ],
        "tau_mode": (
            {"explicit": True} if s.tau_mode == "explicit" else {"im": True, "A": s.A}
        ),
        "dt": s.dt,
        "t_end": s.t_end,
    }
    if s.seed is not None:
        doc["seed"] = s.seed
    return doc


def scenario_from_dict(doc: dict) -> Scenario:
    try:
        road = RoadParams(**doc["road"])
        vehicles = tuple(
            VehicleState(x=float(v["x0"]), v=float(v["v0"]),
                         tau=float(v["tau"]) if "tau" in v else None)
            for v in doc["vehicles"]
        )
        mode = doc.get("tau_mode", {"explicit": True})
        if "im" in mode:
            tau_mode, A = "im", float(mode.get("A", 1.0))
        elif "explicit" in mode:
            tau_mode, A = "explicit", 1.0
        else:
            raise ValueError(f"unknown tau_mode document {mode!r}")
        return Scenario(
            road=road,
            vehicles=vehicles,
            tau_mode=tau_mode,
            A=A,
            dt=float(doc.get("dt", 0.01)),
            t_end=float(doc.get("t_end", 120.0)),
            seed=doc.get("seed"),
        )
    except KeyError as exc:
        raise ValueError(f"scenario document missing field {exc}") from exc


def load_scenario(path: str | Path) -> Scenario:
    with open(path) as fh:
        return scenario_from_dict(json.load(fh))


def save_scenario(s: Scenario, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(scenario_to_dict(s), fh, indent=2)
        fh.write("\n")
