"""Time-stepped simulation of the full string under the switching law.

A run integrates every vehicle with exact piecewise-constant-acceleration
steps (velocity clamped at 0 and the speed cap, with the position integral
split at the clamp instant), detects approach and exit events by linear
interpolation, and accumulates the per-vehicle |acceleration| cost up to
each exit.  Identical scenarios and steps produce bit-identical traces.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import _fast
from .model import RoadParams, Scenario, VehicleState, validate_scenario, suff_cond_threshold
from .safety import safe_following_distance
from .scheduler import schedule

STATUS_OK = 0
STATUS_SAFETY_VIOLATION = 2
STATUS_INCOMPLETE = 3


@dataclass
class SimTrace:
    """Time-indexed per-vehicle records of one run (1-based vehicle index)."""

    t: np.ndarray          # (m,)
    x: np.ndarray          # (m, N)
    v: np.ndarray          # (m, N)
    u: np.ndarray          # (m, N) applied acceleration
    sigma: np.ndarray      # (m, N); +inf for vehicle 1
    mode: np.ndarray       # (m, N); 0 = uncoupled, 1 = safe-following

    @property
    def n_vehicles(self) -> int:
        return self.x.shape[1]

    def to_csv(self, path: str | Path | None = None) -> str:
        """Trace as CSV with columns t, j, x, v, u, sigma, mode."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "j", "x", "v", "u", "sigma", "mode"])
        for k in range(len(self.t)):
            for j in range(self.n_vehicles):
                sig = self.sigma[k, j]
                w.writerow([
                    f"{self.t[k]:.6f}", j + 1,
                    f"{self.x[k, j]:.9f}", f"{self.v[k, j]:.9f}",
                    f"{self.u[k, j]:.9f}",
                    "" if math.isinf(sig) else f"{sig:.9f}",
                    int(self.mode[k, j]),
                ])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text


@dataclass
class SimSummary:
    """Event times and cost metrics derived from a run."""

    status: int
    Ta: list[Optional[float]]
    Texit: list[Optional[float]]
    tau_occ: Optional[float]
    fuel_cost: list[float]
    fuel_total: float
    time_cost: Optional[float]
    taus: list[float]
    seed: Optional[int]
    violations: list[str] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return self.status == STATUS_OK

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "complete": self.complete,
            "Ta": self.Ta,
            "Texit": self.Texit,
            "tau_occ": self.tau_occ,
            "fuel_cost": self.fuel_cost,
            "fuel_total": self.fuel_total,
            "time_cost": self.time_cost,
            "taus": self.taus,
            "seed": self.seed,
            "violations": self.violations,
        }

    def to_json(self, path: str | Path | None = None) -> str:
        text = json.dumps(self.to_dict(), indent=2) + "\n"
        if path is not None:
            Path(path).write_text(text)
        return text


def step(
    x: Sequence[float],
    v: Sequence[float],
    taus: Sequence[float],
    t: float,
    road: RoadParams,
    dt: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """One integration step of the whole string; returns (x', v', u, mode).

    Controls are evaluated in ascending vehicle index so each follower sees
    its leader's applied acceleration from the same step.
    """
    n = len(x)
    xn = np.empty(n)
    vn = np.empty(n)
    u = np.empty(n)
    mode = np.empty(n, dtype=np.int8)
    from .following import SafetyViolation
    from .safety import safety_ratio

    for j in range(n):
        if j > 0:
            sig = safety_ratio(x[j - 1], x[j], v[j - 1], v[j], road)
            if sig < 1.0 - 1e-6:
                raise SafetyViolation(f"sigma = {sig:.9f} < 1 at t = {t:.3f}")
        vj = min(v[j], road.vM)
        at_cap = v[j] >= road.vM - 1e-9
        uj = _fast.g_uc_accel(-x[j], vj, taus[j] - t, dt,
                              road.um, road.uM, road.vM, road.vnom)
        mj = _fast.MODE_UNCOUPLED
        if j > 0 and vj >= v[j - 1] and 1.0 - 1e-6 <= sig <= road.sigma0:
            gus = _fast.g_us_accel(v[j - 1], vj, max(sig, 1.0), u[j - 1], road.um)
            uj = min(uj, gus)
            mj = _fast.MODE_SAFE_FOLLOWING
        if at_cap:
            uj = min(max(uj, road.um), 0.0)
        dx, vend, _ = _fast.step_vehicle(vj, uj, dt, road.vM)
        xn[j] = x[j] + dx
        vn[j] = vend
        u[j] = uj
        mode[j] = mj
    return xn, vn, u, mode


def _interp_crossing(t: np.ndarray, x: np.ndarray, level: float) -> Optional[float]:
    """First linear-interpolated time at which ``x`` crosses ``level`` upward."""
    above = x >= level
    if above[0]:
        return float(t[0])
    idx = np.argmax(above)
    if not above[idx]:
        return None
    k = idx - 1
    x0, x1 = x[k], x[k + 1]
    if x1 == x0:
        return float(t[k + 1])
    frac = (level - x0) / (x1 - x0)
    return float(t[k] + frac * (t[k + 1] - t[k]))


def detect_events(
    trace: SimTrace, road: RoadParams
) -> tuple[list[Optional[float]], list[Optional[float]]]:
    """Approach and exit times per vehicle; None when the crossing is absent."""
    Ta, Texit = [], []
    exit_pos = road.Delta + road.L
    for j in range(trace.n_vehicles):
        Ta.append(_interp_crossing(trace.t, trace.x[:, j], 0.0))
        Texit.append(_interp_crossing(trace.t, trace.x[:, j], exit_pos))
    return Ta, Texit


def fuel_cost(
    trace: SimTrace, Texit: Sequence[Optional[float]]
) -> tuple[list[float], float]:
    """Per-vehicle |acceleration| integral up to each exit, and the total.

    Acceleration is piecewise constant within a step (dropping to zero at a
    velocity clamp), so the exact per-step integral is the speed change
    |dv|; the exit step is weighted by its covered fraction.
    """
    costs = []
    dt = float(trace.t[1] - trace.t[0]) if len(trace.t) > 1 else 0.0
    for j in range(trace.n_vehicles):
        dv = np.abs(np.diff(trace.v[:, j]))
        te = Texit[j]
        if te is None or dt == 0.0:
            costs.append(float(dv.sum()))
            continue
        w = np.clip((te - trace.t[:-1]) / dt, 0.0, 1.0)
        costs.append(float((dv * w).sum()))
    return costs, float(sum(costs))


def resolve_taus(scenario: Scenario) -> list[float]:
    """Approach times for a run: explicit per vehicle, or via scheduling."""
    if scenario.tau_mode == "im":
        rep = schedule(
            [v.x for v in scenario.vehicles],
            [v.v for v in scenario.vehicles],
            scenario.A,
            scenario.road,
        )
        return list(rep.taus)
    taus = []
    for j, veh in enumerate(scenario.vehicles, start=1):
        if veh.tau is None:
            raise ValueError(f"vehicle {j}: approach time unset in explicit mode")
        taus.append(veh.tau)
    return taus


def run(scenario: Scenario, check: bool = True) -> tuple[SimTrace, SimSummary]:
    """Simulate until every vehicle exits the target region or ``t_end``."""
    if check:
        violations = validate_scenario(scenario)
        if violations:
            raise ValueError("invalid scenario: " + "; ".join(violations))
    taus = resolve_taus(scenario)
    r = scenario.road
    status, nsteps, T, X, V, U, SIG, MODE, _ = _fast.run_string(
        np.array([v.x for v in scenario.vehicles], dtype=float),
        np.array([v.v for v in scenario.vehicles], dtype=float),
        np.array(taus, dtype=float),
        scenario.dt, scenario.t_end,
        r.L, r.Delta, r.vM, r.um, r.uM, r.vnom, r.sigma0,
    )
    trace = SimTrace(
        t=T[:nsteps].copy(), x=X[:nsteps].copy(), v=V[:nsteps].copy(),
        u=U[:nsteps].copy(), sigma=SIG[:nsteps].copy(), mode=MODE[:nsteps].copy(),
    )
    Ta, Texit = detect_events(trace, r)
    costs, total = fuel_cost(trace, Texit)
    violations = []
    if status == STATUS_SAFETY_VIOLATION:
        k = nsteps - 1
        for j in range(1, trace.n_vehicles):
            if trace.sigma[k, j] < 1.0 - 1e-6:
                violations.append(
                    f"vehicle {j + 1}: sigma = {trace.sigma[k, j]:.9f} "
                    f"at t = {trace.t[k]:.3f}"
                )
    tau_occ = None
    time_cost = None
    if Ta[0] is not None and Texit[-1] is not None:
        tau_occ = Texit[-1] - Ta[0]
        time_cost = taus[0] + tau_occ
    summary = SimSummary(
        status=int(status),
        Ta=Ta,
        Texit=Texit,
        tau_occ=tau_occ,
        fuel_cost=costs,
        fuel_total=total,
        time_cost=time_cost,
        taus=list(taus),
        seed=scenario.seed,
        violations=violations,
    )
    return trace, summary


def random_scenario(
    road: RoadParams,
    n_vehicles: int,
    seed: int,
    A: float = 1.0,
    dt: float = 0.01,
    t_end: float = 120.0,
) -> Scenario:
    """Random valid scenario: safe initial spacing, scheduling-ready positions.

    Speeds are drawn uniformly from [0.3, 0.9] of the speed cap; gaps are
    the pairwise safe-following distance inflated by a factor in
    [1.05, 3]; the lead position sits at or left of the scheduling
    threshold so every prescribed approach time is reachable.
    """
    rng = np.random.default_rng(seed)
    speeds = rng.uniform(0.3, 0.9, size=n_vehicles) * road.vM
    x1 = suff_cond_threshold(road) - rng.uniform(0.0, 20.0)
    xs = [x1]
    for j in range(1, n_vehicles):
        D = safe_following_distance(speeds[j - 1], speeds[j], road)
        xs.append(xs[-1] - D * rng.uniform(1.05, 3.0))
    vehicles = tuple(
        VehicleState(x=float(x), v=float(v)) for x, v in zip(xs, speeds)
    )
    return Scenario(
        road=road, vehicles=vehicles, tau_mode="im", A=A,
        dt=dt, t_end=t_end, seed=seed,
    )
