"""Distributed switching control and simulation of vehicle strings.

A string of vehicles approaches a target region under per-vehicle
prescribed approach times.  Each vehicle runs a receding-horizon
minimum-fuel controller when its leader is far enough ahead and a
constant-safety-ratio following controller otherwise; a scheduling layer
assigns the approach times and bounds the group's occupancy of the region.
"""
from .model import (
    CouplingState,
    PlanSegment,
    RoadParams,
    Scenario,
    VehicleState,
    VelocityPlan,
    load_scenario,
    save_scenario,
    suff_cond_threshold,
    validate_scenario,
)
from .safety import (
    in_coupling_set,
    mbm_stop_distance,
    safe_following_distance,
    safety_ratio,
)
from .uncoupled import (
    FeasibilityResult,
    NoFeasiblePlan,
    earliest_approach_time,
    feasibility,
    g_uc,
    plan,
    tau_earliest,
)
from .following import (
    MODE_SAFE_FOLLOWING,
    MODE_UNCOUPLED,
    SafetyViolation,
    g_sf,
    g_us,
    local_control,
    simulate_unsaturated_pair,
)
from .scheduler import (
    ScheduleReport,
    group_earliest,
    occupancy_bound,
    prescribe_taus,
    schedule,
    script_L,
    t_fol,
    t_iat_analytic,
    t_iat_numeric,
    t_nom,
    v_underline,
)
from .engine import (
    SimSummary,
    SimTrace,
    detect_events,
    fuel_cost,
    random_scenario,
    run,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "CouplingState", "PlanSegment", "RoadParams", "Scenario", "VehicleState",
    "VelocityPlan", "load_scenario", "save_scenario", "suff_cond_threshold",
    "validate_scenario",
    "in_coupling_set", "mbm_stop_distance", "safe_following_distance",
    "safety_ratio",
    "FeasibilityResult", "NoFeasiblePlan", "earliest_approach_time",
    "feasibility", "g_uc", "plan", "tau_earliest",
    "MODE_SAFE_FOLLOWING", "MODE_UNCOUPLED", "SafetyViolation", "g_sf",
    "g_us", "local_control", "simulate_unsaturated_pair",
    "ScheduleReport", "group_earliest", "occupancy_bound", "prescribe_taus",
    "schedule", "script_L", "t_fol", "t_iat_analytic", "t_iat_numeric",
    "t_nom", "v_underline",
    "SimSummary", "SimTrace", "detect_events", "fuel_cost",
    "random_scenario", "run", "step",
]
