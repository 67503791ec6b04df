"""End-to-end acceptance checks, one per guaranteed property of the library.

Each test prints a single PASS/FAIL line so the suite doubles as a release
checklist.  Tolerances are part of the contract and are not to be loosened.
"""
import math
import time

import numpy as np
import pytest

from vehstring import (
    CouplingState,
    RoadParams,
    g_us,
    occupancy_bound,
    plan,
    random_scenario,
    run,
    safe_following_distance,
    simulate_unsaturated_pair,
    t_iat_analytic,
    t_iat_numeric,
    t_nom,
    v_underline,
)
from vehstring.engine import STATUS_OK
from vehstring.uncoupled import feasibility

from _dp import DPOracle


def _report(criterion: str, ok: bool, detail: str = "") -> None:
    print(f"\n[{criterion}] {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else ""))
    assert ok, f"{criterion}: {detail}"


@pytest.fixture(scope="module", autouse=True)
def warm_compiled_kernels(road):
    """Trigger jit compilation outside the timed sections."""
    run(random_scenario(road, 2, seed=0, t_end=30.0))
    DPOracle(road).solve_many(road.vnom, 0.1, [0.0])


def test_criterion_1_spacing_constants(road):
    t0 = time.perf_counter()
    tn = t_nom(road)
    vu = v_underline(road)
    ti_num = t_iat_numeric(road)
    ti_ana = t_iat_analytic(road)
    elapsed = time.perf_counter() - t0
    ok = (
        abs(tn - 1.238) <= 0.01
        and abs(ti_num - 1.584) <= 0.01
        and abs(ti_ana - 1.584) <= 0.01
        and abs(vu - 8.772) <= 0.005
        and elapsed < 1.0
    )
    _report(
        "constants: nominal gap time, inter-approach bound, stall speed",
        ok,
        f"Tnom={tn:.6f} Tiat={ti_ana:.6f}/{ti_num:.6f} v={vu:.6f} in {elapsed:.3f}s",
    )


def test_criterion_2_occupancy_bound(road):
    bound = occupancy_bound(8, road)
    _report(
        "occupancy bound for eight vehicles",
        12.6 <= bound <= 12.8,
        f"bound={bound:.6f}s",
    )


def test_criterion_3_randomized_string_runs(road):
    t0 = time.perf_counter()
    ti = t_iat_analytic(road)
    n_scen = 200
    min_sigma = math.inf
    worst_ta1 = 0.0
    worst_floor = math.inf
    worst_dichotomy = -math.inf
    failures = []
    for seed in range(n_scen):
        s = random_scenario(road, 8, seed=seed, A=1.0)
        trace, summary = run(s)
        if summary.status != STATUS_OK:
            failures.append(f"seed {seed}: status {summary.status}")
            continue
        finite = np.isfinite(trace.sigma)
        min_sigma = min(min_sigma, float(trace.sigma[finite].min()))
        worst_ta1 = max(worst_ta1, abs(summary.Ta[0] - summary.taus[0]))
        for j in range(8):
            lo = np.searchsorted(trace.t, summary.Ta[j])
            hi = np.searchsorted(trace.t, summary.Texit[j], side="right")
            worst_floor = min(worst_floor, float(trace.v[lo:hi, j].min()))
        for j in range(1, 8):
            if summary.taus[j] - summary.Ta[j - 1] >= ti:
                worst_dichotomy = max(
                    worst_dichotomy, abs(summary.Ta[j] - summary.taus[j])
                )
            else:
                worst_dichotomy = max(
                    worst_dichotomy, summary.Ta[j] - summary.Ta[j - 1] - ti
                )
    elapsed = time.perf_counter() - t0
    ok = (
        not failures
        and min_sigma >= 1.0 - 1e-6
        and worst_ta1 <= 0.02
        and worst_floor >= road.vnom - 1e-6
        and worst_dichotomy <= 0.02
        and elapsed < 60.0
    )
    _report(
        "randomized eight-vehicle runs: safety, timing, approach dichotomy",
        ok,
        f"min_sigma={min_sigma:.6f} ta1_err={worst_ta1:.4f} "
        f"v_floor={worst_floor:.4f} dichotomy={worst_dichotomy:.4f} "
        f"failures={failures[:3]} in {elapsed:.1f}s",
    )


def _leader_profiles():
    """Ten leader acceleration profiles, all settling before t = 30 s."""

    def steps(*segs):
        def f(t):
            for end, u in segs:
                if t < end:
                    return u
            return 0.0

        return f

    # paired with the start speeds below so the leader stays inside (0, vM)
    # except for full stops, keeping the acceleration clamp off mid-step
    return [
        lambda t: 0.0,
        steps((5.0, -2.0)),
        steps((2.0, 1.5)),
        steps((3.0, -3.5), (7.0, 2.0)),
        steps((2.0, 1.0), (9.0, -1.0)),
        steps((6.0, -0.5), (12.0, 0.8)),
        steps((1.5, -4.0), (5.0, 0.0), (10.0, 2.0)),
        steps((4.0, 0.7), (8.0, -0.7)),
        steps((3.0, -1.2), (6.0, 1.2), (9.0, -1.2), (12.0, 1.2)),
        steps((10.0, -2.8), (20.0, 1.4)),
    ]


def test_criterion_4_constant_ratio_following(road):
    t0 = time.perf_counter()
    cases = [
        (12.0, 14.0, 1.10),
        (10.0, 13.0, 1.05),
        (13.0, 13.5, 1.18),
        (8.0, 12.0, 1.12),
        (14.0, 15.5, 1.02),
        (11.0, 11.0, 1.15),
        (9.0, 14.0, 1.08),
        (12.5, 13.0, 1.20),
        (10.5, 12.5, 1.11),
        (13.3, 14.8, 1.06),
    ]
    worst_drift = 0.0
    worst_bound = -math.inf
    worst_gap = 0.0
    for accel, (vl0, vf0, ratio) in zip(_leader_profiles(), cases):
        D = safe_following_distance(vl0, vf0, road)
        out = simulate_unsaturated_pair(
            accel, 0.0, vl0, -ratio * D, vf0, road, t_end=60.0
        )
        sigma0 = out["sigma"][0]
        worst_drift = max(worst_drift, float(np.abs(out["sigma"] - sigma0).max()))
        bound = math.sqrt(vf0**2 - vl0**2 + road.vM**2)
        worst_bound = max(worst_bound, float(out["v_fol"].max()) - bound)
        gap = out["x_lead"][-1] - out["x_fol"][-1]
        worst_gap = max(worst_gap, abs(gap - sigma0 * road.L) / (sigma0 * road.L))
    elapsed = time.perf_counter() - t0
    ok = (
        worst_drift <= 1e-4
        and worst_bound <= 1e-3
        and worst_gap <= 0.01
        and elapsed < 10.0
    )
    _report(
        "constant-ratio following: drift, speed bound, limiting gap",
        ok,
        f"drift={worst_drift:.2e} bound_excess={worst_bound:.2e} "
        f"gap_err={worst_gap:.2e} in {elapsed:.1f}s",
    )


def test_criterion_5_following_control_bounded(road):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    n = 100_000
    v_fol = rng.uniform(0.0, road.vM, n)
    v_lead = rng.uniform(0.0, 1.0, n) * v_fol
    sigma = rng.uniform(1.0, road.sigma0, n)
    u_lead = rng.uniform(road.um, road.uM, n)
    lo, hi = math.inf, -math.inf
    for vl, vf, s, ul in zip(v_lead, v_fol, sigma, u_lead):
        u = g_us(CouplingState(vl, vf, s), ul, road)
        lo = min(lo, u)
        hi = max(hi, u)
    elapsed = time.perf_counter() - t0
    ok = lo >= road.um and hi <= road.uM and elapsed < 1.0
    _report(
        "following control within acceleration bounds on random states",
        ok,
        f"range=[{lo:.4f}, {hi:.4f}] in {elapsed:.2f}s",
    )


def test_criterion_6_planner_matches_brute_force(road):
    t0 = time.perf_counter()
    oracle = DPOracle(road)
    speeds = [road.vnom + m for m in (-6, -5, -4, -3, -2, -1, 0, 1, 2, 3)]
    horizons = [4.0, 4.5, 5.0, 5.5, 6.0, 6.5, 7.0, 7.5, 8.0, 8.5]
    worst = 0.0
    worst_case = None
    n_cases = 0
    for v in speeds:
        for h in horizons:
            window = feasibility(1.0, v, h, road)
            # keep a margin from both window edges: the lower edge is a
            # square-root singularity of the cost and the upper edge needs
            # speeds the lattice cannot represent.  Substantial costs keep
            # the relative tolerance meaningful.
            lo = window.d_min + 1.0
            hi = lo + 0.92 * (0.9 * window.d_max - lo)
            candidates = [
                float(d)
                for d in np.linspace(lo, hi, 400)
                if plan(float(d), v, h, road).cost >= 8.0
            ]
            assert len(candidates) >= 10
            picks = [candidates[i] for i in
                     np.linspace(0, len(candidates) - 1, 10).round().astype(int)]
            for d, got in zip(picks, oracle.solve_many(v, h, picks)):
                assert got >= 0.0, f"oracle found no profile for {(d, v, h)}"
                want = plan(d, v, h, road).cost
                rel = abs(want - got) / got
                n_cases += 1
                if rel > worst:
                    worst, worst_case = rel, (round(d, 2), round(v, 3), h)
    elapsed = time.perf_counter() - t0
    ok = n_cases == 1000 and worst <= 0.02 and elapsed < 300.0
    _report(
        "planner cost matches brute-force dynamic program",
        ok,
        f"{n_cases} cases worst_rel={worst:.4f} at {worst_case} in {elapsed:.1f}s",
    )


def test_criterion_7_safe_distance_covers_double_braking(road):
    t0 = time.perf_counter()
    vs = np.linspace(0.0, road.vM, 50)
    vl, vf = np.meshgrid(vs, vs, indexing="ij")
    gap0 = road.L + np.maximum(0.0, (vf**2 - vl**2) / (-2.0 * road.um))
    t = np.linspace(0.0, road.vM / -road.um + 0.5, 2000)
    min_gap = math.inf
    for tk in t:
        tl = np.minimum(tk, vl / -road.um)
        tf = np.minimum(tk, vf / -road.um)
        dl = vl * tl + 0.5 * road.um * tl**2
        df = vf * tf + 0.5 * road.um * tf**2
        min_gap = min(min_gap, float((gap0 + dl - df).min()))
    elapsed = time.perf_counter() - t0
    ok = min_gap >= road.L - 1e-9 and elapsed < 5.0
    _report(
        "safe distance survives simultaneous full braking",
        ok,
        f"min_gap={min_gap:.6f} (length {road.L}) in {elapsed:.1f}s",
    )


def test_criterion_8_schedule_design_properties(road):
    dt = 0.01
    # dense spacing: every vehicle meets its prescribed time exactly
    worst = 0.0
    for seed in range(25):
        s = random_scenario(road, 8, seed=1000 + seed, A=1.0, dt=dt)
        _, summary = run(s)
        assert summary.status == STATUS_OK
        worst = max(
            worst, max(abs(ta - tau) for ta, tau in zip(summary.Ta, summary.taus))
        )
    dense_ok = worst <= 2 * dt

    # fully packed spacing: occupancy stays below the guaranteed bound
    bound = occupancy_bound(8, road)
    cohesion = 0.0
    packed_ok = True
    for seed in range(25):
        s = random_scenario(road, 8, seed=2000 + seed, A=0.0, dt=dt)
        trace, summary = run(s)
        if summary.status != STATUS_OK or summary.tau_occ > bound:
            packed_ok = False
            break
        k = np.searchsorted(trace.t, summary.Ta[-1])
        k = min(k, len(trace.t) - 1)
        v = trace.v[k]
        cohesion = max(cohesion, float(v.max() - v.min()))

    # spacing sweep: starting earlier costs longer occupancy
    s0 = random_scenario(road, 8, seed=77, A=1.0, dt=dt)
    tau1s, occs = [], []
    for A in (0.0, 0.25, 0.5, 0.75, 1.0):
        import dataclasses

        _, summary = run(dataclasses.replace(s0, A=A))
        assert summary.status == STATUS_OK
        tau1s.append(summary.taus[0])
        occs.append(summary.tau_occ)
    trend_ok = all(a >= b - 2 * dt for a, b in zip(tau1s, tau1s[1:])) and all(
        b >= a - 2 * dt for a, b in zip(occs, occs[1:])
    )

    ok = dense_ok and packed_ok and trend_ok
    _report(
        "schedule design: exact arrival, packed occupancy, spacing trends",
        ok,
        f"arrival_err={worst:.4f} cohesion={cohesion:.3f}m/s (advisory<0.5) "
        f"tau1={[round(x, 2) for x in tau1s]} occ={[round(x, 2) for x in occs]}",
    )


def test_criterion_9_deterministic_traces(road):
    s = random_scenario(road, 8, seed=4242, A=0.5)
    t1, _ = run(s)
    t2, _ = run(s)
    csv1 = t1.to_csv().encode()
    csv2 = t2.to_csv().encode()
    _report(
        "byte-identical traces across repeated runs",
        csv1 == csv2,
        f"{len(csv1)} bytes",
    )
