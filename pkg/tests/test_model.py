import dataclasses
import json
import math

import pytest

from vehstring import (
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
from vehstring.model import scenario_from_dict, scenario_to_dict


class TestRoadParams:
    def test_defaults(self, road):
        assert road.L == 4.0
        assert road.Delta == 12.0
        assert road.vM == 16.667
        assert road.um == -4.0
        assert road.uM == 3.0
        assert road.vnom == 13.333
        assert road.sigma0 == 1.2

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"L": 0.0},
            {"L": -1.0},
            {"Delta": -0.1},
            {"vM": 0.0},
            {"um": 0.0},
            {"um": 1.0},
            {"uM": -0.5},
            {"vnom": 0.0},
            {"vnom": 17.0},      # above the speed cap
            {"sigma0": 1.0},
            {"sigma0": 0.9},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            RoadParams(**kwargs)

    def test_frozen(self, road):
        with pytest.raises(dataclasses.FrozenInstanceError):
            road.L = 5.0


class TestVelocityPlan:
    def test_segment_rate(self):
        s = PlanSegment(2.0, 10.0, 16.0)
        assert s.rate == pytest.approx(3.0)
        assert PlanSegment(0.0, 10.0, 10.0).rate == 0.0

    def test_aggregates(self):
        p = VelocityPlan(
            (
                PlanSegment(2.0, 12.0, 4.0),   # brake at -4
                PlanSegment(1.0, 4.0, 4.0),    # cruise
                PlanSegment(3.0, 4.0, 13.0),   # speed up at 3
            ),
            terminal_speed=13.0,
        )
        assert p.duration == pytest.approx(6.0)
        assert p.distance == pytest.approx(16.0 + 4.0 + 25.5)
        assert p.cost == pytest.approx(8.0 + 9.0)
        assert p.initial_accel == pytest.approx(-4.0)
        assert p.breakpoints() == [(0.0, 12.0), (2.0, 4.0), (3.0, 4.0), (6.0, 13.0)]

    def test_speed_at(self):
        p = VelocityPlan(
            (PlanSegment(2.0, 12.0, 4.0), PlanSegment(2.0, 4.0, 4.0)),
            terminal_speed=4.0,
        )
        assert p.speed_at(0.0) == 12.0
        assert p.speed_at(1.0) == pytest.approx(8.0)
        assert p.speed_at(3.0) == pytest.approx(4.0)
        assert p.speed_at(99.0) == pytest.approx(4.0)  # clamped past the horizon

    def test_cruise_only_zero_cost(self):
        p = VelocityPlan((PlanSegment(5.0, 14.0, 14.0),), terminal_speed=14.0)
        assert p.cost == 0.0
        assert p.distance == pytest.approx(70.0)


class TestScenario:
    def _two(self, road, **kw):
        vehicles = (
            VehicleState(x=-80.0, v=13.0, tau=7.0),
            VehicleState(x=-110.0, v=13.0, tau=9.0),
        )
        return Scenario(road=road, vehicles=vehicles, **kw)

    def test_rejects_bad_settings(self, road):
        with pytest.raises(ValueError):
            self._two(road, tau_mode="auto")
        with pytest.raises(ValueError):
            self._two(road, A=1.5)
        with pytest.raises(ValueError):
            self._two(road, dt=0.0)

    def test_with_taus(self, road):
        s = self._two(road)
        s2 = s.with_taus([8.0, 10.0])
        assert [v.tau for v in s2.vehicles] == [8.0, 10.0]
        assert [v.tau for v in s.vehicles] == [7.0, 9.0]  # original untouched
        with pytest.raises(ValueError):
            s.with_taus([8.0])

    def test_validate_clean(self, road):
        assert validate_scenario(self._two(road)) == []

    def test_validate_position_and_speed(self, road):
        s = Scenario(road=road, vehicles=(VehicleState(x=1.0, v=20.0),))
        msgs = validate_scenario(s)
        assert any("position" in m for m in msgs)
        assert any("speed" in m for m in msgs)
        assert all(m.startswith("vehicle 1") for m in msgs)

    def test_validate_ordering(self, road):
        s = Scenario(
            road=road,
            vehicles=(VehicleState(x=-100.0, v=13.0), VehicleState(x=-90.0, v=13.0)),
        )
        assert any("ordering" in m for m in validate_scenario(s))

    def test_validate_unsafe_gap(self, road):
        # follower much faster with a gap barely above one vehicle length
        s = Scenario(
            road=road,
            vehicles=(VehicleState(x=-100.0, v=5.0), VehicleState(x=-105.0, v=16.0)),
        )
        msgs = validate_scenario(s)
        assert any("sigma_2(0) < 1" in m for m in msgs)

    def test_validate_scheduling_threshold(self, road):
        thr = suff_cond_threshold(road)
        inside = Scenario(
            road=road, vehicles=(VehicleState(x=thr + 5.0, v=13.0),), tau_mode="im"
        )
        assert any("threshold" in m for m in validate_scenario(inside))
        outside = Scenario(
            road=road, vehicles=(VehicleState(x=thr - 5.0, v=13.0),), tau_mode="im"
        )
        assert validate_scenario(outside) == []


def test_suff_cond_threshold_value(road):
    # vM^2/(2 um) - vnom^2/(2 uM) evaluated by hand with Fraction arithmetic
    assert suff_cond_threshold(road) == pytest.approx(-64.35175929166667, abs=1e-12)


class TestScenarioFiles:
    def _scenario(self, road):
        return Scenario(
            road=road,
            vehicles=(
                VehicleState(x=-90.0, v=12.0, tau=8.5),
                VehicleState(x=-120.0, v=11.0),
            ),
            tau_mode="im",
            A=0.5,
            dt=0.02,
            t_end=60.0,
            seed=7,
        )

    def test_round_trip(self, road, tmp_path):
        s = self._scenario(road)
        path = tmp_path / "scenario.json"
        save_scenario(s, path)
        assert load_scenario(path) == s

    def test_dict_shape(self, road):
        doc = scenario_to_dict(self._scenario(road))
        assert doc["tau_mode"] == {"im": True, "A": 0.5}
        assert doc["vehicles"][0] == {"x0": -90.0, "v0": 12.0, "tau": 8.5}
        assert "tau" not in doc["vehicles"][1]
        assert doc["seed"] == 7

    def test_explicit_mode_document(self, road):
        s = Scenario(road=road, vehicles=(VehicleState(x=-50.0, v=13.5, tau=4.0),))
        doc = scenario_to_dict(s)
        assert doc["tau_mode"] == {"explicit": True}
        assert scenario_from_dict(doc) == s

    def test_missing_field_raises(self):
        with pytest.raises(ValueError):
            scenario_from_dict({"vehicles": []})

    def test_unknown_mode_raises(self, road):
        doc = scenario_to_dict(self._scenario(road))
        doc["tau_mode"] = {"magic": True}
        with pytest.raises(ValueError):
            scenario_from_dict(doc)

    def test_defaults_applied(self, road):
        doc = {
            "road": scenario_to_dict(self._scenario(road))["road"],
            "vehicles": [{"x0": -50.0, "v0": 13.5}],
        }
        s = scenario_from_dict(doc)
        assert s.tau_mode == "explicit"
        assert s.dt == 0.01
        assert s.t_end == 120.0
        assert s.seed is None

    def test_json_is_valid(self, road, tmp_path):
        path = tmp_path / "s.json"
        save_scenario(self._scenario(road), path)
        json.loads(path.read_text())  # must parse cleanly


def test_vehicle_state_defaults():
    v = VehicleState(x=-10.0, v=5.0)
    assert v.tau is None
    assert math.isfinite(v.x)
