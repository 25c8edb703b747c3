import json

import pytest

from vtsi.scenario import (Scenario, ScenarioError, load_scenario,
                           parse_scenario)


class TestDefaults:
    def test_empty_object_gives_full_default(self):
        sc = parse_scenario({})
        kinds = [sp.kind for sp in sc.plan.spans]
        assert kinds == ["straight", "transition", "arc", "transition",
                        "straight"]
        assert all(sp.length == 30.0 for sp in sc.plan.spans)
        assert sc.plan.spans[2].radius_start == 6000.0
        assert sc.ctrl_per_span == 10

        br = sc.bridge
        assert (br.kind, br.degree, br.elements_per_span) == ("nurbs", 3, 8)
        assert br.rayleigh == (0.0, 0.0)
        sect = br.section
        assert sect.E == 28.25e9
        assert sect.G == 1e12
        assert sect.A == 7.73
        assert sect.I_t == 15.65
        assert sect.I_n == 7.84
        assert sect.I_b == 74.42
        assert sect.rho_lin == 41740.0

        veh = sc.vehicle
        assert veh.m_w == 7120.0
        assert veh.m_c == 41750.0
        assert veh.I_w == 1140.0
        assert veh.I_c == 23200.0
        assert veh.k_s == 865.6e3
        assert veh.l_0 == 1.37
        assert veh.v == 100.0
        assert veh.g == pytest.approx(9.81)

        run = sc.run
        assert (run.strategy, run.rho_inf) == ("A", 0.9)
        assert not run.newmark
        assert (run.dt, run.horizon) == (1e-3, 1.5)
        assert run.t0_correction and run.bridge_static_init
        assert run.displacement_repair_every == 0

        assert len(sc.probes) == 1
        assert sc.probes[0].name == "midspan"
        assert sc.probes[0].s == 75.0
        assert not sc.add_static_axle_load

    def test_arc_window(self):
        sc = parse_scenario({})
        assert sc.arc_window == (60.0, 90.0)
        straight = parse_scenario(
            {"plan": {"spans": [{"kind": "straight", "length": 30.0}]},
             "run": {"horizon": 0.3}})
        assert straight.arc_window is None
        assert straight.probes[0].s == 15.0


class TestOverrides:
    def test_strategy_b_defaults_to_newmark(self):
        sc = parse_scenario({"run": {"strategy": "B", "horizon": 0.9}})
        assert sc.run.strategy == "B"
        assert sc.run.newmark

    def test_strategy_b_keeps_explicit_rho(self):
        sc = parse_scenario({"run": {"strategy": "B", "rho_inf": 0.8,
                                     "horizon": 0.9}})
        assert not sc.run.newmark
        assert sc.run.rho_inf == 0.8

    def test_section_and_vehicle_keys_lower_snake(self):
        sc = parse_scenario({
            "bridge": {"section": {"e": 30e9, "i_n": 8.0}},
            "vehicle": {"m_w": 7000.0, "v": 80.0},
        })
        assert sc.bridge.section.E == 30e9
        assert sc.bridge.section.I_n == 8.0
        assert sc.bridge.section.A == 7.73  # untouched default
        assert sc.vehicle.m_w == 7000.0
        assert sc.vehicle.v == 80.0

    def test_probes_and_flags(self):
        sc = parse_scenario({
            "probes": [{"name": "joint", "s": 30.0}, {"s": 75.0}],
            "flags": {"add_static_axle_load": True},
        })
        assert [p.name for p in sc.probes] == ["joint", "probe1"]
        assert sc.add_static_axle_load


class TestRejection:
    @pytest.mark.parametrize("data,named", [
        ({"speed": 10.0}, "'speed' in scenario"),
        ({"plan": {"span": []}}, "'span' in plan"),
        ({"plan": {"spans": [{"len": 30.0}]}}, "'len' in plan.spans[0]"),
        ({"bridge": {"order": 3}}, "'order' in bridge"),
        ({"bridge": {"section": {"ei": 1.0}}}, "'ei' in bridge.section"),
        ({"vehicle": {"mass": 1.0}}, "'mass' in vehicle"),
        ({"run": {"step": 1e-3}}, "'step' in run"),
        ({"probes": [{"x": 1.0}]}, "'x' in probes[0]"),
        ({"flags": {"verbose": True}}, "'verbose' in flags"),
    ])
    def test_unknown_keys_are_named(self, data, named):
        with pytest.raises(ScenarioError, match="unknown key %s"
                           % named.replace("[", "\\[")):
            parse_scenario(data)

    def test_probe_off_path(self):
        with pytest.raises(ScenarioError, match="off the path"):
            parse_scenario({"probes": [{"name": "far", "s": 400.0}]})

    def test_horizon_longer_than_crossing(self):
        with pytest.raises(ScenarioError, match="horizon"):
            parse_scenario({"run": {"horizon": 2.0}})

    def test_bad_values(self):
        with pytest.raises(ScenarioError):
            parse_scenario({"run": {"strategy": "X"}})
        with pytest.raises(ScenarioError):
            parse_scenario({"run": {"dt": -1.0}})
        with pytest.raises(ScenarioError):
            parse_scenario({"bridge": {"kind": "shell"}})
        with pytest.raises(ScenarioError):
            parse_scenario({"vehicle": {"m_w": -1.0}})
        with pytest.raises(ScenarioError):
            parse_scenario([1, 2, 3])

    def test_curvature_jump_in_plan(self):
        with pytest.raises(ScenarioError):
            parse_scenario({"plan": {"spans": [
                {"kind": "straight", "length": 30.0},
                {"kind": "arc", "length": 30.0,
                 "radius_start": 500.0, "radius_end": 500.0},
            ]}})


class TestLoading:
    def test_round_trip_file(self, tmp_path):
        p = tmp_path / "scenario.json"
        p.write_text(json.dumps({"run": {"strategy": "C", "horizon": 0.5}}))
        sc = load_scenario(p)
        assert isinstance(sc, Scenario)
        assert sc.run.strategy == "C"
        assert sc.run.newmark

    def test_malformed_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{ not json")
        with pytest.raises(ScenarioError, match="cannot parse"):
            load_scenario(p)
