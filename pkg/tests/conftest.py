"""Shared fixtures: expensive scenario runs are built once per session."""
import numpy as np
import pytest

from vtsi import parse_scenario, run_simulation
from vtsi.simulate import build_scenario_bridge, build_scenario_path


@pytest.fixture(scope="session")
def default_scenario():
    return parse_scenario({})


@pytest.fixture(scope="session")
def default_path(default_scenario):
    return build_scenario_path(default_scenario)


@pytest.fixture(scope="session")
def default_bridge(default_scenario, default_path):
    return build_scenario_bridge(default_scenario, default_path)


@pytest.fixture(scope="session")
def default_history(default_scenario):
    """Full default crossing: NURBS p=3, Strategy A, rho_inf=0.9, dt=1e-3."""
    return run_simulation(default_scenario)


@pytest.fixture(scope="session")
def fem_history():
    return run_simulation(parse_scenario({"bridge": {"kind": "fem"}}))


@pytest.fixture(scope="session")
def strategy_b_history():
    return run_simulation(parse_scenario(
        {"run": {"strategy": "B", "horizon": 0.9}}))


@pytest.fixture(scope="session")
def newmark_a_history():
    """Strategy A forced to plain Newmark (the spurious-oscillation baseline)."""
    return run_simulation(parse_scenario(
        {"run": {"newmark": True, "horizon": 0.9}}))


@pytest.fixture(scope="session")
def straight_span_scenario():
    def make(**run_overrides):
        return parse_scenario({
            "plan": {"spans": [{"kind": "straight", "length": 30.0}]},
            "bridge": {"kind": "fem"},
            "run": {"horizon": 0.3, **run_overrides},
        })
    return make
