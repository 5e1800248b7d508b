import json
import os
from pathlib import Path

import pytest

import cmgame

FIXTURES = Path(os.environ.get("CMG_FIXTURES", Path(__file__).parent.parent / "fixtures"))


def fixture(name):
    return cmgame.load_model(FIXTURES / f"{name}.json")


def test_model_properties():
    g = fixture("g2_pennies")
    assert g.states == ["s0", "d"]
    assert g.player_count == 2
    assert g.actions(0) == ["H", "T"]
    assert g.delta == [1]
    again = cmgame.load_model(g.to_json())
    assert again.states == g.states


def test_pennies_certificate():
    g = fixture("g2_pennies")
    cert = cmgame.verify_equilibrium(g, FIXTURES / "g2_equilibrium.json", unconstrained=True)
    assert cert["equilibrium"]
    assert max(abs(x) for x in cert["gap"]) < 1e-8
    pure = {"profile": [{"s0": {"H": 1}}, {"s0": {"H": 1}}]}
    cert = cmgame.verify_equilibrium(g, pure, unconstrained=True)
    assert not cert["equilibrium"]
    assert cert["gap"][1] == pytest.approx(2.0)


def test_solve_pennies_from_random_starts():
    g = fixture("g2_pennies")
    result = cmgame.solve_equilibrium(
        g, unconstrained=True, seed=3, restarts=2, uniform_start=False, tolerance=1e-3
    )
    assert result["status"] == "success"
    assert result["certificate"]["epsilon"] < 1e-3
    for player in result["profile"]:
        assert player["s0"]["H"] == pytest.approx(0.5, abs=1e-3)
    assert result["rho"] == cmgame.unconstrained_rho(g) == [[-2.0], [-2.0]]


def test_constrained_budget():
    g = fixture("g4_budget")
    result = cmgame.solve_equilibrium(g, seed=1)
    assert result["status"] == "success"
    assert result["certificate"]["payoffs"]["C"][0][0] == pytest.approx(0.5, abs=1e-8)
    br = cmgame.best_response(g, 0)
    assert br["value"] == pytest.approx(0.5, abs=1e-8)
    assert br["strategy"]["s0"]["a"] == pytest.approx(0.5, abs=1e-8)


def test_absorption_and_bounds():
    report = cmgame.check_absorbing(fixture("g5_loop"))
    assert report["is_absorbing"] is False
    assert report["offending_component"]["states"] == ["s0"]
    g3 = fixture("g3_geometric")
    assert cmgame.uniform_absorption_bound(g3) == pytest.approx(4.0)
    assert cmgame.expected_hitting_time(g3) == pytest.approx(4.0)
    occ = cmgame.occupancy(g3)
    assert occ["total_mass"] == pytest.approx(4.0)
    assert occ["residual"] < 1e-12


def test_discounted_transform():
    g = cmgame.load_discounted(FIXTURES / "d1_discounted.json")
    assert g.states[-1] == "__cemetery__"
    assert cmgame.uniform_absorption_bound(g) == pytest.approx(2.0)


def test_simulation_is_seeded():
    g = fixture("g3_geometric")
    a = cmgame.simulate(g, samples=5000, seed=11, threads=1)
    b = cmgame.simulate(g, samples=5000, seed=11, threads=2)
    assert a == b
    assert abs(a["hitting_time"]["mean"] - 4.0) < 4 * a["hitting_time"]["standard_error"]


def test_errors_carry_codes():
    with pytest.raises(cmgame.Error) as info:
        cmgame.load_model({"format": "cmg-model"})
    assert info.value.code == "Schema"
    doc = json.loads((FIXTURES / "g3_geometric.json").read_text())
    doc["kernel"][0]["p"] = "1/2"
    with pytest.raises(cmgame.Error) as info:
        cmgame.load_model(doc)
    assert info.value.code == "NonStochasticRow"
    g4 = fixture("g4_budget")
    with pytest.raises(cmgame.Error) as info:
        cmgame.solve_equilibrium(g4, rho=[[1.5]])
    assert info.value.code == "SlaterFailure"
    with pytest.raises(cmgame.Error) as info:
        cmgame.best_response(g4, 3)
    assert info.value.code == "InvalidArgument"
