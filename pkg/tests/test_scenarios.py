import copy
import json

import numpy as np
import pytest

from equiloc import scenarios
from equiloc.errors import ScenarioError

NON_COMMUTING = {
    "name": "plane_rotation_translation", "compact": False,
    "chart": {"id": "plane", "coords": ["x", "y"], "domain": [[-1, 1], [-1, 1]]},
    "metric": [["1", "0"], ["0", "1"]],
    "fields": {"X": ["-y", "x"], "Y": ["1", "0"]},
}


@pytest.mark.parametrize("name", list(scenarios.CATALOG))
def test_builtins_validate_and_round_trip(name):
    sc = scenarios.builtin(name)
    assert sc.dim % 2 == 0
    text = scenarios.serialize(sc)
    again = scenarios.load_scenario(text)
    assert again.config == sc.config
    pts = sc.geometry.chart.sample(np.random.default_rng(0), 7)
    np.testing.assert_array_equal(again.pair.X.evaluate(pts), sc.pair.X.evaluate(pts))


def test_parameters_override_and_reach_fields():
    sc = scenarios.builtin("sphere2_two_rotations", t=0.5, c=3.0)
    assert sc.params["t"] == 0.5 and sc.params["c"] == 3.0
    p = np.array([[1.0, 0.0]])
    np.testing.assert_allclose(sc.pair.Y.evaluate(p), 3.0 * sc.pair.X.evaluate(p))


def test_unknown_scenario():
    with pytest.raises(ScenarioError, match="scenario-not-found"):
        scenarios.builtin("klein_bottle")


def test_odd_dimension_rejected():
    cfg = {"name": "line", "chart": {"id": "line", "coords": ["x"], "domain": [[0, 1]]},
           "metric": [["1"]], "fields": {"X": ["0"], "Y": ["0"]}}
    with pytest.raises(ScenarioError, match="odd"):
        scenarios.from_config(cfg)


def test_false_commuting_claim_rejected():
    with pytest.raises(ScenarioError, match="commuting claimed"):
        scenarios.from_config(dict(NON_COMMUTING, commuting=True))
    sc = scenarios.from_config(dict(NON_COMMUTING, commuting=False))
    assert sc.validation["commutator"] > 0.5


def test_non_killing_field_rejected():
    cfg = copy.deepcopy(NON_COMMUTING)
    cfg["fields"]["X"] = ["x", "0"]
    with pytest.raises(ScenarioError, match="not Killing"):
        scenarios.from_config(cfg)


def test_non_closed_test_form_rejected():
    cfg = scenarios.builtin_config("plane_cr")
    cfg["test_forms"]["bad"] = {"0": "x"}
    with pytest.raises(ScenarioError, match="not twisted-closed"):
        scenarios.from_config(cfg)


def test_bad_documents():
    with pytest.raises(ScenarioError):
        scenarios.load_scenario("{not json")
    with pytest.raises(ScenarioError, match="missing"):
        scenarios.load_scenario(json.dumps({"name": "x"}))


def test_wrong_component_is_rejected():
    cfg = scenarios.builtin_config("sphere2_rotation")
    cfg["components"][0]["fields"]["X"] = ["1", "0"]
    with pytest.raises(ScenarioError):
        scenarios.from_config(cfg)
