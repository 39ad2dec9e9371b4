import json

import numpy as np
import pytest

from compliantlfd.errors import ConfigError
from compliantlfd.pipeline import (SCENARIOS, angle_between_deg, dof_study, learn_motion_model, load_scenario,
                                   resample_pairs, scenario, scenario_config, scenario_from_config)


def tangent_error_deg(axis, truth, desired):
    """Angle between a compliant axis and the part of ``truth`` orthogonal to ``desired``, sign ignored."""
    t = truth - (truth @ desired) * desired
    e = angle_between_deg(axis, t)
    return min(e, 180 - e)


def test_angle_between():
    assert angle_between_deg((1, 0, 0), (0, 2, 0)) == pytest.approx(90)
    assert angle_between_deg((1, 0, 0), (1, 0, 0)) == 0
    assert angle_between_deg((0, 0, 1), (0, 0, -3)) == pytest.approx(180)


def test_valley_side_one_axis_along_groove():
    sc = scenario("valley-side")
    learned = learn_motion_model([d.trajectory for d in sc.demonstrations(2, 0)])
    m = learned.model
    assert m.n_compliant == 1
    assert tangent_error_deg(m.compliant_axes[0], sc.true_axes[0], m.desired_direction) < 15
    # the model-1 line through the residuals points along the groove
    assert learned.compliance.u_angle is not None


def test_valley_side_misaligned_selects_two_axes():
    sc = scenario("valley-side", misaligned=True)
    learned = learn_motion_model([d.trajectory for d in sc.demonstrations(2, 0)])
    assert learned.model.n_compliant == 2


def test_funnel_perpendicular_pair_two_axes():
    sc = scenario("funnel")
    learned = learn_motion_model([d.trajectory for d in sc.demonstrations(2, 0)])
    assert learned.model.n_compliant == 2
    assert angle_between_deg(learned.model.desired_direction, sc.true_direction) < 20


def test_single_free_demo_no_axes():
    sc = scenario("free")
    learned = learn_motion_model([sc.demonstrate(0, 0).trajectory])
    assert learned.model.n_compliant == 0
    assert angle_between_deg(learned.model.desired_direction, (0, 0, -1)) < 20


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_scenario_config_round_trip(name, tmp_path):
    sc = scenario(name)
    cfg = scenario_config(sc)
    path = tmp_path / "env.json"
    path.write_text(json.dumps(cfg))
    back = load_scenario(path)
    assert scenario_config(back) == cfg
    a, b = sc.demonstrate(0, 3), back.demonstrate(0, 3)
    assert np.array_equal(a.trajectory.positions, b.trajectory.positions)


def test_scenario_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        scenario_from_config({"type": "free", "preset": "nowhere"})
    with pytest.raises(ConfigError):
        scenario_from_config({"type": "free", "demonstrations": [{"approach": [0, 0, -1]}]})
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_scenario(bad)


def test_resample_pairs_take_one_per_group():
    sc = scenario("funnel")
    subs = resample_pairs(sc, 30, 50, np.random.default_rng(1))
    for s in subs:
        assert sorted(sc.group_of(i) for i in s) == [0, 1]
    free = resample_pairs(scenario("free"), 30, 50, np.random.default_rng(1))
    assert all(len(set(s)) == 2 for s in free)


def test_dof_study_small():
    sc = scenario("valley")
    res = dof_study(sc, n_demos=6, n_subsets=10, seed=2)
    assert res["bic"].shape == (10, 3)
    assert np.array_equal(res["chosen"], np.argmin(res["bic"], axis=1))
    assert res["counts"].sum() == 10
