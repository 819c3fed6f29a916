"""Multi-seed runs of the bundled scenarios.

Every scenario is planned with seeds 0..19. The runs are shared by all
tests of the module.
"""

import numpy as np
import pytest

from CRSP.data.scenario import bundled_scenarios, load_scenario
from CRSP.models.physics.flight import find_plane_crossing
from CRSP.models.planner.strike import plan_strike

SEEDS = range(20)

pytestmark = pytest.mark.slow


def plan(scenario, seed):
    return plan_strike(
        scenario.incoming,
        scenario.cost_spec,
        ws=scenario.workspace,
        table=scenario.table,
        params=scenario.physics,
        pso_config=scenario.pso._replace(seed=seed),
    )


def plan_all(scenario):
    return [plan(scenario, seed) for seed in SEEDS]


@pytest.fixture(scope="module")
def runs():
    out = {}
    for name in bundled_scenarios():
        scenario = load_scenario(name)
        out[name] = (scenario, plan_all(scenario))
    return out


def successes(scenario, results):
    return [
        r
        for r in results
        if r.feasible and r.cost_breakdown["distance"] <= scenario.tolerance
    ]


@pytest.mark.parametrize("name", ["case1", "case2", "case3"])
def test_reaches_target(runs, name):
    scenario, results = runs[name]
    hits = successes(scenario, results)
    assert len(hits) >= 0.9 * len(results)


def test_case1_lands_fast(runs):
    scenario, results = runs["case1"]
    for r in successes(scenario, results):
        assert r.landing_state.vel.norm() > 4.0


def test_case2_leaves_with_spin(runs):
    scenario, results = runs["case2"]
    for r in successes(scenario, results):
        assert np.hypot(r.post_impact.spin.x, r.post_impact.spin.y) > 5.0


def test_target_on_net_is_moved_over_it(runs):
    _, results = runs["table1_row4"]
    for r in results:
        assert r.feasible
        assert r.landing[1] > 0
        assert np.hypot(*r.landing) <= 0.25


def test_spin_x_bonus_raises_spin(runs):
    scenario, with_term = runs["table1_row2"]
    without = plan_all(scenario._replace(cost_spec=scenario.cost_spec._replace(terms=())))
    spin_with = np.median([abs(r.post_impact.spin.x) for r in with_term if r.feasible])
    spin_without = np.median([abs(r.post_impact.spin.x) for r in without if r.feasible])
    assert spin_with >= 2 * spin_without


def test_max_height_penalty_lowers_flight(runs):
    scenario, with_term = runs["table1_row3"]
    without = plan_all(scenario._replace(cost_spec=scenario.cost_spec._replace(terms=())))
    height_with = np.median([r.max_height for r in with_term if r.feasible])
    height_without = np.median([r.max_height for r in without if r.feasible])
    assert height_with <= 0.5 * height_without
    assert height_with <= 0.25


def test_no_feasible_plan_touches_the_net(runs):
    for scenario, results in runs.values():
        for r in results:
            if not r.feasible:
                continue
            net = find_plane_crossing(
                r.post_impact, 1, 0.0, +1, params=scenario.physics
            )
            assert net is not None
            assert net[1].pos.z > scenario.table.net_height


def test_serial_and_threaded_plans_agree(runs):
    scenario, results = runs["case2"]
    threaded = plan_strike(
        scenario.incoming,
        scenario.cost_spec,
        ws=scenario.workspace,
        table=scenario.table,
        params=scenario.physics,
        pso_config=scenario.pso._replace(seed=0, n_jobs=2),
    )
    assert threaded.landing == results[0].landing
    np.testing.assert_array_equal(threaded.pso_history, results[0].pso_history)
