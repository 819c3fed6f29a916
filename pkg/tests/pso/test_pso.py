"""Tests of the particle swarm optimizer."""

import math

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from CRSP.exceptions import InfeasibleError, ValidationError
from CRSP.models.optim.benchmarks import rastrigin, sphere
from CRSP.models.optim.pso import PsoConfig, init_swarm, optimize, step

BOX2 = ((-5.0, 5.0), (-5.0, 5.0))


def test_init_is_reproducible():
    config = PsoConfig(bounds=BOX2, seed=3)
    a = init_swarm(sphere, config)
    b = init_swarm(sphere, config)
    assert_array_equal(a.pos, b.pos)
    assert_array_equal(a.p_best_cost, b.p_best_cost)


def test_init_single_particle_inside_bounds():
    state = init_swarm(sphere, PsoConfig(swarm_size=1, bounds=((0.0, 1.0),)))
    assert state.pos.shape == (1, 1)
    assert 0.0 <= state.pos[0, 0] <= 1.0
    assert_array_equal(state.vel, [[0.0]])


def test_init_global_best_is_swarm_minimum():
    config = PsoConfig(bounds=((-1, 1),) * 4, seed=11)
    state = init_swarm(sphere, config)
    costs = [sphere(p) for p in state.pos]
    assert state.g_best_cost == min(costs)
    assert_array_equal(state.g_best_pos, state.pos[int(np.argmin(costs))])
    assert state.evaluations == 10


@pytest.mark.parametrize("bounds", [None, ()])
def test_init_requires_bounds(bounds):
    with pytest.raises(ValidationError):
        init_swarm(sphere, PsoConfig(bounds=bounds))


def test_step_at_fixed_point():
    config = PsoConfig(swarm_size=1, bounds=BOX2, seed=5)
    state = init_swarm(sphere, config)
    after = step(state, sphere, config)
    assert_array_equal(after.pos, state.pos)
    assert_array_equal(after.vel, state.vel)


def test_step_pure_inertia():
    config = PsoConfig(swarm_size=1, c1=0.0, c2=0.0, w=1.0, bounds=BOX2)
    state = init_swarm(sphere, config)
    v0 = np.array([[0.5, -0.25]])
    state = state._replace(vel=v0)
    once = step(state, sphere, config)
    twice = step(once, sphere, config)
    assert_array_equal(once.pos, state.pos + v0)
    assert_array_equal(twice.pos, state.pos + 2 * v0)


def test_step_does_not_consume_callers_streams():
    config = PsoConfig(bounds=BOX2, seed=2)
    state = init_swarm(sphere, config)
    a = step(state, sphere, config)
    b = step(state, sphere, config)
    assert_array_equal(a.pos, b.pos)


def test_personal_best_never_worse_than_position():
    config = PsoConfig(bounds=BOX2, seed=4)
    state = init_swarm(rastrigin, config)
    for _ in range(10):
        previous = state
        state = step(state, rastrigin, config)
        assert np.all(state.p_best_cost <= previous.p_best_cost)
        for i, p in enumerate(state.pos):
            assert state.p_best_cost[i] <= rastrigin(p)
        assert state.g_best_cost == np.min(state.p_best_cost)


def test_sphere_converges_for_most_seeds():
    solved = 0
    for seed in range(20):
        result = optimize(sphere, PsoConfig(bounds=BOX2, seed=seed))
        assert np.all(np.diff(result.history) <= 0)
        solved += result.best_cost < 1e-2
    assert solved >= 18


def test_constant_cost():
    config = PsoConfig(bounds=BOX2, iterations=5)
    result = optimize(lambda p: 0.0, config)
    assert result.best_cost == 0.0
    assert_array_equal(result.history, np.zeros(6))
    assert result.evaluations == 60


def test_all_infeasible_raises():
    config = PsoConfig(bounds=BOX2, iterations=3)
    with pytest.raises(InfeasibleError) as err:
        optimize(lambda p: math.inf, config)
    assert len(err.value.history) == 4


def test_nan_cost_counts_as_infeasible():
    def cost(p):
        return math.nan if p[0] < 0 else sphere(p)

    result = optimize(cost, PsoConfig(bounds=BOX2, seed=1))
    assert math.isfinite(result.best_cost)
    assert result.best_pos[0] >= 0


def test_optimize_is_reproducible():
    config = PsoConfig(bounds=BOX2, seed=9, per_dimension=True)
    a = optimize(rastrigin, config)
    b = optimize(rastrigin, config)
    assert_array_equal(a.best_pos, b.best_pos)
    assert_array_equal(a.history, b.history)


def test_parallel_evaluation_matches_serial():
    config = PsoConfig(bounds=((-5.12, 5.12),) * 3, seed=13)
    serial = optimize(rastrigin, config)
    threaded = optimize(rastrigin, config._replace(n_jobs=2))
    assert_array_equal(serial.best_pos, threaded.best_pos)
    assert_array_equal(serial.history, threaded.history)


@pytest.mark.parametrize(
    "field, kwargs",
    [
        ("swarm_size", {"swarm_size": 0}),
        ("iterations", {"iterations": 0}),
        ("bounds[0]", {"bounds": ((1.0, 1.0),)}),
    ],
)
def test_config_validation(field, kwargs):
    with pytest.raises(ValidationError) as err:
        PsoConfig(**kwargs).validate()
    assert err.value.field == f"pso.{field}"
