"""Bounded particle swarm optimizer with constant inertia weight.

    V_i = w V_{i-1} + c1 r1 (P_best - p_{i-1}) + c2 r2 (G_best - p_{i-1})
    p_i = p_{i-1} + V_i

Constraints are merged into the cost: an infeasible point costs
math.inf. Positions and velocities are never clamped; bounds only shape
the initial swarm.

Every particle owns a random substream spawned from
numpy.random.SeedSequence(seed). Its draws, in order, are the initial
position (one uniform per dimension), then per iteration r1 before r2
(one scalar each, or one per dimension when `per_dimension` is set).
Cost evaluation order does not touch the streams, so parallel evaluation
(`n_jobs` != 1) gives bit-identical results.
"""

# License: MIT

import copy
import math
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from CRSP.exceptions import InfeasibleError, ValidationError


class PsoConfig(NamedTuple):
    """Swarm settings, defaults are the ones used for strike planning."""

    swarm_size: int = 10
    iterations: int = 20
    c1: float = 1.5
    c2: float = 1.5
    w: float = 0.6
    bounds: Optional[Tuple[Tuple[float, float], ...]] = None
    seed: int = 0
    per_dimension: bool = False
    n_jobs: int = 1

    def validate(self, prefix="pso"):
        if self.swarm_size < 1:
            raise ValidationError(
                f"{prefix}.swarm_size", "swarm_size must be >= 1"
            )
        if self.iterations < 1:
            raise ValidationError(
                f"{prefix}.iterations", "iterations must be >= 1"
            )
        if self.c1 < 0 or self.c2 < 0:
            raise ValidationError(f"{prefix}.c1", "c1 and c2 must be >= 0")
        if self.bounds is not None:
            if len(self.bounds) == 0:
                raise ValidationError(
                    f"{prefix}.bounds", "bounds must have at least one dimension"
                )
            for i, (lo, hi) in enumerate(self.bounds):
                if not lo < hi:
                    raise ValidationError(
                        f"{prefix}.bounds[{i}]", "bounds must have lo < hi"
                    )
        return self


class Particle(NamedTuple):
    pos: np.ndarray
    vel: np.ndarray
    p_best_pos: np.ndarray
    p_best_cost: float


class SwarmState(NamedTuple):
    """Swarm snapshot. Row i of every array belongs to particle i."""

    pos: np.ndarray
    vel: np.ndarray
    p_best_pos: np.ndarray
    p_best_cost: np.ndarray
    g_best_pos: np.ndarray
    g_best_cost: float
    iteration: int
    rngs: Tuple[np.random.Generator, ...]
    evaluations: int

    @property
    def particles(self) -> List[Particle]:
        return [
            Particle(
                pos=self.pos[i],
                vel=self.vel[i],
                p_best_pos=self.p_best_pos[i],
                p_best_cost=float(self.p_best_cost[i]),
            )
            for i in range(self.pos.shape[0])
        ]


class OptimizeResult(NamedTuple):
    best_pos: np.ndarray
    best_cost: float
    history: np.ndarray
    evaluations: int


def _as_cost(value):
    value = float(value)
    if math.isnan(value):
        return math.inf
    return value


def _evaluate(cost, positions, n_jobs):
    if n_jobs == 1:
        values = [cost(p) for p in positions]
    else:
        values = Parallel(n_jobs=n_jobs, prefer="threads")(
            delayed(cost)(p) for p in positions
        )
    return np.array([_as_cost(v) for v in values], dtype=np.float64)


def init_swarm(cost, config):
    """Place the swarm uniformly inside the bounds, at rest.

    Args:
        cost: callable, ndarray shape=(n,) -> float (math.inf if infeasible)
        config: PsoConfig with bounds set
    Returns:
        SwarmState at iteration 0
    """
    if config.bounds is None or len(config.bounds) == 0:
        raise ValidationError("pso.bounds", "bounds must have at least one dimension")
    config.validate()

    bounds = np.asarray(config.bounds, dtype=np.float64)
    lo, hi = bounds[:, 0], bounds[:, 1]
    n_dim = bounds.shape[0]

    seeds = np.random.SeedSequence(config.seed).spawn(config.swarm_size)
    rngs = tuple(np.random.default_rng(s) for s in seeds)

    pos = np.empty((config.swarm_size, n_dim))
    for i, rng in enumerate(rngs):
        pos[i] = lo + (hi - lo) * rng.random(n_dim)
    vel = np.zeros_like(pos)

    costs = _evaluate(cost, pos, config.n_jobs)
    best = int(np.argmin(costs))
    return SwarmState(
        pos=pos,
        vel=vel,
        p_best_pos=pos.copy(),
        p_best_cost=costs,
        g_best_pos=pos[best].copy(),
        g_best_cost=float(costs[best]),
        iteration=0,
        rngs=rngs,
        evaluations=config.swarm_size,
    )


def step(state, cost, config):
    """One synchronous swarm update; returns a new SwarmState."""
    rngs = copy.deepcopy(state.rngs)
    n_particles, n_dim = state.pos.shape
    draw = n_dim if config.per_dimension else None

    vel = np.empty_like(state.vel)
    for i, rng in enumerate(rngs):
        r1 = rng.random(draw)
        r2 = rng.random(draw)
        vel[i] = (
            config.w * state.vel[i]
            + config.c1 * r1 * (state.p_best_pos[i] - state.pos[i])
            + config.c2 * r2 * (state.g_best_pos - state.pos[i])
        )
    pos = state.pos + vel

    costs = _evaluate(cost, pos, config.n_jobs)
    improved = costs < state.p_best_cost
    p_best_pos = state.p_best_pos.copy()
    p_best_pos[improved] = pos[improved]
    p_best_cost = np.where(improved, costs, state.p_best_cost)

    g_best_pos = state.g_best_pos
    g_best_cost = state.g_best_cost
    best = int(np.argmin(p_best_cost))
    if p_best_cost[best] < g_best_cost:
        g_best_pos = p_best_pos[best].copy()
        g_best_cost = float(p_best_cost[best])

    return SwarmState(
        pos=pos,
        vel=vel,
        p_best_pos=p_best_pos,
        p_best_cost=p_best_cost,
        g_best_pos=g_best_pos,
        g_best_cost=g_best_cost,
        iteration=state.iteration + 1,
        rngs=rngs,
        evaluations=state.evaluations + n_particles,
    )


def optimize(cost, config, verbose=False):
    """Run init_swarm and exactly `config.iterations` steps.

    Returns:
        OptimizeResult, history holds g_best_cost after the initial swarm
        and after every step (iterations + 1 entries)
    Raises:
        InfeasibleError if no finite cost was ever found
    """
    state = init_swarm(cost, config)
    history = [state.g_best_cost]
    for _ in range(config.iterations):
        state = step(state, cost, config)
        history.append(state.g_best_cost)
        if verbose:
            print(f"iteration {state.iteration}: g_best_cost={state.g_best_cost}")

    if math.isinf(state.g_best_cost):
        raise InfeasibleError(
            f"no feasible point after {state.evaluations} evaluations",
            history=np.array(history),
        )
    return OptimizeResult(
        best_pos=state.g_best_pos.copy(),
        best_cost=state.g_best_cost,
        history=np.array(history),
        evaluations=state.evaluations,
    )
