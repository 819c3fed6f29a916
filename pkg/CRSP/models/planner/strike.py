"""Strike planning: choose (T, v_xr, v_yr, v_zr) with the particle swarm.

t = 0 is the ball's bounce on the robot's side. A candidate is scored
by flying the ball to T, striking it, and following the rebound flight to
the table. Unreachable strikes, racket speeds above the limits, strikes
that do not meet the ball, net collisions and flights that never land
all cost math.inf.
"""

# License: MIT

import math
from typing import Dict, NamedTuple, Optional, Tuple

import numpy as np

from CRSP.data.data_class import (
    BallState,
    CostSpec,
    PhysicsParams,
    StrikeCandidate,
    TableGeometry,
    Workspace,
)
from CRSP.exceptions import (
    DivergenceError,
    InfeasibleError,
    NoImpactError,
    NoWindowError,
)
from CRSP.models.optim.pso import PsoConfig, optimize
from CRSP.models.physics.flight import (
    DT,
    T_MAX,
    crosses_net_too_low,
    find_descending_crossing,
    max_height,
    propagate,
    state_grid,
)
from CRSP.models.physics.impact import racket_rebound
from CRSP.models.planner.objectives import secondary_breakdown
from CRSP.models.planner.refine import refine_strike

WINDOW_PAD = 0.1  # fraction of the workspace window added on each side


class StrikeOutcome(NamedTuple):
    """Result of simulating one strike; `reason` is None when feasible."""

    candidate: StrikeCandidate
    impact_state: Optional[BallState]
    post_impact: Optional[BallState]
    landing_state: Optional[BallState]
    reason: Optional[str]
    grid: Optional[Tuple[np.ndarray, np.ndarray]] = None


class PlanResult(NamedTuple):
    strike: Optional[StrikeCandidate]
    landing: Optional[Tuple[float, float]]
    landing_state: Optional[BallState]
    cost: float
    cost_breakdown: Dict[str, float]
    pso_history: np.ndarray
    feasible: bool
    impact_state: Optional[BallState] = None
    post_impact: Optional[BallState] = None
    max_height: Optional[float] = None
    evaluations: int = 0
    refined: bool = False
    refine_evaluations: int = 0


def simulate_strike(
    candidate, incoming, params, workspace, table, t_max=T_MAX
):
    """Fly, strike and fly again.

    Args:
        candidate: StrikeCandidate
        incoming: BallState right after the bounce on the robot's side
        params: PhysicsParams
        workspace: Workspace
        table: TableGeometry
        t_max: horizon of the post-impact flight, s
    Returns:
        StrikeOutcome
    """

    def fail(reason, impact_state=None, post_impact=None):
        return StrikeOutcome(candidate, impact_state, post_impact, None, reason)

    values = candidate.to_array()
    if not np.all(np.isfinite(values)) or not candidate.T > incoming.t:
        return fail("strike time")

    try:
        ball = propagate(incoming, candidate.T - incoming.t, params)
    except DivergenceError:
        return fail("divergence")
    if not workspace.contains(ball.pos):
        return fail("unreachable", ball)
    if not workspace.within_limits(candidate.racket):
        return fail("racket velocity", ball)

    try:
        post = racket_rebound(ball, candidate.racket, params).post
    except NoImpactError:
        return fail("no impact", ball)

    try:
        grid = state_grid(post, t_max, params)
    except DivergenceError:
        return fail("divergence", ball, post)
    if crosses_net_too_low(post, t_max, params, table, grid=grid):
        return fail("net", ball, post)
    hit = find_descending_crossing(post, 0.0, t_max, params, grid=grid)
    if hit is None:
        return fail("no landing", ball, post)

    return StrikeOutcome(candidate, ball, post, hit[1], None, grid)


def _score(outcome, spec, params, t_max):
    landing = outcome.landing_state
    breakdown = {
        "distance": math.hypot(
            landing.pos.x - spec.target[0], landing.pos.y - spec.target[1]
        )
    }
    breakdown.update(
        secondary_breakdown(
            spec, landing, outcome.post_impact, params, t_max, grid=outcome.grid
        )
    )
    return sum(breakdown.values()), breakdown


def evaluate_candidate(
    candidate, incoming, spec, ws, table, params, t_max=T_MAX
):
    """Cost of one strike candidate.

    Returns:
        (cost, breakdown): breakdown maps "distance" and each term kind
        to its value, None when the cost is infinite
    """
    outcome = simulate_strike(candidate, incoming, params, ws, table, t_max)
    if outcome.reason is not None:
        return math.inf, None
    return _score(outcome, spec, params, t_max)


class StrikeCost:
    """PSO cost function over p = (T, v_xr, v_yr, v_zr)."""

    def __init__(
        self,
        incoming,
        spec,
        workspace=None,
        table=None,
        params=None,
        t_max=T_MAX,
    ):
        self.incoming = incoming
        self.spec = spec
        self.table = table if table is not None else TableGeometry()
        self.workspace = (
            workspace
            if workspace is not None
            else Workspace.from_table(self.table)
        )
        self.params = params if params is not None else PhysicsParams()
        self.t_max = t_max

    def __call__(self, p):
        cost, _ = evaluate_candidate(
            StrikeCandidate.from_array(p),
            self.incoming,
            self.spec,
            self.workspace,
            self.table,
            self.params,
            self.t_max,
        )
        return cost


def default_bounds(incoming, ws, params, t_max=T_MAX):
    """Search box for (T, v_xr, v_yr, v_zr).

    T spans the first stretch of the incoming flight that lies inside the
    workspace (1 ms scan), widened by 10% of its length on each side;
    velocities span +-v_limit.
    """
    times, states = state_grid(incoming, t_max, params)
    pos = states[:, 3:6]
    inside = np.ones(len(times), dtype=bool)
    for axis, (lo, hi) in enumerate((ws.x_range, ws.y_range, ws.z_range)):
        inside &= (pos[:, axis] >= lo) & (pos[:, axis] <= hi)

    entered = np.nonzero(inside)[0]
    if entered.size == 0:
        raise NoWindowError(
            "the incoming trajectory never enters the workspace"
        )
    first = int(entered[0])
    left = np.nonzero(~inside[first:])[0]
    last = first + int(left[0]) - 1 if left.size else len(times) - 1

    t_lo = incoming.t + times[first]
    t_hi = incoming.t + times[last]
    pad = WINDOW_PAD * (t_hi - t_lo)
    lo = max(incoming.t, t_lo - pad)
    hi = max(t_hi + pad, lo + DT)
    vx, vy, vz = ws.v_limit
    return ((lo, hi), (-vx, vx), (-vy, vy), (-vz, vz))


def _infeasible(history, evaluations=0):
    return PlanResult(
        strike=None,
        landing=None,
        landing_state=None,
        cost=math.inf,
        cost_breakdown={},
        pso_history=np.asarray(history, dtype=np.float64),
        feasible=False,
        evaluations=evaluations,
    )


def plan_strike(
    incoming,
    spec,
    ws=None,
    table=None,
    params=None,
    pso_config=None,
    t_max=T_MAX,
    verbose=False,
    refine=True,
):
    """Search the strike that best meets `spec`, then verify it.

    The swarm best is handed to refine_strike, which proposes an aimed
    and a polished strike. Every candidate is simulated again from
    scratch, the cheapest feasible one wins (the swarm best on ties) and
    every reported quantity comes from that replay.

    Args:
        incoming: BallState at t=0, right after the bounce
        spec: CostSpec
        ws: Workspace, default Workspace.from_table(table)
        table: TableGeometry
        params: PhysicsParams
        pso_config: PsoConfig, bounds default to default_bounds()
        t_max: horizon of trajectory queries, s
        verbose: print optimizer progress, bool
        refine: run the SLSQP stages after the swarm, bool
    Returns:
        PlanResult; feasible=False when no candidate ever had finite cost
    """
    table = table if table is not None else TableGeometry()
    ws = ws if ws is not None else Workspace.from_table(table)
    params = params if params is not None else PhysicsParams()
    pso_config = pso_config if pso_config is not None else PsoConfig()

    if pso_config.bounds is None:
        try:
            bounds = default_bounds(incoming, ws, params, t_max)
        except NoWindowError as err:
            if verbose:
                print(f"No strike window: {err}")
            return _infeasible([])
        pso_config = pso_config._replace(bounds=bounds)
    if verbose:
        print("Search bounds:", pso_config.bounds)

    cost = StrikeCost(incoming, spec, ws, table, params, t_max)
    try:
        result = optimize(cost, pso_config, verbose=verbose)
    except InfeasibleError as err:
        if verbose:
            print(f"Infeasible: {err}")
        history = err.history if err.history is not None else []
        return _infeasible(
            history, pso_config.swarm_size * (pso_config.iterations + 1)
        )

    candidate = StrikeCandidate.from_array(result.best_pos)
    outcome = simulate_strike(candidate, incoming, params, ws, table, t_max)
    if outcome.reason is not None:
        # the replay must agree with the search
        raise RuntimeError(
            f"verification of the best strike failed: {outcome.reason}"
        )
    total, breakdown = _score(outcome, spec, params, t_max)

    refined = False
    refine_evaluations = 0
    if refine:
        proposals, refine_evaluations = refine_strike(
            result.best_pos,
            incoming,
            spec,
            ws,
            table,
            params,
            pso_config.bounds,
            t_max,
            verbose=verbose,
        )
        for p in proposals:
            trial = simulate_strike(
                StrikeCandidate.from_array(p), incoming, params, ws, table, t_max
            )
            if trial.reason is not None:
                continue
            trial_total, trial_breakdown = _score(trial, spec, params, t_max)
            if trial_total < total:
                candidate, outcome = trial.candidate, trial
                total, breakdown = trial_total, trial_breakdown
                refined = True

    landing = outcome.landing_state
    height = max_height(outcome.post_impact, t_max, params, grid=outcome.grid)
    if verbose:
        print(
            f"Strike {tuple(np.round(candidate.to_array(), 3))} lands at "
            f"({landing.pos.x:.3f}, {landing.pos.y:.3f}), cost {total:.4f}"
        )

    return PlanResult(
        strike=candidate,
        landing=(landing.pos.x, landing.pos.y),
        landing_state=landing,
        cost=total,
        cost_breakdown=breakdown,
        pso_history=result.history,
        feasible=True,
        impact_state=outcome.impact_state,
        post_impact=outcome.post_impact,
        max_height=height,
        evaluations=result.evaluations,
        refined=refined,
        refine_evaluations=refine_evaluations,
    )
