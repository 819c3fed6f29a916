"""Local refinement of the swarm's best strike with SLSQP.

The swarm only has to find the right basin. Starting from its best
candidate, the ball is first aimed at the target (least squared landing
error), then the secondary terms are lowered while the landing is held on
the target. Net clearance and workspace depth are inequality constraints,
racket limits and the strike window are box bounds. Both stages work in
unit-scaled coordinates of the search box.

Every stage result is a proposal only; plan_strike verifies it with
simulate_strike and keeps it when its cost beats the swarm's.
"""

# License: MIT

from typing import List, NamedTuple, Tuple

import numpy as np
from scipy.optimize import minimize

from CRSP.data.data_class import BallState, StrikeCandidate
from CRSP.exceptions import DivergenceError, NoImpactError
from CRSP.models.physics.flight import (
    T_MAX,
    find_descending_crossing,
    find_plane_crossing,
    propagate,
    state_grid,
)
from CRSP.models.physics.impact import racket_rebound
from CRSP.models.planner.objectives import secondary_breakdown

NET_MARGIN = 1e-3  # clearance kept above the net, m
WALL_MARGIN = 1e-6  # depth kept inside the workspace, m
FAIL_VALUE = 1e3  # objective and constraint value where no flight exists
AIM_TOL = 1e-2  # landing error below which the secondary terms are refined, m
FD_STEP = 1e-6  # finite difference step in unit-scaled coordinates
MAX_ITER = 30


class AimSummary(NamedTuple):
    """One strike flown with net, workspace and racket checks relaxed."""

    impact_state: BallState
    post_impact: BallState
    landing_state: BallState
    grid: Tuple[np.ndarray, np.ndarray]
    clearance: float
    depth: float


class StrikeAim:
    """Memoized strike flights.

    clearance is the height over the net where the ball crosses y = 0, or
    the landing y minus the net height when it comes down first; both
    agree at a landing on y = 0. depth is the distance of the strike point
    to the nearest workspace wall, negative outside.
    """

    def __init__(self, incoming, spec, ws, table, params, t_max=T_MAX):
        self.incoming = incoming
        self.spec = spec
        self.ws = ws
        self.table = table
        self.params = params
        self.t_max = t_max
        self.evaluations = 0
        self._cache = {}

    def __call__(self, p):
        p = np.asarray(p, dtype=np.float64)
        key = p.tobytes()
        if key not in self._cache:
            self.evaluations += 1
            self._cache[key] = self._fly(p)
        return self._cache[key]

    def _fly(self, p):
        if not np.all(np.isfinite(p)) or not p[0] > self.incoming.t:
            return None
        candidate = StrikeCandidate.from_array(p)
        try:
            ball = propagate(self.incoming, candidate.T - self.incoming.t, self.params)
            post = racket_rebound(ball, candidate.racket, self.params).post
            grid = state_grid(post, self.t_max, self.params)
        except (DivergenceError, NoImpactError):
            return None

        hit = find_descending_crossing(post, 0.0, self.t_max, self.params, grid=grid)
        if hit is None:
            return None
        net = find_plane_crossing(post, 1, 0.0, +1, params=self.params, grid=grid)
        if net is not None and net[0] <= hit[0]:
            clearance = net[1].pos.z - self.table.net_height
        else:
            clearance = hit[1].pos.y - self.table.net_height

        ranges = (self.ws.x_range, self.ws.y_range, self.ws.z_range)
        depth = min(
            min(ball.pos[axis] - lo, hi - ball.pos[axis])
            for axis, (lo, hi) in enumerate(ranges)
        )
        return AimSummary(ball, post, hit[1], grid, clearance, depth)

    def miss(self, p):
        """Landing minus target, (dx, dy)."""
        aim = self(p)
        if aim is None:
            return np.array([FAIL_VALUE, FAIL_VALUE])
        landing = aim.landing_state.pos
        return np.array(
            [landing.x - self.spec.target[0], landing.y - self.spec.target[1]]
        )

    def secondary(self, p):
        aim = self(p)
        if aim is None:
            return FAIL_VALUE
        breakdown = secondary_breakdown(
            self.spec,
            aim.landing_state,
            aim.post_impact,
            self.params,
            self.t_max,
            grid=aim.grid,
        )
        return sum(breakdown.values())

    def margins(self, p):
        """Net clearance and workspace depth, both >= 0 when satisfied."""
        aim = self(p)
        if aim is None:
            return np.array([-FAIL_VALUE, -FAIL_VALUE])
        return np.array([aim.clearance - NET_MARGIN, aim.depth - WALL_MARGIN])


def _unit_box(bounds, x0, t0):
    # the swarm does not clip positions, so the box is grown to hold x0
    bounds = np.asarray(bounds, dtype=np.float64)
    lo = np.minimum(bounds[:, 0], x0)
    hi = np.maximum(bounds[:, 1], x0)
    # T must stay strictly after the bounce
    lo[0] = max(lo[0], t0 + 1e-6)
    return lo, hi


def refine_strike(
    x0,
    incoming,
    spec,
    ws,
    table,
    params,
    bounds,
    t_max=T_MAX,
    max_iter=MAX_ITER,
    verbose=False,
):
    """Aim the swarm's best strike at the target, then polish the terms.

    Args:
        x0: swarm best (T, v_xr, v_yr, v_zr), ndarray shape=(4,)
        incoming: BallState at t=0
        spec: CostSpec
        ws: Workspace
        table: TableGeometry
        params: PhysicsParams
        bounds: search box, 4 (lo, hi) pairs
        t_max: horizon of the post-impact flight, s
        max_iter: SLSQP iterations per stage
        verbose: print stage results, bool
    Returns:
        (proposals, evaluations): proposals is a list of ndarray in stage
        order, evaluations the number of distinct flights simulated
    """
    x0 = np.asarray(x0, dtype=np.float64)
    aim = StrikeAim(incoming, spec, ws, table, params, t_max)
    lo, hi = _unit_box(bounds, x0, incoming.t)
    if np.any(hi <= lo):
        return [], 0
    span = hi - lo

    def to_p(u):
        return lo + span * np.clip(u, 0.0, 1.0)

    u0 = np.clip((x0 - lo) / span, 0.0, 1.0)
    margins = {"type": "ineq", "fun": lambda u: aim.margins(to_p(u))}
    options = {"maxiter": max_iter, "eps": FD_STEP, "ftol": 1e-14}
    unit_bounds = [(0.0, 1.0)] * len(u0)

    proposals: List[np.ndarray] = []
    aimed = minimize(
        lambda u: float(np.sum(aim.miss(to_p(u)) ** 2)),
        u0,
        method="SLSQP",
        bounds=unit_bounds,
        constraints=[margins],
        options=options,
    )
    u_aim = np.clip(aimed.x, 0.0, 1.0)
    proposals.append(to_p(u_aim))
    miss = float(np.hypot(*aim.miss(to_p(u_aim))))
    if verbose:
        print(f"Aim stage: landing error {miss:.2e} m, {aimed.message}")

    if spec.terms and miss <= AIM_TOL:
        on_target = {"type": "eq", "fun": lambda u: aim.miss(to_p(u))}
        polished = minimize(
            lambda u: aim.secondary(to_p(u)),
            u_aim,
            method="SLSQP",
            bounds=unit_bounds,
            constraints=[on_target, margins],
            options=options,
        )
        proposals.append(to_p(polished.x))
        if verbose:
            print(
                f"Term stage: secondary {aim.secondary(to_p(polished.x)):.4f}, "
                f"{polished.message}"
            )

    return proposals, aim.evaluations

