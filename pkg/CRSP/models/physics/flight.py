"""Aerodynamic flight model of the ball.

Linear mode is the LTI system

    d/dt [v; x] = A [v; x] + B,

    A = [[-K_v*I + k_m*[w]x, 0],
         [I,                 0]],   B = (0, 0, -g, 0, 0, 0),

solved in closed form through the matrix exponential of the
affine-augmented 7-state system. Quadratic mode replaces -K_v*v with
-k_d*|v|*v and is integrated with classical RK4. Spin is constant over a
flight segment.
"""

# License: MIT

import math
from typing import NamedTuple

import numpy as np
import pandas as pd

from CRSP.data.data_class import BallState, PhysicsParams, Vec3
from CRSP.exceptions import DivergenceError
from CRSP.models.physics.physics_utils import (
    augment,
    first_crossing,
    hermite_root,
    power_grid,
    rk4_step,
    skew,
    transition,
)

DT = 1e-3  # grid step of every trajectory query, s
T_MAX = 3.0  # default horizon of trajectory queries, s
ROOT_XTOL = 1e-9  # bisection tolerance as a fraction of the grid step

TRAJECTORY_COLUMNS = ["t", "x", "y", "z", "vx", "vy", "vz", "wx", "wy", "wz"]


class SystemMatrix(NamedTuple):
    A: np.ndarray
    B: np.ndarray


def build_system(spin, params):
    """Build A and B of the linear-drag flight model for a given spin.

    Args:
        spin: ball spin, rad/s, Vec3 or length-3 sequence
        params: PhysicsParams
    Returns:
        SystemMatrix, A shape=(6, 6), B shape=(6,)
    """
    spin = np.asarray(spin, dtype=np.float64)
    if spin.shape != (3,) or not np.all(np.isfinite(spin)):
        raise ValueError(f"spin must be three finite numbers, got {spin}")

    a_mat = np.zeros((6, 6))
    a_mat[:3, :3] = -params.K_v * np.eye(3) + params.k_m * skew(spin)
    a_mat[3:, :3] = np.eye(3)
    b_vec = np.array([0.0, 0.0, -params.g, 0.0, 0.0, 0.0])
    return SystemMatrix(A=a_mat, B=b_vec)


def _accel(vel, spin, params):
    """dv/dt for velocity `vel` (ndarray) and spin `spin` (ndarray)."""
    if params.drag_mode == "quadratic":
        drag = -params.k_d * np.sqrt(vel @ vel) * vel
    else:
        drag = -params.K_v * vel
    magnus = params.k_m * np.cross(spin, vel)
    return drag + magnus + np.array([0.0, 0.0, -params.g])


def acceleration(state, params):
    """Return dv/dt of `state` as a Vec3."""
    vel = state.vel.to_array()
    spin = state.spin.to_array()
    return Vec3.from_array(_accel(vel, spin, params))


def _quadratic_deriv(spin, params):
    spin = np.asarray(spin, dtype=np.float64)

    def deriv(y):
        return np.concatenate((_accel(y[:3], spin, params), y[:3]))

    return deriv


def _check_finite(values, t):
    if not np.all(np.isfinite(values)):
        raise DivergenceError(f"non-finite ball state at t={t}")


def propagate(initial, t, params):
    """Advance `initial` by `t` seconds.

    Args:
        initial: BallState
        t: elapsed time, s, t >= 0
        params: PhysicsParams
    Returns:
        BallState at initial.t + t, spin unchanged
    """
    if not t >= 0:
        raise ValueError(f"propagation time must be >= 0, got {t}")
    if t == 0:
        return initial

    z0 = initial.to_vector()
    if params.drag_mode == "quadratic":
        n_steps = max(1, math.ceil(t / DT - 1e-9))
        h = t / n_steps
        deriv = _quadratic_deriv(initial.spin, params)
        z = z0
        for _ in range(n_steps):
            z = rk4_step(deriv, z, h)
    else:
        system = build_system(initial.spin, params)
        phi = transition(augment(system.A, system.B), t)
        z = phi[:6, :6] @ z0 + phi[:6, 6]

    _check_finite(z, initial.t + t)
    return BallState.from_vector(initial.t + t, z, initial.spin)


def state_grid(initial, t_max, params, step=DT):
    """States on the fixed grid 0, step, ..., <= t_max after `initial`.

    Returns:
        times: elapsed times, ndarray shape=(n+1,)
        states: stacked [v; x], ndarray shape=(n+1, 6)
    """
    n_steps = int(math.floor(t_max / step + 1e-9))
    times = np.arange(n_steps + 1) * step
    z0 = initial.to_vector()

    if params.drag_mode == "quadratic":
        deriv = _quadratic_deriv(initial.spin, params)
        states = np.empty((n_steps + 1, 6))
        states[0] = z0
        for k in range(n_steps):
            states[k + 1] = rk4_step(deriv, states[k], step)
    else:
        system = build_system(initial.spin, params)
        phi = transition(augment(system.A, system.B), step)
        states = power_grid(phi, np.append(z0, 1.0), n_steps)[:, :6]

    _check_finite(states, initial.t + t_max)
    return times, states


def _refine(initial, times, states, k, column, level, params):
    """Locate states[:, column] == level inside grid bracket [k, k+1].

    The column is interpolated with a cubic Hermite through both grid
    states and their derivatives, bisected, and the state at the root is
    propagated once from grid row k.
    """
    start = BallState.from_vector(initial.t + times[k], states[k], initial.spin)
    h = times[k + 1] - times[k]
    if column >= 3:
        # d(pos)/dt is the velocity column
        d0, d1 = states[k, column - 3], states[k + 1, column - 3]
    else:
        spin = np.asarray(initial.spin, dtype=np.float64)
        d0 = _accel(states[k, :3], spin, params)[column]
        d1 = _accel(states[k + 1, :3], spin, params)[column]

    dt = hermite_root(
        states[k, column] - level,
        states[k + 1, column] - level,
        d0,
        d1,
        h,
        xtol=ROOT_XTOL,
    )
    return times[k] + dt, propagate(start, dt, params)


def find_plane_crossing(
    initial, axis, plane, direction, t_max=T_MAX, params=None, grid=None
):
    """First crossing of pos[axis] = plane in the given direction.

    Args:
        initial: BallState
        axis: 0, 1 or 2 for x, y, z
        plane: plane coordinate, m
        direction: -1 for crossing from above, +1 from below
        t_max: horizon, s
        params: PhysicsParams
        grid: optional (times, states) from state_grid
    Returns:
        (elapsed time, BallState) or None
    """
    if params is None:
        params = PhysicsParams()
    times, states = grid if grid is not None else state_grid(initial, t_max, params)
    k = first_crossing(states[:, 3 + axis], plane, direction)
    if k is None:
        return None
    return _refine(initial, times, states, k, 3 + axis, plane, params)


def find_descending_crossing(
    initial, plane_z, t_max=T_MAX, params=None, grid=None
):
    """Earliest time the ball passes z = plane_z moving downwards.

    Returns:
        (t_hit, BallState) with t_hit elapsed from initial.t, or None
    """
    return find_plane_crossing(
        initial, 2, plane_z, -1, t_max=t_max, params=params, grid=grid
    )


def crosses_net_too_low(initial, t_max, params, table, grid=None):
    """True unless the ball passes y = 0 strictly above the net before it
    comes down on z = 0."""
    if grid is None:
        grid = state_grid(initial, t_max, params)
    net = find_plane_crossing(initial, 1, 0.0, +1, params=params, grid=grid)
    if net is None:
        return True
    landing = find_descending_crossing(initial, 0.0, params=params, grid=grid)
    if landing is not None and landing[0] < net[0]:
        return True
    return net[1].pos.z <= table.net_height


def max_height(initial, t_max=T_MAX, params=None, grid=None):
    """Highest z reached before the first descent through z = 0."""
    if params is None:
        params = PhysicsParams()
    times, states = grid if grid is not None else state_grid(initial, t_max, params)
    end = len(times)
    k_land = first_crossing(states[:, 5], 0.0, -1)
    if k_land is not None:
        end = k_land + 1

    best = float(np.max(states[:end, 5]))
    k_apex = first_crossing(states[:end, 2], 0.0, -1)
    if k_apex is not None and k_apex + 1 < end:
        _, apex = _refine(initial, times, states, k_apex, 2, 0.0, params)
        best = max(best, apex.pos.z)
    return best


def sample_trajectory(initial, duration, params, step=DT):
    """Trajectory samples at a constant cadence as a DataFrame.

    Columns are t, x, y, z, vx, vy, vz, wx, wy, wz with absolute time.
    """
    times, states = state_grid(initial, duration, params, step=step)
    n = len(times)
    data = np.column_stack(
        (
            initial.t + times,
            states[:, 3:6],
            states[:, 0:3],
            np.tile(np.asarray(initial.spin, dtype=np.float64), (n, 1)),
        )
    )
    return pd.DataFrame(data, columns=TRAJECTORY_COLUMNS)
