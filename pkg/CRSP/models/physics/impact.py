"""Racket rebound model.

The racket face is always normal to the y-axis. Restitution acts on the
relative normal (y) velocity; kinetic friction, with an impulse
proportional to the normal one, acts against the slip of the contact
point, and the tangential impulse couples into spin. Ball mass and
contact duration cancel out of every relation.
"""

# License: MIT

import math
from typing import NamedTuple

from CRSP.data.data_class import BallState, Vec3
from CRSP.exceptions import NoImpactError

SPIN_COUPLING = 2.0 / 3.0  # spin change per unit tangential impulse, times r
SLIP_EPS = 1e-9  # m/s, below this slip speed friction is zero


class ImpactOutcome(NamedTuple):
    post: BallState
    delta_v: Vec3
    delta_w: Vec3
    slipped: bool


def normal_exchange(v_iyb, v_yr, e):
    """Restitution along the racket normal.

    Args:
        v_iyb: ball y velocity before impact, m/s
        v_yr: racket y velocity, m/s
        e: restitution coefficient
    Returns:
        (v_fyb, delta_v_yb)
    """
    v_iy = v_iyb - v_yr
    if not v_iy < 0:
        raise NoImpactError(
            f"ball is not approaching the racket (relative v_y = {v_iy})"
        )
    v_fy = -e * v_iy
    return v_fy + v_yr, v_fy - v_iy


def contact_slip(ball, racket, r):
    """Tangential velocity (x, z) of the contact point relative to the racket."""
    s_x = (ball.vel.x - racket.v_xr) + r * ball.spin.z
    s_z = (ball.vel.z - racket.v_zr) - r * ball.spin.x
    return s_x, s_z


def tangential_exchange(ball, racket, delta_v_yb, params):
    """Friction impulse in the racket plane.

    Returns:
        (delta_v_xb, delta_v_zb, slipped)
    """
    s_x, s_z = contact_slip(ball, racket, params.r)
    slip = math.hypot(s_x, s_z)
    if slip <= SLIP_EPS:
        return 0.0, 0.0, False

    magnitude = params.mu_k * delta_v_yb
    if params.cap_slip_reversal:
        # post-impact slip is s + (1 + SPIN_COUPLING) * delta_v
        magnitude = min(magnitude, slip / (1.0 + SPIN_COUPLING))
    return -magnitude * s_x / slip, -magnitude * s_z / slip, True


def spin_update(delta_v_xb, delta_v_zb, r):
    """Spin change produced by the tangential impulse."""
    k = SPIN_COUPLING / r
    return Vec3(-k * delta_v_zb, 0.0, k * delta_v_xb)


def racket_rebound(ball, racket, params):
    """Ball velocity and spin right after the racket strike.

    Args:
        ball: BallState at the impact instant
        racket: RacketVelocity
        params: PhysicsParams
    Returns:
        ImpactOutcome, position and time unchanged
    """
    v_fyb, dv_y = normal_exchange(ball.vel.y, racket.v_yr, params.e)
    dv_x, dv_z, slipped = tangential_exchange(ball, racket, dv_y, params)
    delta_w = spin_update(dv_x, dv_z, params.r)
    delta_v = Vec3(dv_x, dv_y, dv_z)

    post = ball._replace(
        vel=Vec3(ball.vel.x + dv_x, v_fyb, ball.vel.z + dv_z),
        spin=Vec3(*(w + dw for w, dw in zip(ball.spin, delta_w))),
    )
    return ImpactOutcome(
        post=post, delta_v=delta_v, delta_w=delta_w, slipped=slipped
    )
