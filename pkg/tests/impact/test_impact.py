"""Tests of the racket rebound model."""

import math

import numpy as np
import pytest

from CRSP.data.data_class import BallState, PhysicsParams, RacketVelocity, Vec3
from CRSP.exceptions import NoImpactError
from CRSP.models.physics.impact import (
    SPIN_COUPLING,
    contact_slip,
    normal_exchange,
    racket_rebound,
    spin_update,
    tangential_exchange,
)

PARAMS = PhysicsParams()
STILL = RacketVelocity(0.0, 0.0, 0.0)


def ball(vel, spin=(0.0, 0.0, 0.0)):
    return BallState.create(pos=(0.1, -1.0, 0.3), vel=vel, spin=spin, t=0.2)


def test_normal_exchange_stationary_racket():
    v_fyb, dv_y = normal_exchange(-5.0, 0.0, 0.8)
    assert v_fyb == pytest.approx(4.0)
    assert dv_y == pytest.approx(9.0)


def test_normal_exchange_moving_racket():
    v_fyb, dv_y = normal_exchange(-5.0, 1.0, 0.8)
    assert v_fyb == pytest.approx(5.8)
    assert dv_y == pytest.approx(10.8)


def test_normal_exchange_elastic():
    v_fyb, _ = normal_exchange(-3.0, 0.0, 1.0)
    assert v_fyb == pytest.approx(3.0)


@pytest.mark.parametrize("v_iyb, v_yr", [(-2.0, -2.0), (1.0, 0.0), (-1.0, -3.0)])
def test_normal_exchange_requires_approach(v_iyb, v_yr):
    with pytest.raises(NoImpactError):
        normal_exchange(v_iyb, v_yr, 0.8)


def test_no_slip_no_friction():
    assert tangential_exchange(ball((0, -5, 0)), STILL, 9.0, PARAMS) == (
        0.0,
        0.0,
        False,
    )


def test_friction_against_sliding():
    dv_x, dv_z, slipped = tangential_exchange(ball((1, -5, 0)), STILL, 9.0, PARAMS)
    assert dv_x == pytest.approx(-1.8)
    assert dv_z == 0.0
    assert slipped


def test_friction_from_spin_alone():
    spinning = ball((0, -5, 0), spin=(0, 0, 10))
    assert contact_slip(spinning, STILL, PARAMS.r) == pytest.approx((0.2, 0.0))
    dv_x, dv_z, slipped = tangential_exchange(spinning, STILL, 9.0, PARAMS)
    assert dv_x < 0
    assert dv_z == 0.0
    assert slipped


def test_spin_update_examples():
    assert spin_update(0.0, -1.2, 0.02) == pytest.approx(Vec3(40.0, 0.0, 0.0))
    assert spin_update(-1.8, 0.0, 0.02) == pytest.approx(Vec3(0.0, 0.0, -60.0))
    assert spin_update(0.0, 0.0, 0.02) == Vec3(0.0, 0.0, 0.0)


def test_rebound_head_on():
    out = racket_rebound(ball((0, -5, 0)), STILL, PARAMS)
    assert tuple(out.post.vel) == pytest.approx((0.0, 4.0, 0.0))
    assert tuple(out.post.spin) == (0.0, 0.0, 0.0)
    assert not out.slipped


def test_rebound_with_sliding():
    incoming = ball((1, -5, 0))
    out = racket_rebound(incoming, STILL, PARAMS)
    assert tuple(out.post.vel) == pytest.approx((-0.8, 4.0, 0.0))
    assert tuple(out.post.spin) == pytest.approx((0.0, 0.0, -60.0))
    assert out.post.pos == incoming.pos
    assert out.post.t == incoming.t


def test_rebound_racket_matching_ball():
    with pytest.raises(NoImpactError):
        racket_rebound(ball((0.5, -2.0, 1.0)), RacketVelocity(0, -2.0, 0), PARAMS)


def random_impact(rng):
    v_yr = rng.uniform(-5, 5)
    incoming = ball(
        (rng.uniform(-5, 5), v_yr - rng.uniform(0.5, 8.0), rng.uniform(-5, 5)),
        spin=rng.uniform(-100, 100, 3),
    )
    racket = RacketVelocity(rng.uniform(-5, 5), v_yr, rng.uniform(-5, 5))
    return incoming, racket


def test_rebound_identities():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        incoming, racket = random_impact(rng)
        out = racket_rebound(incoming, racket, PARAMS)
        v_iy = incoming.vel.y - racket.v_yr
        v_fy = out.post.vel.y - racket.v_yr
        assert v_fy == pytest.approx(-PARAMS.e * v_iy, abs=1e-12)

        s_x, s_z = contact_slip(incoming, racket, PARAMS.r)
        friction = math.hypot(out.delta_v.x, out.delta_v.z)
        if math.hypot(s_x, s_z) > 1e-6:
            assert friction == pytest.approx(
                PARAMS.mu_k * out.delta_v.y, rel=1e-12
            )
            assert out.delta_v.x * s_x + out.delta_v.z * s_z <= 0

        k = SPIN_COUPLING / PARAMS.r
        assert out.delta_w.x == pytest.approx(-k * out.delta_v.z, abs=1e-9)
        assert out.delta_w.y == 0.0
        assert out.delta_w.z == pytest.approx(k * out.delta_v.x, abs=1e-9)
        assert out.post.spin.y == incoming.spin.y


def test_rebound_is_deterministic():
    rng = np.random.default_rng(1)
    for _ in range(20):
        incoming, racket = random_impact(rng)
        assert racket_rebound(incoming, racket, PARAMS) == racket_rebound(
            incoming, racket, PARAMS
        )


def test_capped_friction_never_reverses_slip():
    params = PARAMS._replace(cap_slip_reversal=True)
    out = racket_rebound(ball((1, -5, 0)), STILL, params)
    assert out.delta_v.x == pytest.approx(-0.6)
    assert contact_slip(out.post, STILL, params.r)[0] == pytest.approx(
        0.0, abs=1e-12
    )

    rng = np.random.default_rng(2)
    for _ in range(1000):
        incoming, racket = random_impact(rng)
        s_x, s_z = contact_slip(incoming, racket, params.r)
        out = racket_rebound(incoming, racket, params)
        after = contact_slip(out.post, racket, params.r)
        assert after[0] * s_x + after[1] * s_z >= -1e-9
