"""Secondary objectives added to the landing distance."""

# License: MIT

import math

from CRSP.models.physics.flight import T_MAX, max_height

EPS = 1e-9  # guard of every reciprocal cost term


def secondary_term(
    kind,
    weight,
    landing_state,
    post_impact,
    params,
    t_max=T_MAX,
    weight2=0.0,
    grid=None,
):
    """Value of one weighted secondary objective.

    landing_speed_bonus: weight / |v_tar|
    spin_xy_bonus:       weight / sqrt(w_x^2 + w_y^2)
    flatness:            weight * |v_tz| + weight2 / |v_ty|
    max_height_bonus:    weight / max height
    max_height_penalty:  weight * max height
    spin_x_bonus:        weight / |w_x|

    Velocities are taken at the landing, spin and max height from the
    flight after the racket.
    """
    if weight == 0 and weight2 == 0:
        return 0.0

    if kind == "landing_speed_bonus":
        return weight / max(landing_state.vel.norm(), EPS)
    if kind == "spin_xy_bonus":
        spin = post_impact.spin
        return weight / max(math.hypot(spin.x, spin.y), EPS)
    if kind == "flatness":
        vel = landing_state.vel
        return weight * abs(vel.z) + weight2 / max(abs(vel.y), EPS)
    if kind == "spin_x_bonus":
        return weight / max(abs(post_impact.spin.x), EPS)
    if kind in ("max_height_bonus", "max_height_penalty"):
        height = max_height(post_impact, t_max, params, grid=grid)
        if kind == "max_height_bonus":
            return weight / max(height, EPS)
        return weight * height
    raise ValueError(f"unknown secondary term {kind}")


def secondary_breakdown(spec, landing_state, post_impact, params, t_max=T_MAX, grid=None):
    """Map each term kind of `spec` to its summed value."""
    breakdown = {}
    for term in spec.terms:
        value = secondary_term(
            term.kind,
            term.weight,
            landing_state,
            post_impact,
            params,
            t_max,
            weight2=term.weight2,
            grid=grid,
        )
        breakdown[term.kind] = breakdown.get(term.kind, 0.0) + value
    return breakdown
