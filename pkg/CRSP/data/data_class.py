"""Data classes of the strike planner."""

# License: MIT

import math
from typing import NamedTuple, Tuple

import numpy as np

from CRSP.exceptions import ValidationError


DRAG_MODES = ("linear", "quadratic")

TERM_KINDS = (
    "landing_speed_bonus",
    "spin_xy_bonus",
    "flatness",
    "max_height_bonus",
    "max_height_penalty",
    "spin_x_bonus",
)


def _require(condition, field, message):
    if not condition:
        raise ValidationError(field, message)


def _finite(*values):
    return all(math.isfinite(float(v)) for v in values)


class Vec3(NamedTuple):
    """Cartesian 3-vector, units given by context (m, m/s or rad/s)."""

    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, arr):
        return cls(float(arr[0]), float(arr[1]), float(arr[2]))

    def to_array(self):
        return np.array(self, dtype=np.float64)

    def norm(self):
        return math.sqrt(self.x**2 + self.y**2 + self.z**2)

    def is_finite(self):
        return _finite(*self)


class BallState(NamedTuple):
    """Ball state at time t.

    The flight model stacks [vel; pos] into its 6-state vector, spin is
    held constant between impacts.
    """

    t: float
    pos: Vec3
    vel: Vec3
    spin: Vec3 = Vec3()

    @classmethod
    def create(cls, pos, vel, spin=(0.0, 0.0, 0.0), t=0.0):
        return cls(
            t=float(t),
            pos=Vec3.from_array(pos),
            vel=Vec3.from_array(vel),
            spin=Vec3.from_array(spin),
        )

    @classmethod
    def from_vector(cls, t, vector, spin):
        """Build a state from the stacked [v; x] vector."""
        return cls(
            t=float(t),
            pos=Vec3.from_array(vector[3:6]),
            vel=Vec3.from_array(vector[0:3]),
            spin=spin,
        )

    def to_vector(self):
        """Stacked [v; x] state of the LTI flight model."""
        return np.array(self.vel + self.pos, dtype=np.float64)

    def is_finite(self):
        return (
            math.isfinite(self.t)
            and self.pos.is_finite()
            and self.vel.is_finite()
            and self.spin.is_finite()
        )

    def as_row(self):
        """Row of the trajectory table, t,x,y,z,vx,vy,vz,wx,wy,wz."""
        return (self.t,) + tuple(self.pos) + tuple(self.vel) + tuple(self.spin)


class PhysicsParams(NamedTuple):
    """Constants of the flight and rebound models.

    K_v: linear drag rate, 1/s (the ball speed halves each second)
    k_d: quadratic drag coefficient, 1/m (quadratic drag mode only)
    k_m: Magnus coupling, dimensionless
    g: gravity magnitude, m/s^2
    e: racket restitution
    mu_k: kinetic friction between ball and racket rubber
    r: ball radius, m
    net_height: m
    drag_mode: "linear" or "quadratic"
    cap_slip_reversal: clamp the friction impulse so contact slip
        never changes sign
    """

    K_v: float = 0.7
    k_d: float = 0.1
    k_m: float = 0.01
    g: float = 9.81
    e: float = 0.8
    mu_k: float = 0.2
    r: float = 0.02
    net_height: float = 0.15
    drag_mode: str = "linear"
    cap_slip_reversal: bool = False

    def validate(self, prefix="physics"):
        _require(
            _finite(self.K_v, self.k_d, self.k_m, self.g),
            prefix,
            "all constants must be finite",
        )
        _require(self.K_v > 0, f"{prefix}.K_v", "K_v must be > 0")
        _require(self.k_d >= 0, f"{prefix}.k_d", "k_d must be >= 0")
        _require(self.k_m >= 0, f"{prefix}.k_m", "k_m must be >= 0")
        _require(self.g > 0, f"{prefix}.g", "g must be > 0")
        _require(0 < self.e <= 1, f"{prefix}.e", "e must be in (0,1]")
        _require(self.mu_k >= 0, f"{prefix}.mu_k", "mu_k must be >= 0")
        _require(self.r > 0, f"{prefix}.r", "r must be > 0")
        _require(
            self.net_height > 0,
            f"{prefix}.net_height",
            "net_height must be > 0",
        )
        _require(
            self.drag_mode in DRAG_MODES,
            f"{prefix}.drag_mode",
            f"drag_mode must be one of {DRAG_MODES}",
        )
        return self


class TableGeometry(NamedTuple):
    """Table centered at the origin, robot side is y < 0, surface z = 0."""

    length: float = 2.74
    width: float = 1.525
    net_height: float = 0.15
    table_z: float = 0.0

    def validate(self, prefix="table"):
        _require(self.length > 0, f"{prefix}.length", "length must be > 0")
        _require(self.width > 0, f"{prefix}.width", "width must be > 0")
        _require(
            self.net_height > 0,
            f"{prefix}.net_height",
            "net_height must be > 0",
        )
        _require(self.table_z == 0, f"{prefix}.table_z", "table_z must be 0")
        return self


class Workspace(NamedTuple):
    """Box reachable by the racket center and the racket speed limits."""

    x_range: Tuple[float, float] = (-1.0125, 1.0125)
    y_range: Tuple[float, float] = (-1.62, 0.0)
    z_range: Tuple[float, float] = (0.0, 0.76)
    v_limit: Tuple[float, float, float] = (5.0, 5.0, 5.0)

    @classmethod
    def from_table(cls, table, margin=0.25, reach=0.76, v_limit=5.0):
        """Robot half of the table grown by `margin`, up to `reach` high."""
        half_w = table.width / 2 + margin
        half_l = table.length / 2 + margin
        return cls(
            x_range=(-half_w, half_w),
            y_range=(-half_l, 0.0),
            z_range=(0.0, reach),
            v_limit=(v_limit, v_limit, v_limit),
        )

    def contains(self, pos):
        return (
            self.x_range[0] <= pos[0] <= self.x_range[1]
            and self.y_range[0] <= pos[1] <= self.y_range[1]
            and self.z_range[0] <= pos[2] <= self.z_range[1]
        )

    def within_limits(self, racket):
        return all(abs(v) <= lim for v, lim in zip(racket, self.v_limit))

    def validate(self, prefix="workspace"):
        for name in ("x_range", "y_range", "z_range"):
            lo, hi = getattr(self, name)
            _require(lo < hi, f"{prefix}.{name}", f"{name} must have lo < hi")
        _require(
            len(self.v_limit) == 3 and all(v > 0 for v in self.v_limit),
            f"{prefix}.v_limit",
            "v_limit must be three values > 0",
        )
        return self


class RacketVelocity(NamedTuple):
    """Racket velocity at impact, m/s. The face is always normal to y."""

    v_xr: float = 0.0
    v_yr: float = 0.0
    v_zr: float = 0.0


class StrikeCandidate(NamedTuple):
    """Decision 4-vector (T, v_xr, v_yr, v_zr); T is measured from the
    ball's bounce on the robot's side."""

    T: float
    racket: RacketVelocity

    @classmethod
    def from_array(cls, p):
        return cls(
            T=float(p[0]),
            racket=RacketVelocity(float(p[1]), float(p[2]), float(p[3])),
        )

    def to_array(self):
        return np.array((self.T,) + tuple(self.racket), dtype=np.float64)


class SecondaryTerm(NamedTuple):
    """Weighted secondary objective added to the landing distance.

    `weight2` is only read by the "flatness" kind, which carries two
    weights (|v_tz| and 1/|v_ty|).
    """

    kind: str
    weight: float
    weight2: float = 0.0


class CostSpec(NamedTuple):
    target: Tuple[float, float]
    terms: Tuple[SecondaryTerm, ...] = ()

    def validate(self, prefix="cost"):
        _require(
            len(self.target) == 2 and _finite(*self.target),
            f"{prefix}.target",
            "target must be two finite numbers",
        )
        _require(
            self.target[1] >= 0,
            f"{prefix}.target",
            "target must lie on the opponent's side (y >= 0)",
        )
        for i, term in enumerate(self.terms):
            _require(
                term.kind in TERM_KINDS,
                f"{prefix}.terms[{i}].kind",
                f"kind must be one of {TERM_KINDS}",
            )
            _require(
                term.weight >= 0 and term.weight2 >= 0,
                f"{prefix}.terms[{i}].weight",
                "weights must be >= 0",
            )
        return self
