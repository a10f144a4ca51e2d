"""Truck-trailer kinematics for heavy articulated vehicles (HAVs).

A vehicle is a truck with on-axle hitched passive trailers.  The state is the
truck rear-axle position plus one heading per segment; every other axle
position follows from the segment lengths, so links are rigid by
construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

TWO_PI = 2.0 * math.pi

DEFAULT_STEERING_LIMIT = math.pi / 4
DEFAULT_ARTICULATION_LIMIT = math.pi / 2
DEFAULT_ARTICULATION_THRESHOLD = math.radians(75.0)

Point = tuple[float, float]


def wrap_angle(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = (angle + math.pi) % TWO_PI - math.pi
    if a <= -math.pi:
        a += TWO_PI
    return a


@dataclass(frozen=True)
class HavConfig:
    truck_length: float
    trailer_lengths: tuple[float, ...]
    steering_limit: float = DEFAULT_STEERING_LIMIT
    articulation_limit: float = DEFAULT_ARTICULATION_LIMIT
    articulation_threshold: float = DEFAULT_ARTICULATION_THRESHOLD

    def __post_init__(self):
        object.__setattr__(self, "trailer_lengths", tuple(float(l) for l in self.trailer_lengths))
        if not self.trailer_lengths:
            raise ValueError("an HAV needs at least one trailer")
        if self.truck_length <= 0 or any(l <= 0 for l in self.trailer_lengths):
            raise ValueError("segment lengths must be strictly positive")
        if not 0 < self.steering_limit < math.pi / 2:
            raise ValueError("steering limit must lie in (0, pi/2)")
        if not 0 < self.articulation_limit <= math.pi:
            raise ValueError("articulation limit must lie in (0, pi]")
        if not self.articulation_threshold < self.articulation_limit:
            raise ValueError("articulation threshold must be below the articulation limit")

    @property
    def trailer_count(self) -> int:
        return len(self.trailer_lengths)

    @property
    def segment_lengths(self) -> tuple[float, ...]:
        return (self.truck_length,) + self.trailer_lengths

    @property
    def total_length(self) -> float:
        return self.truck_length + sum(self.trailer_lengths)

    def to_dict(self) -> dict:
        return {
            "truck_length": self.truck_length,
            "trailer_lengths": list(self.trailer_lengths),
            "steering_limit": self.steering_limit,
            "articulation_limit": self.articulation_limit,
            "articulation_threshold": self.articulation_threshold,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "HavConfig":
        return cls(
            truck_length=float(data["truck_length"]),
            trailer_lengths=tuple(data["trailer_lengths"]),
            steering_limit=float(data.get("steering_limit", DEFAULT_STEERING_LIMIT)),
            articulation_limit=float(data.get("articulation_limit", DEFAULT_ARTICULATION_LIMIT)),
            articulation_threshold=float(data.get("articulation_threshold", DEFAULT_ARTICULATION_THRESHOLD)),
        )


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    heading: float

    def __post_init__(self):
        object.__setattr__(self, "heading", wrap_angle(self.heading))

    def to_list(self) -> list[float]:
        return [self.x, self.y, self.heading]


@dataclass(frozen=True)
class HavState:
    """Rear truck axle position and headings (truck first, then trailers)."""

    rear_axle: Point
    headings: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "rear_axle", (float(self.rear_axle[0]), float(self.rear_axle[1])))
        object.__setattr__(self, "headings", tuple(wrap_angle(h) for h in self.headings))

    @classmethod
    def straight(cls, pose: Pose, trailer_count: int) -> "HavState":
        """All segments aligned with the pose heading."""
        return cls((pose.x, pose.y), (pose.heading,) * (trailer_count + 1))

    @property
    def pose(self) -> Pose:
        return Pose(self.rear_axle[0], self.rear_axle[1], self.headings[0])


@dataclass(frozen=True)
class Control:
    speed: float
    steering: float

    def __post_init__(self):
        if self.speed < 0:
            raise ValueError("speed must be non-negative")


def axle_positions(config: HavConfig, state: HavState) -> list[Point]:
    """Front truck axle, rear truck axle, then each trailer axle."""
    x, y = state.rear_axle
    th = state.headings
    pts = [(x + config.truck_length * math.cos(th[0]), y + config.truck_length * math.sin(th[0])), (x, y)]
    for l, h in zip(config.trailer_lengths, th[1:]):
        x -= l * math.cos(h)
        y -= l * math.sin(h)
        pts.append((x, y))
    return pts


def segment_speeds(state: HavState, speed: float) -> list[float]:
    """Speeds v0..vN of every segment for truck speed ``speed``."""
    v = [speed]
    th = state.headings
    for j in range(1, len(th)):
        v.append(v[-1] * math.cos(th[j] - th[j - 1]))
    return v


def step(config: HavConfig, state: HavState, control: Control, dt: float) -> HavState:
    """One explicit-Euler step; all rates use the pre-step state."""
    v = control.speed
    th = state.headings
    x, y = state.rear_axle
    new = [th[0] + v / config.truck_length * math.tan(control.steering) * dt]
    v_prev = v
    for j, l in enumerate(config.trailer_lengths, start=1):
        d = th[j] - th[j - 1]
        new.append(th[j] - v_prev / l * math.sin(d) * dt)
        v_prev *= math.cos(d)
    return HavState((x + v * math.cos(th[0]) * dt, y + v * math.sin(th[0]) * dt), tuple(new))


def articulation_angles(state: HavState) -> list[float]:
    th = state.headings
    return [wrap_angle(th[j] - th[j - 1]) for j in range(1, len(th))]


def is_jackknifed(state: HavState, articulation_limit: float = DEFAULT_ARTICULATION_LIMIT) -> bool:
    # cos comparison keeps |delta| == limit admissible, as does 0 <= cos(delta) at pi/2
    c = math.cos(articulation_limit)
    return any(math.cos(d) < c for d in articulation_angles(state))


def jackknifed_joints(state: HavState, articulation_limit: float = DEFAULT_ARTICULATION_LIMIT) -> list[int]:
    """1-based indices of joints beyond the articulation limit."""
    c = math.cos(articulation_limit)
    return [j for j, d in enumerate(articulation_angles(state), start=1) if math.cos(d) < c]


def collision_radius(config: HavConfig) -> float:
    # the truck itself is not part of the footprint radius
    return sum(config.trailer_lengths)


def in_potential_collision(state_i: HavState, state_h: HavState, collision_distance: float) -> bool:
    (xi, yi), (xh, yh) = state_i.rear_axle, state_h.rear_axle
    return math.hypot(xi - xh, yi - yh) <= collision_distance


def _orientation(p: Point, q: Point, r: Point) -> int:
    v = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    return (v > 0) - (v < 0)


def _on_segment(p: Point, q: Point, r: Point) -> bool:
    """For collinear p, q, r: does q lie within the bounding box of segment pr."""
    return min(p[0], r[0]) <= q[0] <= max(p[0], r[0]) and min(p[1], r[1]) <= q[1] <= max(p[1], r[1])


def segments_intersect(p1: Point, q1: Point, p2: Point, q2: Point) -> bool:
    """Closed-segment intersection; touching and collinear overlap count."""
    o1 = _orientation(p1, q1, p2)
    o2 = _orientation(p1, q1, q2)
    o3 = _orientation(p2, q2, p1)
    o4 = _orientation(p2, q2, q1)
    if o1 != o2 and o3 != o4:
        return True
    return (
        (o1 == 0 and _on_segment(p1, p2, q1))
        or (o2 == 0 and _on_segment(p1, q2, q1))
        or (o3 == 0 and _on_segment(p2, p1, q2))
        or (o4 == 0 and _on_segment(p2, q1, q2))
    )


def chains_intersect(chain_a: Sequence[Point], chain_b: Sequence[Point]) -> bool:
    for a0, a1 in zip(chain_a, chain_a[1:]):
        ax_lo, ax_hi = min(a0[0], a1[0]), max(a0[0], a1[0])
        ay_lo, ay_hi = min(a0[1], a1[1]), max(a0[1], a1[1])
        for b0, b1 in zip(chain_b, chain_b[1:]):
            if max(b0[0], b1[0]) < ax_lo or min(b0[0], b1[0]) > ax_hi:
                continue
            if max(b0[1], b1[1]) < ay_lo or min(b0[1], b1[1]) > ay_hi:
                continue
            if segments_intersect(a0, a1, b0, b1):
                return True
    return False


def reach_radius(config: HavConfig) -> float:
    """Radius around the rear truck axle that contains the whole axle chain."""
    return max(config.truck_length, sum(config.trailer_lengths))


def in_actual_collision(config_i: HavConfig, state_i: HavState, config_h: HavConfig, state_h: HavState) -> bool:
    (xi, yi), (xh, yh) = state_i.rear_axle, state_h.rear_axle
    if math.hypot(xi - xh, yi - yh) > reach_radius(config_i) + reach_radius(config_h):
        return False
    return chains_intersect(axle_positions(config_i, state_i), axle_positions(config_h, state_h))


def min_stable_radius(config: HavConfig) -> float:
    """Radius of the smallest circle the front axle can follow indefinitely."""
    return math.sqrt(sum(l * l for l in config.segment_lengths))


def max_safe_speed(config: HavConfig, dt: float) -> float:
    """Largest speed for which one step cannot push the first joint from the
    articulation threshold past the articulation limit."""
    beta = config.articulation_threshold
    rate = abs(math.sin(beta) / config.trailer_lengths[0] + math.tan(config.steering_limit) / config.truck_length)
    return (config.articulation_limit - beta) / (dt * rate)


def articulation_rate(config: HavConfig, state: HavState, control: Control) -> float:
    """Instantaneous rate of change of the first articulation angle."""
    d1 = state.headings[1] - state.headings[0]
    v = control.speed
    return -v / config.trailer_lengths[0] * math.sin(d1) - v / config.truck_length * math.tan(control.steering)


def steady_articulation(config: HavConfig, steering: float) -> float:
    """First-joint angle at which the articulation rate vanishes for constant steering.

    Raises ValueError when no steady circle exists for that steering angle.
    """
    s = -config.trailer_lengths[0] / config.truck_length * math.tan(steering)
    if abs(s) > 1:
        raise ValueError("no steady articulation for this steering angle")
    return math.asin(s)
