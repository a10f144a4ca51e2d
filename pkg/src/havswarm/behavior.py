"""AVOID-JACK reaction stack.

Every HAV decides its next Ackermann command from the current global state
alone: a base vector (goal attraction, or evasion when another HAV is in
potential collision) is blended with a jackknife repulsion pulling the truck
towards its first trailer's heading, rescaled to the speed bound, and turned
into speed and steering.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from . import dubins
from .kinematics import (
    Control,
    HavConfig,
    HavState,
    Pose,
    collision_radius,
    min_stable_radius,
    wrap_angle,
)

Vector = tuple[float, float]

# switch from the approach point to the goal itself within this many truck lengths
CLOSE_TO_GOAL_FACTOR = 1.0


@dataclass(frozen=True)
class WeightParams:
    b: float = 0.5
    c: float = 2.0

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("c must be positive")

    @property
    def neutral_angle(self) -> float:
        """Articulation angle where the weight equals one."""
        return math.acos(self.b / self.c)


def jackknife_weight(delta: float, params: WeightParams = WeightParams()) -> float:
    return 1.0 + math.tanh(params.b - params.c * math.cos(delta))


def approach_point(goal: Pose, truck_length: float) -> Pose:
    return Pose(
        goal.x - truck_length * math.cos(goal.heading),
        goal.y - truck_length * math.sin(goal.heading),
        goal.heading,
    )


def is_close_to_goal(config: HavConfig, state: HavState, goal: Pose) -> bool:
    x, y = state.rear_axle
    return math.hypot(goal.x - x, goal.y - y) <= CLOSE_TO_GOAL_FACTOR * config.truck_length


def goal_steering(config: HavConfig, state: HavState, goal: Pose) -> float:
    """Steering angle requested by goal attraction: full lock into the first
    turn of a Dubins path, or straight ahead."""
    if is_close_to_goal(config, state, goal):
        target, radius = goal, config.truck_length
    else:
        target, radius = approach_point(goal, config.truck_length), min_stable_radius(config)
    path = dubins.shortest_path(state.pose, target, radius)
    turn = dubins.initial_turn(path)
    if turn is dubins.Turn.LEFT:
        return config.steering_limit
    if turn is dubins.Turn.RIGHT:
        return -config.steering_limit
    return 0.0


def goal_attraction(config: HavConfig, state: HavState, goal: Pose) -> Vector:
    h = state.headings[0] + goal_steering(config, state, goal)
    return (math.cos(h), math.sin(h))


def evasion_vector(self_state: HavState, other_state: HavState) -> Vector:
    """Unit vector pointing from the other HAV's rear axle to ours."""
    (xs, ys), (xo, yo) = self_state.rear_axle, other_state.rear_axle
    dx, dy = xs - xo, ys - yo
    n = math.hypot(dx, dy)
    if n == 0.0:
        h = self_state.headings[0]
        return (math.cos(h), math.sin(h))
    return (dx / n, dy / n)


def repulsion_weight(state: HavState, params: WeightParams = WeightParams()) -> float:
    """Sum of jackknife weights over all joints."""
    th = state.headings
    return sum(jackknife_weight(th[j] - th[j - 1], params) for j in range(1, len(th)))


def combine(goal_vec: Vector, config: HavConfig, state: HavState, params: WeightParams, v_max: float) -> Vector:
    """Blend a unit base vector with jackknife repulsion and scale to ``v_max``."""
    w = repulsion_weight(state, params)
    h1 = state.headings[1]
    ex, ey = math.cos(h1), math.sin(h1)
    ux, uy = goal_vec[0] + w * ex, goal_vec[1] + w * ey
    n = math.hypot(ux, uy)
    if n < 1e-12:
        return (v_max * ex, v_max * ey)
    return (v_max * ux / n, v_max * uy / n)


def to_ackermann(m: Vector, heading: float, steering_limit: float) -> Control:
    speed = math.hypot(m[0], m[1])
    if speed == 0.0:
        return Control(0.0, 0.0)
    phi = wrap_angle(math.atan2(m[1], m[0]) - heading)
    return Control(speed, min(max(phi, -steering_limit), steering_limit))


def nearest_threat(
    config: HavConfig, state: HavState, neighbors: Iterable[tuple[HavConfig, HavState]]
) -> HavState | None:
    """State of the closest neighbor in potential collision, if any."""
    x, y = state.rear_axle
    d_self = collision_radius(config)
    best, best_dist = None, math.inf
    for other_config, other_state in neighbors:
        ox, oy = other_state.rear_axle
        dist = math.hypot(ox - x, oy - y)
        if dist <= d_self + collision_radius(other_config) and dist < best_dist:
            best, best_dist = other_state, dist
    return best


def decide(
    config: HavConfig,
    state: HavState,
    goal: Pose,
    neighbors: Iterable[tuple[HavConfig, HavState]],
    params: WeightParams,
    v_max: float,
) -> Control:
    if v_max <= 0.0:
        return Control(0.0, 0.0)
    threat = nearest_threat(config, state, neighbors)
    if threat is None:
        base = goal_attraction(config, state, goal)
    else:
        base = evasion_vector(state, threat)
    m = combine(base, config, state, params, v_max)
    return to_ackermann(m, state.headings[0], config.steering_limit)
