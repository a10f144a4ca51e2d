"""Randomised experiment scenarios: vehicle sampling, arena sizing, pose placement.

All randomness flows from ``numpy`` PCG64 generators seeded through
``SeedSequence(master_seed, spawn_key=(experiment, attempt, tag[, hav]))``,
so each experiment, retry, purpose and vehicle has its own substream and a
scenario is a pure function of (seed, experiment index, attempt).
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Optional
from pathlib import Path

import numpy as np

from .kinematics import (
    TWO_PI,
    HavConfig,
    HavState,
    Pose,
    collision_radius,
    min_stable_radius,
)

SCHEMA_VERSION = 1

# substream tags
STREAM_CONFIG = 1
STREAM_START = 2
STREAM_FIRST_GOAL = 3
STREAM_SECOND_GOAL = 4

POSE_ATTEMPT_BUDGET = 100_000


class ScenarioGenerationError(RuntimeError):
    """Rejection sampling could not place every pose within its budget."""


@dataclass(frozen=True)
class ScenarioParams:
    hav_count: int = 1
    seed: int = 0
    rayleigh_sigma: float = 3.0
    max_trailer_count: int = 10
    truck_mix: tuple[float, float, float, float, float] = (4.0, 0.6, 10.7, 1.2, 0.5)
    length_bounds: tuple[float, float] = (2.0, 12.0)
    goal_distance_tol: float = 0.5
    goal_heading_tol: float = 0.1
    dt: float = 0.2
    v_max_cap: float = 1.0
    max_steps: int = 20_000
    # full-lock rear-axle radius = R_min / steering_ratio, clipped to
    # steering_bounds; None keeps the HavConfig default for every vehicle
    steering_ratio: Optional[float] = 3.0
    steering_bounds: tuple[float, float] = (math.radians(30.0), math.radians(58.0))

    def __post_init__(self):
        object.__setattr__(self, "truck_mix", tuple(float(v) for v in self.truck_mix))
        object.__setattr__(self, "length_bounds", tuple(float(v) for v in self.length_bounds))
        object.__setattr__(self, "steering_bounds", tuple(float(v) for v in self.steering_bounds))
        if self.steering_ratio is not None and self.steering_ratio <= 0:
            raise ValueError("steering_ratio must be positive")
        s_lo, s_hi = self.steering_bounds
        if not 0 < s_lo <= s_hi < math.pi / 2:
            raise ValueError("steering bounds must satisfy 0 < lo <= hi < pi/2")
        if self.hav_count < 1:
            raise ValueError("need at least one HAV")
        if not 1 <= self.max_trailer_count <= 10:
            raise ValueError("max_trailer_count must lie in 1..10")
        if min(self.goal_distance_tol, self.goal_heading_tol, self.dt, self.v_max_cap, self.rayleigh_sigma) <= 0:
            raise ValueError("tolerances, dt, speed cap and sigma must be positive")
        if self.max_steps < 0:
            raise ValueError("max_steps must be non-negative")
        lo, hi = self.length_bounds
        if not 0 < lo < hi:
            raise ValueError("invalid length bounds")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["truck_mix"] = list(self.truck_mix)
        d["length_bounds"] = list(self.length_bounds)
        d["steering_bounds"] = list(self.steering_bounds)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioParams":
        kwargs = dict(data)
        for key in ("truck_mix", "length_bounds", "steering_bounds"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)


@dataclass(frozen=True)
class Scenario:
    configs: tuple[HavConfig, ...]
    starts: tuple[Pose, ...]
    first_goals: tuple[Pose, ...]
    second_goals: tuple[Pose, ...]
    area_side: float
    seed: int = 0
    experiment_index: int = 0
    attempt: int = 0

    @property
    def hav_count(self) -> int:
        return len(self.configs)

    def initial_states(self) -> list[HavState]:
        return [HavState.straight(p, c.trailer_count) for c, p in zip(self.configs, self.starts)]

    def goals(self, phase: int) -> tuple[Pose, ...]:
        return self.first_goals if phase == 1 else self.second_goals

    def to_dict(self, params: ScenarioParams | None = None) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "seed": self.seed,
            "experiment_index": self.experiment_index,
            "attempt": self.attempt,
            "area_side": self.area_side,
            "configs": [c.to_dict() for c in self.configs],
            "starts": [p.to_list() for p in self.starts],
            "first_goals": [p.to_list() for p in self.first_goals],
            "second_goals": [p.to_list() for p in self.second_goals],
        }
        if params is not None:
            d["params"] = params.to_dict()
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        poses = lambda key: tuple(Pose(*map(float, p)) for p in data[key])
        configs = tuple(HavConfig.from_dict(c) for c in data["configs"])
        sc = cls(
            configs=configs,
            starts=poses("starts"),
            first_goals=poses("first_goals"),
            second_goals=poses("second_goals"),
            area_side=float(data["area_side"]),
            seed=int(data.get("seed", 0)),
            experiment_index=int(data.get("experiment_index", 0)),
            attempt=int(data.get("attempt", 0)),
        )
        n = len(configs)
        if n == 0 or not len(sc.starts) == len(sc.first_goals) == len(sc.second_goals) == n:
            raise ValueError("scenario needs one start and two goals per HAV")
        return sc


def substream(seed: int, experiment: int, attempt: int, tag: int, *extra: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(experiment, attempt, tag) + tuple(extra))
    return np.random.Generator(np.random.PCG64(ss))


def _bounded(draw, lo: float, hi: float) -> float:
    while True:
        v = float(draw())
        if lo <= v < hi:
            return v


def sample_hav_config(rng: np.random.Generator, params: ScenarioParams = ScenarioParams()) -> HavConfig:
    while True:
        n = math.ceil(rng.rayleigh(params.rayleigh_sigma))
        if 1 <= n <= params.max_trailer_count:
            break
    mu1, s1, mu2, s2, w1 = params.truck_mix
    lo, hi = params.length_bounds

    def truck():
        return rng.normal(mu1, s1) if rng.random() < w1 else rng.normal(mu2, s2)

    truck_length = _bounded(truck, lo, hi)
    trailers = tuple(_bounded(lambda: rng.uniform(lo, hi), lo, hi) for _ in range(n))
    config = HavConfig(truck_length, trailers)
    if params.steering_ratio is None:
        return config
    return HavConfig(truck_length, trailers, steering_limit=scaled_steering_limit(config, params))


def scaled_steering_limit(config: HavConfig, params: ScenarioParams = ScenarioParams()) -> float:
    """Steering limit whose full-lock turn is a fixed fraction of the minimal stable circle.

    Long chains behind short trucks get gentler limits (tight full-lock loops coil
    the chain), short chains behind long trucks get sharper ones (otherwise they
    cannot follow paths planned with R_min).
    """
    lo, hi = params.steering_bounds
    phi = math.atan(params.steering_ratio * config.truck_length / min_stable_radius(config))
    return min(max(phi, lo), hi)


def area_side(configs) -> float:
    return math.sqrt(4.0 * sum(math.pi * collision_radius(c) ** 2 for c in configs))


def sample_poses(rng: np.random.Generator, configs, side: float, budget: int = POSE_ATTEMPT_BUDGET) -> list[Pose]:
    """Place one pose per HAV, uniformly in the arena, rejecting overlaps of
    collision circles with previously placed HAVs."""
    radii = [collision_radius(c) for c in configs]
    poses: list[Pose] = []
    attempts = 0
    for r in radii:
        while True:
            if attempts >= budget:
                raise ScenarioGenerationError(f"no valid pose within {budget} attempts")
            attempts += 1
            x, y = float(rng.uniform(0.0, side)), float(rng.uniform(0.0, side))
            heading = float(rng.uniform(0.0, TWO_PI))
            if all(math.hypot(x - p.x, y - p.y) > r + rr for p, rr in zip(poses, radii)):
                poses.append(Pose(x, y, heading))
                break
    return poses


def generate(params: ScenarioParams, experiment_index: int = 0, attempt: int = 0) -> Scenario:
    seed = params.seed
    configs = tuple(
        sample_hav_config(substream(seed, experiment_index, attempt, STREAM_CONFIG, i), params)
        for i in range(params.hav_count)
    )
    side = area_side(configs)
    phases = [
        tuple(sample_poses(substream(seed, experiment_index, attempt, tag), configs, side))
        for tag in (STREAM_START, STREAM_FIRST_GOAL, STREAM_SECOND_GOAL)
    ]
    return Scenario(configs, *phases, area_side=side, seed=seed, experiment_index=experiment_index, attempt=attempt)


def goal_reached(state: HavState, goal: Pose, d_e: float = 0.5, d_h: float = 0.1) -> bool:
    distance, heading_diff = goal_error(state, goal)
    return distance < d_e and heading_diff < d_h


def goal_error(state: HavState, goal: Pose) -> tuple[float, float]:
    """Rear-axle distance to the goal and absolute wrapped heading difference."""
    x, y = state.rear_axle
    diff = abs(((goal.heading - state.headings[0] + math.pi) % TWO_PI) - math.pi)
    return math.hypot(goal.x - x, goal.y - y), diff


def load_scenario(path: str | Path) -> tuple[Scenario, ScenarioParams]:
    data = json.loads(Path(path).read_text())
    params = ScenarioParams.from_dict(data["params"]) if "params" in data else ScenarioParams()
    sc = Scenario.from_dict(data)
    if params.hav_count != sc.hav_count:
        params = ScenarioParams.from_dict({**params.to_dict(), "hav_count": sc.hav_count})
    return sc, params


def save_scenario(path: str | Path, scenario: Scenario, params: ScenarioParams | None = None) -> None:
    Path(path).write_text(json.dumps(scenario.to_dict(params), indent=2, sort_keys=True) + "\n")
