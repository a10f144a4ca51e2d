"""Synchronous multi-HAV simulation with two goal phases and event accounting."""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional

from . import behavior
from .analysis import CloseMiss, classify_close_miss
from .kinematics import (
    HavState,
    collision_radius,
    in_actual_collision,
    max_safe_speed,
    step,
)
from .scenario import (
    Scenario,
    ScenarioGenerationError,
    ScenarioParams,
    generate,
    goal_error,
)

RECORD_SCHEMA_VERSION = 1
MAX_SCENARIO_ATTEMPTS = 100

ALL_SECOND_GOALS = "AllSecondGoals"
STEP_LIMIT = "StepLimit"


@dataclass(frozen=True)
class SimEvent:
    """One logged event; collision, jackknife and close-miss events mark the
    onset of the condition, goal hits are logged once."""

    time_step: int
    hav_index: int
    kind: str  # JackknifeViolation | PotentialCollision | ActualCollision | GoalHit | CloseMissState
    data: dict = field(default_factory=dict)


@dataclass
class HavRecord:
    trailer_count: int
    truck_length: float
    trailer_lengths: list[float]
    v_max: float
    steering_limit: float
    jackknifed: bool = False
    jackknife_step: Optional[int] = None
    jackknife_joints: list[int] = field(default_factory=list)
    max_articulation: list[float] = field(default_factory=list)
    goal_hit: list[bool] = field(default_factory=lambda: [False, False])
    goal_hit_step: list[Optional[int]] = field(default_factory=lambda: [None, None])
    goal_hit_distance: list[Optional[float]] = field(default_factory=lambda: [None, None])
    goal_hit_heading_diff: list[Optional[float]] = field(default_factory=lambda: [None, None])
    heading_close_miss_steps: list[int] = field(default_factory=lambda: [0, 0])
    euclidean_close_miss_steps: list[int] = field(default_factory=lambda: [0, 0])
    potential_collision: bool = False
    potential_collision_steps: int = 0
    actual_collision: bool = False
    actual_collision_steps: int = 0

    @property
    def close_miss(self) -> list[bool]:
        return [h + e > 0 for h, e in zip(self.heading_close_miss_steps, self.euclidean_close_miss_steps)]


@dataclass
class ExperimentRecord:
    seed: int
    experiment_index: int
    attempt: int
    hav_count: int
    area_side: float
    termination: str = STEP_LIMIT
    final_step: int = 0
    phase_switch_step: Optional[int] = None
    havs: list[HavRecord] = field(default_factory=list)
    schema_version: int = RECORD_SCHEMA_VERSION

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentRecord":
        data = dict(data)
        version = data.get("schema_version")
        if version != RECORD_SCHEMA_VERSION:
            raise ValueError(f"unsupported record schema version {version!r}")
        data["havs"] = [HavRecord(**h) for h in data["havs"]]
        return cls(**data)


@dataclass
class RunResult:
    record: ExperimentRecord
    events: list[SimEvent]
    trace: Optional[list[list]] = None


def per_hav_speed_limit(config, params: ScenarioParams) -> float:
    return min(params.v_max_cap, max_safe_speed(config, params.dt))


def run(
    scenario: Scenario,
    params: ScenarioParams,
    weights: behavior.WeightParams = behavior.WeightParams(),
    trace: bool = False,
) -> RunResult:
    configs = scenario.configs
    m = len(configs)
    states = scenario.initial_states()
    v_limits = [per_hav_speed_limit(c, params) for c in configs]
    radii = [collision_radius(c) for c in configs]
    cos_limits = [math.cos(c.articulation_limit) for c in configs]
    d_e, d_h = params.goal_distance_tol, params.goal_heading_tol

    record = ExperimentRecord(
        seed=scenario.seed,
        experiment_index=scenario.experiment_index,
        attempt=scenario.attempt,
        hav_count=m,
        area_side=scenario.area_side,
    )
    havs = record.havs
    for c, v in zip(configs, v_limits):
        havs.append(HavRecord(c.trailer_count, c.truck_length, list(c.trailer_lengths), v, c.steering_limit,
                              max_articulation=[0.0] * c.trailer_count))
    events: list[SimEvent] = []
    trace_rows: Optional[list[list]] = [] if trace else None

    phase = 1
    jack_active = [[False] * c.trailer_count for c in configs]
    pot_active: dict[tuple[int, int], bool] = {}
    act_active: dict[tuple[int, int], bool] = {}
    miss_active = [CloseMiss.NONE] * m

    def observe(t: int) -> bool:
        nonlocal phase
        for i, (st, rec) in enumerate(zip(states, havs)):
            th = st.headings
            for j in range(1, len(th)):
                d = th[j] - th[j - 1]
                a = abs(math.remainder(d, 2 * math.pi))
                if a > rec.max_articulation[j - 1]:
                    rec.max_articulation[j - 1] = a
                bad = math.cos(d) < cos_limits[i]
                if bad and not jack_active[i][j - 1]:
                    events.append(SimEvent(t, i, "JackknifeViolation", {"joint": j}))
                    if not rec.jackknifed:
                        rec.jackknifed, rec.jackknife_step = True, t
                    if j not in rec.jackknife_joints:
                        rec.jackknife_joints.append(j)
                        rec.jackknife_joints.sort()
                jack_active[i][j - 1] = bad

        for i in range(m):
            xi, yi = states[i].rear_axle
            for h in range(i + 1, m):
                xh, yh = states[h].rear_axle
                pot = math.hypot(xi - xh, yi - yh) <= radii[i] + radii[h]
                act = in_actual_collision(configs[i], states[i], configs[h], states[h])
                for flag, active, kind, attr in (
                    (pot, pot_active, "PotentialCollision", "potential_collision"),
                    (act, act_active, "ActualCollision", "actual_collision"),
                ):
                    if flag:
                        for a, b in ((i, h), (h, i)):
                            setattr(havs[a], attr, True)
                            setattr(havs[a], attr + "_steps", getattr(havs[a], attr + "_steps") + 1)
                            if not active.get((a, b)):
                                events.append(SimEvent(t, a, kind, {"other": b}))
                    active[(i, h)] = active[(h, i)] = flag

        while True:
            goals = scenario.goals(phase)
            k = phase - 1
            for i, (st, rec) in enumerate(zip(states, havs)):
                if rec.goal_hit[k]:
                    continue
                dist, hdiff = goal_error(st, goals[i])
                if dist < d_e and hdiff < d_h:
                    rec.goal_hit[k] = True
                    rec.goal_hit_step[k] = t
                    rec.goal_hit_distance[k] = dist
                    rec.goal_hit_heading_diff[k] = hdiff
                    events.append(SimEvent(t, i, "GoalHit", {"phase": phase, "distance": dist, "heading_diff": hdiff}))
                    miss_active[i] = CloseMiss.NONE
                    continue
                cm = classify_close_miss(dist, hdiff, d_e, d_h)
                if cm is CloseMiss.HEADING:
                    rec.heading_close_miss_steps[k] += 1
                elif cm is CloseMiss.EUCLIDEAN:
                    rec.euclidean_close_miss_steps[k] += 1
                if cm is not CloseMiss.NONE and cm is not miss_active[i]:
                    events.append(SimEvent(t, i, "CloseMissState", {"phase": phase, "kind": cm.value}))
                miss_active[i] = cm
            if not all(rec.goal_hit[k] for rec in havs):
                return False
            if phase == 2:
                record.termination = ALL_SECOND_GOALS
                return True
            phase = 2
            record.phase_switch_step = t
            for i in range(m):
                miss_active[i] = CloseMiss.NONE

    t = 0
    done = observe(0)
    while not done and t < params.max_steps:
        snapshot = list(states)
        k = phase - 1
        goals = scenario.goals(phase)
        controls = []
        for i in range(m):
            v_max = 0.0 if havs[i].goal_hit[k] else v_limits[i]
            neighbors = [(configs[h], snapshot[h]) for h in range(m) if h != i]
            controls.append(behavior.decide(configs[i], snapshot[i], goals[i], neighbors, weights, v_max))
        if trace_rows is not None:
            for i, (st, ctl) in enumerate(zip(snapshot, controls)):
                trace_rows.append([t, i, st.rear_axle[0], st.rear_axle[1], list(st.headings), ctl.speed, ctl.steering])
        states = [step(configs[i], snapshot[i], controls[i], params.dt) for i in range(m)]
        t += 1
        done = observe(t)

    if trace_rows is not None:
        for i, st in enumerate(states):
            trace_rows.append([t, i, st.rear_axle[0], st.rear_axle[1], list(st.headings), None, None])
    record.final_step = t
    return RunResult(record, events, trace_rows)


def write_trace(path: str | Path, rows: list[list]) -> None:
    """Per-step CSV: step, hav, x1, y1, theta_0..theta_K, v, phi.

    HAVs with fewer trailers leave the trailing heading columns empty; the
    final state row of a run has empty control columns.
    """
    width = max(len(r[4]) for r in rows)
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["step", "hav", "x1", "y1"] + [f"theta_{k}" for k in range(width)] + ["v", "phi"])
        for s, i, x, y, headings, v, phi in rows:
            pad = [""] * (width - len(headings))
            w.writerow([s, i, repr(x), repr(y)] + [repr(h) for h in headings] + pad
                       + ["" if v is None else repr(v), "" if phi is None else repr(phi)])


def read_trace(path: str | Path) -> list[dict]:
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def make_scenario(params: ScenarioParams, index: int) -> Scenario:
    """First successfully generated scenario for experiment ``index``."""
    for attempt in range(MAX_SCENARIO_ATTEMPTS):
        try:
            return generate(params, index, attempt)
        except ScenarioGenerationError:
            continue
    raise ScenarioGenerationError(f"experiment {index}: {MAX_SCENARIO_ATTEMPTS} scenario attempts failed")


def run_experiment(params: ScenarioParams, index: int) -> ExperimentRecord:
    return run(make_scenario(params, index), params).record


def _run_job(job: tuple[ScenarioParams, int]) -> ExperimentRecord:
    return run_experiment(*job)


def run_batch(
    params: ScenarioParams,
    experiment_count: int,
    hav_count: Optional[int] = None,
    workers: int = 1,
    first_index: int = 0,
) -> list[ExperimentRecord]:
    """Run ``experiment_count`` experiments; records come back in index order."""
    if experiment_count < 1:
        raise ValueError("experiment_count must be at least 1")
    if hav_count is not None and hav_count != params.hav_count:
        params = ScenarioParams.from_dict({**params.to_dict(), "hav_count": hav_count})
    jobs = [(params, first_index + i) for i in range(experiment_count)]
    if workers <= 1:
        return [_run_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
