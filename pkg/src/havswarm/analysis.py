"""Post-hoc statistics over experiment records.

Rates are per HAV, not per experiment.  Histograms use fixed bins:

* trailer count: unit bins centred on 1..10 (edges 0.5, 1.5, ..., 10.5)
* joint-position and length-difference metrics: 10 uniform bins on [0, 1]
* time steps to a goal: 20 uniform bins on [0, max_steps]
* goal-hit distance / heading difference: 10 uniform bins on [0, d_e] / [0, d_h]

The last bin of every histogram is closed on the right.
"""
from __future__ import annotations

import csv
import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class CloseMiss(enum.Enum):
    NONE = "None"
    HEADING = "HeadingCloseMiss"
    EUCLIDEAN = "EuclideanCloseMiss"


def classify_close_miss(distance: float, heading_diff: float, d_e: float = 0.5, d_h: float = 0.1) -> CloseMiss:
    if distance < d_e and d_h <= heading_diff < 2 * d_h:
        return CloseMiss.HEADING
    if heading_diff < d_h and d_e <= distance < 2 * d_e:
        return CloseMiss.EUCLIDEAN
    return CloseMiss.NONE


def _lengths(config) -> list[float]:
    if hasattr(config, "segment_lengths"):
        return list(config.segment_lengths)
    return [config.truck_length] + list(config.trailer_lengths)


def joint_position_metric(config, joint: int) -> float:
    """Share of the HAV length ahead of joint ``joint`` (1-based, behind segment joint-1)."""
    lengths = _lengths(config)
    if not 1 <= joint < len(lengths):
        raise ValueError(f"joint must lie in 1..{len(lengths) - 1}")
    return sum(lengths[:joint]) / sum(lengths)


def length_difference_metric(config) -> float:
    """Summed absolute length change between consecutive segments over total length."""
    lengths = _lengths(config)
    return sum(abs(b - a) for a, b in zip(lengths, lengths[1:])) / sum(lengths)


@dataclass
class Histogram:
    name: str
    edges: list[float]
    counts: dict[str, list[int]] = field(default_factory=dict)

    def add(self, series: str, values: Sequence[float]) -> None:
        counts, _ = np.histogram(np.asarray(values, dtype=float), bins=np.asarray(self.edges))
        self.counts[series] = [int(c) for c in counts]

    def to_dict(self) -> dict:
        return {"name": self.name, "edges": self.edges, "counts": self.counts}

    def write_csv(self, path: str | Path) -> None:
        series = sorted(self.counts)
        with open(path, "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["bin_lo", "bin_hi"] + series)
            for k, (lo, hi) in enumerate(zip(self.edges, self.edges[1:])):
                w.writerow([repr(lo), repr(hi)] + [self.counts[s][k] for s in series])

    @classmethod
    def read_csv(cls, path: str | Path, name: str | None = None) -> "Histogram":
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
        header, body = rows[0], rows[1:]
        series = header[2:]
        edges = [float(r[0]) for r in body] + [float(body[-1][1])] if body else []
        h = cls(name or Path(path).stem, edges)
        for k, s in enumerate(series):
            h.counts[s] = [int(r[2 + k]) for r in body]
        return h


def _uniform_edges(lo: float, hi: float, n: int) -> list[float]:
    return [float(v) for v in np.linspace(lo, hi, n + 1)]


TRAILER_EDGES = [k + 0.5 for k in range(11)]


def _rate(num: int, den: int) -> float:
    return num / den if den else 0.0


def _hav_rows(records) -> list[tuple]:
    rows = []
    for r in records:
        for h in r.havs:
            rows.append((r, h))
    return rows


def cohort_summary(records: Iterable, max_steps: int = 20_000, d_e: float = 0.5, d_h: float = 0.1) -> dict:
    """Rates and histograms for one cohort (experiments sharing an HAV count)."""
    records = sorted(records, key=lambda r: (r.seed, r.experiment_index))
    rows = _hav_rows(records)
    n = len(rows)
    havs = [h for _, h in rows]

    def count(pred) -> int:
        return sum(1 for h in havs if pred(h))

    hc_states = [sum(h.heading_close_miss_steps[k] for h in havs) for k in range(2)]
    ec_states = [sum(h.euclidean_close_miss_steps[k] for h in havs) for k in range(2)]
    missed = [[h for h in havs if not h.goal_hit[k]] for k in range(2)]
    cm_missed = [[h for h in missed[k] if h.heading_close_miss_steps[k] + h.euclidean_close_miss_steps[k] > 0]
                 for k in range(2)]

    rates = {
        "havs": n,
        "experiments": len(records),
        "jackknife_rate": _rate(count(lambda h: h.jackknifed), n),
        "first_goal_rate": _rate(count(lambda h: h.goal_hit[0]), n),
        "second_goal_rate": _rate(count(lambda h: h.goal_hit[1]), n),
        "potential_collision_rate": _rate(count(lambda h: h.potential_collision), n),
        "actual_collision_rate": _rate(count(lambda h: h.actual_collision), n),
        "jackknifed_havs": count(lambda h: h.jackknifed),
        "first_goal_hits": count(lambda h: h.goal_hit[0]),
        "second_goal_hits": count(lambda h: h.goal_hit[1]),
        "potential_collision_havs": count(lambda h: h.potential_collision),
        "actual_collision_havs": count(lambda h: h.actual_collision),
    }
    close_miss = {}
    for k, tag in enumerate(("first_goal", "second_goal")):
        total_states = hc_states[k] + ec_states[k]
        close_miss[tag] = {
            "heading_states": hc_states[k],
            "euclidean_states": ec_states[k],
            "heading_fraction": _rate(hc_states[k], total_states),
            "euclidean_fraction": _rate(ec_states[k], total_states),
            "close_miss_havs": count(lambda h, k=k: h.heading_close_miss_steps[k] + h.euclidean_close_miss_steps[k] > 0),
            "missed_goals": len(missed[k]),
            "missed_with_close_miss": len(cm_missed[k]),
        }

    hists = _histograms(rows, max_steps, d_e, d_h)
    return {"rates": rates, "close_miss": close_miss, "histograms": {h.name: h.to_dict() for h in hists}}, hists


def _histograms(rows, max_steps: int, d_e: float, d_h: float) -> list[Histogram]:
    havs = [h for _, h in rows]
    jack = [h for h in havs if h.jackknifed]
    unit = _uniform_edges(0.0, 1.0, 10)

    trailers = Histogram("trailer_count", TRAILER_EDGES)
    trailers.add("all", [h.trailer_count for h in havs])
    trailers.add("jackknifed", [h.trailer_count for h in jack])

    ldm = Histogram("length_difference_metric", unit)
    ldm.add("all", [length_difference_metric(h) for h in havs])
    ldm.add("jackknifed", [length_difference_metric(h) for h in jack])

    jpm = Histogram("joint_position_metric", unit)
    jpm.add("all_joints", [joint_position_metric(h, j) for h in havs for j in range(1, h.trailer_count + 1)])
    jpm.add("jackknifed_joints", [joint_position_metric(h, j) for h in jack for j in h.jackknife_joints])

    steps = Histogram("goal_time_steps", _uniform_edges(0.0, float(max_steps), 20))
    first = [h.goal_hit_step[0] for h in havs if h.goal_hit[0]]
    second = [h.goal_hit_step[1] - r.phase_switch_step for r, h in rows
              if h.goal_hit[1] and r.phase_switch_step is not None]
    steps.add("first_goal", first)
    steps.add("second_goal", second)

    dist = Histogram("goal_hit_distance", _uniform_edges(0.0, d_e, 10))
    head = Histogram("goal_hit_heading_diff", _uniform_edges(0.0, d_h, 10))
    for k, tag in enumerate(("first_goal", "second_goal")):
        dist.add(tag, [h.goal_hit_distance[k] for h in havs if h.goal_hit[k]])
        head.add(tag, [h.goal_hit_heading_diff[k] for h in havs if h.goal_hit[k]])
    return [trailers, ldm, jpm, steps, dist, head]


def aggregate(records: Sequence, max_steps: int = 20_000, d_e: float = 0.5, d_h: float = 0.1) -> "SummaryReport":
    if not records:
        raise ValueError("no records to aggregate")
    cohorts: dict[int, list] = {}
    for r in records:
        cohorts.setdefault(r.hav_count, []).append(r)
    report = SummaryReport()
    for m in sorted(cohorts):
        summary, hists = cohort_summary(cohorts[m], max_steps, d_e, d_h)
        name = {1: "single_hav", 2: "two_hav"}.get(m, f"{m}_hav")
        report.cohorts[name] = summary
        report.histograms[name] = hists
    return report


@dataclass
class SummaryReport:
    cohorts: dict[str, dict] = field(default_factory=dict)
    histograms: dict[str, list[Histogram]] = field(default_factory=dict)

    def rates(self, cohort: str) -> dict:
        return self.cohorts[cohort]["rates"]

    def to_dict(self) -> dict:
        return {"schema_version": 1, "cohorts": self.cohorts}

    def write(self, report_path: str | Path, hist_dir: str | Path | None = None) -> None:
        Path(report_path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        if hist_dir is not None:
            hist_dir = Path(hist_dir)
            hist_dir.mkdir(parents=True, exist_ok=True)
            for cohort, hists in self.histograms.items():
                for h in hists:
                    h.write_csv(hist_dir / f"{cohort}__{h.name}.csv")
