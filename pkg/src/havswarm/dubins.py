"""Shortest Dubins paths (forward-only, bounded curvature) between planar poses.

Closed forms work in the normalised frame where the start sits at the origin,
the goal lies on the positive x-axis at distance ``d`` (in turn radii), and
``alpha``/``beta`` are the start/goal headings relative to that axis.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

from .kinematics import TWO_PI, Pose, wrap_angle

WORDS = ("LSL", "RSR", "LSR", "RSL", "RLR", "LRL")

# arcs this close to a full turn are rounding noise around zero
_ARC_EPS = 1e-12


def mod2pi(angle: float) -> float:
    a = angle % TWO_PI
    if a > TWO_PI - _ARC_EPS:
        return 0.0
    return a


class Turn(enum.Enum):
    LEFT = "Left"
    RIGHT = "Right"
    STRAIGHT = "Straight"


@dataclass(frozen=True)
class DubinsPath:
    word: str
    segment_params: tuple[float, float, float]
    radius: float

    @property
    def length(self) -> float:
        t, p, q = self.segment_params
        if self.word[1] == "S":
            return self.radius * (t + q) + p
        return self.radius * (t + p + q)

    def segment_lengths(self) -> tuple[float, float, float]:
        """Arc-length of each of the three segments, in meters."""
        t, p, q = self.segment_params
        r = self.radius
        if self.word[1] == "S":
            return (r * t, p, r * q)
        return (r * t, r * p, r * q)


Params = Optional[tuple[float, float, float]]


# (alpha, beta, d, sin a, sin b, cos a, cos b, cos(a - b))
_Frame = tuple


def _frame(alpha: float, beta: float, d: float) -> _Frame:
    return (alpha, beta, d, math.sin(alpha), math.sin(beta), math.cos(alpha), math.cos(beta),
            math.cos(alpha - beta))


def _lsl(f: _Frame) -> Params:
    alpha, beta, d, sa, sb, ca, cb, cab = f
    p_sq = 2 + d * d - 2 * cab + 2 * d * (sa - sb)
    if p_sq < 0:
        return None
    tmp = math.atan2(cb - ca, d + sa - sb)
    return mod2pi(tmp - alpha), math.sqrt(p_sq), mod2pi(beta - tmp)


def _rsr(f: _Frame) -> Params:
    alpha, beta, d, sa, sb, ca, cb, cab = f
    p_sq = 2 + d * d - 2 * cab + 2 * d * (sb - sa)
    if p_sq < 0:
        return None
    tmp = math.atan2(ca - cb, d - sa + sb)
    return mod2pi(alpha - tmp), math.sqrt(p_sq), mod2pi(tmp - beta)


def _lsr(f: _Frame) -> Params:
    alpha, beta, d, sa, sb, ca, cb, cab = f
    p_sq = -2 + d * d + 2 * cab + 2 * d * (sa + sb)
    if p_sq < 0:
        return None
    p = math.sqrt(p_sq)
    tmp = math.atan2(-ca - cb, d + sa + sb) - math.atan2(-2.0, p)
    return mod2pi(tmp - alpha), p, mod2pi(tmp - beta)


def _rsl(f: _Frame) -> Params:
    alpha, beta, d, sa, sb, ca, cb, cab = f
    p_sq = -2 + d * d + 2 * cab - 2 * d * (sa + sb)
    if p_sq < 0:
        return None
    p = math.sqrt(p_sq)
    tmp = math.atan2(ca + cb, d - sa - sb) - math.atan2(2.0, p)
    return mod2pi(alpha - tmp), p, mod2pi(beta - tmp)


def _rlr(f: _Frame) -> Params:
    alpha, beta, d, sa, sb, ca, cb, cab = f
    tmp = (6.0 - d * d + 2 * cab + 2 * d * (sa - sb)) / 8.0
    if abs(tmp) > 1:
        return None
    p = mod2pi(TWO_PI - math.acos(tmp))
    t = mod2pi(alpha - math.atan2(ca - cb, d - sa + sb) + p / 2.0)
    return t, p, mod2pi(alpha - beta - t + p)


def _lrl(f: _Frame) -> Params:
    alpha, beta, d, sa, sb, ca, cb, cab = f
    tmp = (6.0 - d * d + 2 * cab + 2 * d * (sb - sa)) / 8.0
    if abs(tmp) > 1:
        return None
    p = mod2pi(TWO_PI - math.acos(tmp))
    t = mod2pi(-alpha + math.atan2(-ca + cb, d + sa - sb) + p / 2.0)
    return t, p, mod2pi(beta - alpha - t + p)


_SOLVERS: dict[str, Callable[[_Frame], Params]] = {
    "LSL": _lsl,
    "RSR": _rsr,
    "LSR": _lsr,
    "RSL": _rsl,
    "RLR": _rlr,
    "LRL": _lrl,
}


def normalize(start: Pose, goal: Pose, radius: float) -> tuple[float, float, float]:
    """Return (alpha, beta, d) of the pose pair in the normalised frame."""
    dx, dy = goal.x - start.x, goal.y - start.y
    d = math.hypot(dx, dy) / radius
    theta = mod2pi(math.atan2(dy, dx)) if d > 0 else 0.0
    return mod2pi(start.heading - theta), mod2pi(goal.heading - theta), d


def word_path(word: str, start: Pose, goal: Pose, radius: float) -> Optional[DubinsPath]:
    """Path for one fixed word, or None when that word cannot connect the poses."""
    return _word_path(word, _frame(*normalize(start, goal, radius)), radius)


def _word_path(word: str, frame: _Frame, radius: float) -> Optional[DubinsPath]:
    params = _SOLVERS[word](frame)
    if params is None:
        return None
    t, p, q = params
    if word[1] == "S":
        p *= radius
    return DubinsPath(word, (t, p, q), radius)


def shortest_path(start: Pose, goal: Pose, radius: float) -> DubinsPath:
    if radius <= 0:
        raise ValueError("turn radius must be positive")
    if start == goal:
        return DubinsPath("LSL", (0.0, 0.0, 0.0), radius)
    frame = _frame(*normalize(start, goal, radius))
    best, best_len = None, math.inf
    for word in WORDS:
        params = _SOLVERS[word](frame)
        if params is None:
            continue
        t, p, q = params
        # normalised length; ties keep the earlier word
        n_len = t + p + q
        if n_len < best_len:
            best, best_len = (word, params), n_len
    assert best is not None  # CSC words always exist
    word, (t, p, q) = best
    if word[1] == "S":
        p *= radius
    return DubinsPath(word, (t, p, q), radius)


def initial_turn(path: DubinsPath) -> Turn:
    if path.segment_params[0] <= 0.0:
        return Turn.STRAIGHT
    return Turn.LEFT if path.word[0] == "L" else Turn.RIGHT


def _advance(x: float, y: float, h: float, kind: str, amount: float, radius: float):
    if kind == "S":
        return x + amount * math.cos(h), y + amount * math.sin(h), h
    sign = 1.0 if kind == "L" else -1.0
    h1 = h + sign * amount
    # exact chord for an arc of angle ``amount``
    x += sign * radius * (math.sin(h1) - math.sin(h))
    y -= sign * radius * (math.cos(h1) - math.cos(h))
    return x, y, h1


def endpoint(start: Pose, path: DubinsPath) -> Pose:
    """Pose reached by following ``path`` from ``start`` exactly."""
    x, y, h = start.x, start.y, start.heading
    for kind, amount in zip(path.word, path.segment_params):
        x, y, h = _advance(x, y, h, kind, amount, path.radius)
    return Pose(x, y, h)


def sample(start: Pose, path: DubinsPath, spacing: float) -> list[Pose]:
    """Poses along the path every ``spacing`` meters, including the end."""
    out = [start]
    x, y, h = start.x, start.y, start.heading
    for kind, amount, seg_len in zip(path.word, path.segment_params, path.segment_lengths()):
        n = max(1, int(math.ceil(seg_len / spacing)))
        for _ in range(n):
            x, y, h = _advance(x, y, h, kind, amount / n, path.radius)
            out.append(Pose(x, y, wrap_angle(h)))
    return out
