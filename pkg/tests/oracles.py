"""Independent reference implementations used by the tests.

None of these share code with the package: Dubins paths are built from
circle centres and tangent geometry, chain contact is found by dense point
sampling, and the Rayleigh trailer-count law is integrated numerically.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate

TAU = 2.0 * math.pi


def _ccw(angle: float) -> float:
    a = angle % TAU
    return 0.0 if a > TAU - 1e-12 else a


def _turn(kind: str, h_from: float, h_to: float) -> float:
    return _ccw(h_to - h_from) if kind == "L" else _ccw(h_from - h_to)


def _centre(x, y, h, kind, r):
    s = 1.0 if kind == "L" else -1.0
    return np.array([x - s * r * math.sin(h), y + s * r * math.cos(h)])


def _tangent_heading(centre, point, kind):
    ang = math.atan2(point[1] - centre[1], point[0] - centre[0])
    return ang + math.pi / 2 if kind == "L" else ang - math.pi / 2


def geometric_candidates(start, goal, r):
    """Lengths of every CSC and CCC candidate built from turning circles.

    ``start``/``goal`` are (x, y, heading).  Both middle-circle branches are
    tried for CCC words, so the minimum is the true Dubins optimum.
    """
    out = {}
    for word in ("LSL", "RSR", "LSR", "RSL"):
        a, b = word[0], word[2]
        c1 = _centre(*start, a, r)
        c2 = _centre(*goal, b, r)
        v = c2 - c1
        dist = float(np.hypot(*v))
        base = math.atan2(v[1], v[0])
        if a == b and dist == 0.0:
            # concentric circles: one arc does it
            out.setdefault(word, []).append(r * _turn(a, start[2], goal[2]))
            continue
        if a == b:
            straight, psi = dist, base
        else:
            if dist < 2 * r:
                continue
            straight = math.sqrt(max(dist * dist - 4 * r * r, 0.0))
            sign = 1.0 if a == "L" else -1.0
            psi = base + sign * math.atan2(2 * r, straight)
        t = _turn(a, start[2], psi)
        q = _turn(b, psi, goal[2])
        out.setdefault(word, []).append(r * (t + q) + straight)
    for word in ("RLR", "LRL"):
        outer, mid = word[0], word[1]
        c1 = _centre(*start, outer, r)
        c3 = _centre(*goal, outer, r)
        v = c3 - c1
        dist = float(np.hypot(*v))
        if dist > 4 * r:
            continue
        half = math.sqrt(max(4 * r * r - dist * dist / 4, 0.0))
        perp = np.array([-v[1], v[0]]) / dist if dist > 0 else np.array([0.0, 1.0])
        for sgn in (1.0, -1.0):
            c2 = (c1 + c3) / 2 + sgn * half * perp
            p1, p2 = (c1 + c2) / 2, (c2 + c3) / 2
            psi1 = _tangent_heading(c1, p1, outer)
            psi2 = _tangent_heading(c3, p2, outer)
            t = _turn(outer, start[2], psi1)
            p = _turn(mid, psi1, psi2)
            q = _turn(outer, psi2, goal[2])
            out.setdefault(word, []).append(r * (t + p + q))
    return out


def geometric_shortest_length(start, goal, r) -> float:
    return min(min(v) for v in geometric_candidates(start, goal, r).values())


def sample_chain(points, spacing):
    """Points every ``spacing`` along a polyline, endpoints included."""
    out = []
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        n = max(1, int(math.ceil(math.hypot(x1 - x0, y1 - y0) / spacing)))
        for k in range(n + 1):
            s = k / n
            out.append((x0 + s * (x1 - x0), y0 + s * (y1 - y0)))
    return np.array(out)


def sampled_chain_distance(chain_a, chain_b, spacing=1e-3) -> float:
    """Smallest distance between the sample points of two polylines."""
    a = sample_chain(chain_a, spacing)
    b = sample_chain(chain_b, spacing)
    best = math.inf
    for k in range(0, len(a), 2048):
        d = np.hypot(a[k:k + 2048, None, 0] - b[None, :, 0], a[k:k + 2048, None, 1] - b[None, :, 1])
        best = min(best, float(d.min()))
    return best


def chains_touch_by_sampling(chain_a, chain_b, spacing=1e-3, tol=2e-3) -> bool:
    return sampled_chain_distance(chain_a, chain_b, spacing) <= tol


def rayleigh_count_probs(sigma: float, n_max: int) -> np.ndarray:
    """P(ceil(X) = n | 1 <= ceil(X) <= n_max) for X ~ Rayleigh(sigma), by quadrature."""
    pdf = lambda x: x / sigma**2 * math.exp(-x * x / (2 * sigma**2))
    mass = np.array([integrate.quad(pdf, n - 1, n)[0] for n in range(1, n_max + 1)])
    return mass / mass.sum()


def max_safe_speed_by_hand(l0, l1, phi_max, dt, beta_deg=75.0, limit_deg=90.0) -> float:
    beta = beta_deg * math.pi / 180
    gap = (limit_deg - beta_deg) * math.pi / 180
    return gap / (dt * abs(math.sin(beta) / l1 + math.tan(phi_max) / l0))
