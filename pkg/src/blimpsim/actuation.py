"""Thrust allocation for the X-shaped gondola.

Six forward-only motors: four horizontal thrusters pointing along the
diagonals (45, 135, 225, 315 degrees in the body frame) and a vertical
pair.  Each vertical motor pushes in a fixed direction along z; in the
default layout one pushes down (+z) and one up, so the pair spans both
signs of f_z with non-negative thrusts.  A layout whose vertical motors
share a direction splits the demand equally between them instead.

The horizontal subproblem (f_x, f_y, tau_z from four thrusts) is an
equality-constrained non-negative least-squares problem.  With only
four thrusters the 16 possible active sets can be enumerated outright,
which makes the solution exact, deterministic, and free of iterative
solver state.  Per-motor limits are enforced afterwards by scaling the
whole wrench radially: direction is preserved, magnitude sacrificed, so
the pilot's perceived heading never changes under saturation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np

from .core import BlimpParams, MotorCommand, Vec2, Wrench

_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class ThrusterLayout:
    """Geometry of the six motors.

    angles : pointing directions of the horizontal thrusters (rad)
    positions : mounting points of the horizontal thrusters (m, body xy)
    vertical_offsets : lever arms of the vertical pair (m); default 0 so
        the pair produces no roll or pitch torque (the model has neither)
    vertical_dirs : thrust direction of each vertical motor along +z
        (+1 pushes down, -1 pushes up); default one of each
    """

    angles: Tuple[float, float, float, float]
    positions: Tuple[Vec2, Vec2, Vec2, Vec2]
    vertical_offsets: Vec2 = (0.0, 0.0)
    vertical_dirs: Vec2 = (1.0, -1.0)

    def __post_init__(self):
        sx = sum(math.cos(a) for a in self.angles)
        sy = sum(math.sin(a) for a in self.angles)
        if abs(sx) > 1e-9 or abs(sy) > 1e-9:
            raise ValueError("horizontal pointing directions must sum to zero")
        radii = [math.hypot(px, py) for px, py in self.positions]
        if max(radii) - min(radii) > 1e-9:
            raise ValueError("mounting positions must share one radius")
        if any(abs(d) != 1.0 for d in self.vertical_dirs):
            raise ValueError("vertical_dirs components must be +1 or -1")


def default_layout(r3: float) -> ThrusterLayout:
    """X layout at radius r3 with alternating yaw moment arms.

    Thruster k points along 45 + 90k degrees and is mounted one corner
    away, so the torque coefficients alternate (+r3, -r3, +r3, -r3):
    opposite pairs drive translation, alternating pairs drive yaw.
    """
    angles = tuple(math.radians(45.0 + 90.0 * k) for k in range(4))
    pos_angles = (math.radians(-45.0), math.radians(225.0),
                  math.radians(135.0), math.radians(45.0))
    positions = tuple((r3 * math.cos(b), r3 * math.sin(b)) for b in pos_angles)
    return ThrusterLayout(angles=angles, positions=positions)


@dataclass(frozen=True)
class AllocationResult:
    motors: MotorCommand
    saturated: bool


@lru_cache(maxsize=32)
def _horizontal_matrix(layout: ThrusterLayout) -> np.ndarray:
    """Columns map thrust k to (f_x, f_y, tau_z)."""
    cols = []
    for (a, (px, py)) in zip(layout.angles, layout.positions):
        dx, dy = math.cos(a), math.sin(a)
        cols.append((dx, dy, px * dy - py * dx))
    return np.array(cols, dtype=float).T


@lru_cache(maxsize=32)
def _support_pinvs(layout: ThrusterLayout):
    """Pseudo-inverse of every column subset, in fixed enumeration order."""
    A = _horizontal_matrix(layout)
    table = []
    for mask in range(1, 16):
        idx = tuple(k for k in range(4) if mask >> k & 1)
        sub = A[:, idx]
        table.append((idx, sub, np.linalg.pinv(sub)))
    return table


def _solve_horizontal(w3: np.ndarray, layout: ThrusterLayout):
    """Exact min-norm non-negative solution of A t = w3.

    Every candidate support's minimum-norm solution is enumerated; the
    optimum's own support is among them, so the cheapest feasible
    candidate is the true optimum.  If no support reproduces w3 (demand
    outside the positive span of the columns) the smallest-residual
    candidate is returned and flagged infeasible.
    """
    scale = max(1.0, float(np.max(np.abs(w3))))
    ftol = _RESIDUAL_TOL * scale
    # Zero thrust is the mask-0 candidate; also the fallback for w3 = 0.
    best_feas = None    # (cost, thrusts)
    best_infeas = (float(np.max(np.abs(w3))), 0.0, np.zeros(4))
    if best_infeas[0] <= ftol:
        best_feas = (0.0, np.zeros(4))
    for idx, sub, pinv in _support_pinvs(layout):
        x = pinv @ w3
        if float(np.min(x)) < -1e-12 * scale:
            continue
        x = np.maximum(x, 0.0)
        r = float(np.max(np.abs(sub @ x - w3)))
        cost = float(x @ x)
        t = np.zeros(4)
        t[list(idx)] = x
        if r <= ftol:
            if best_feas is None or cost < best_feas[0] - 1e-15:
                best_feas = (cost, t)
        elif (r, cost) < best_infeas[:2]:
            best_infeas = (r, cost, t)
    if best_feas is not None:
        return best_feas[1], True
    return best_infeas[2], False


def allocate(w: Wrench, layout: ThrusterLayout, p: BlimpParams) -> AllocationResult:
    """Thrusts realizing ``w`` with minimal sum of squares.

    Vertical demand goes to the motor(s) whose direction matches the
    sign of f_z, split equally when more than one matches.  If the
    demand cannot be met exactly (outside the positive span, or above
    the per-motor limit t_max) the result is scaled radially and marked
    saturated; it is never an error.
    """
    w3 = np.array([w.f_xy[0], w.f_xy[1], w.tau_z], dtype=float)
    h, feasible = _solve_horizontal(w3, layout)
    saturated = not feasible

    v = [0.0, 0.0]
    if w.f_z != 0.0:
        matching = [j for j in (0, 1)
                    if layout.vertical_dirs[j] * w.f_z > 0.0]
        if matching:
            share = abs(w.f_z) / len(matching)
            for j in matching:
                v[j] = share
        else:
            saturated = True

    peak = max(float(np.max(h)), v[0], v[1])
    if peak > p.t_max:
        s = p.t_max / peak
        h = h * s
        v = [x * s for x in v]
        saturated = True

    motors = MotorCommand(h=tuple(float(x) for x in h), v=(v[0], v[1]))
    return AllocationResult(motors=motors, saturated=saturated)


def wrench_of(m: MotorCommand, layout: ThrusterLayout) -> Wrench:
    """Forward map: exact wrench produced by the given thrusts."""
    fx = fy = tau = 0.0
    for t, a, (px, py) in zip(m.h, layout.angles, layout.positions):
        dx, dy = math.cos(a), math.sin(a)
        fx += t * dx
        fy += t * dy
        tau += t * (px * dy - py * dx)
    fz = sum(d * t for d, t in zip(layout.vertical_dirs, m.v))
    return Wrench(f_xy=(fx, fy), f_z=fz, tau_z=tau)


def layout_to_dict(layout: ThrusterLayout) -> dict:
    return {
        "angles": list(layout.angles),
        "positions": [list(p) for p in layout.positions],
        "vertical_offsets": list(layout.vertical_offsets),
        "vertical_dirs": list(layout.vertical_dirs),
    }


def layout_from_dict(d: dict, base: ThrusterLayout | None = None) -> ThrusterLayout:
    """Layout from a mapping; fields absent from ``d`` come from ``base``."""
    from .core import InvalidScenario

    known = {"angles", "positions", "vertical_offsets", "vertical_dirs"}
    unknown = sorted(set(d) - known)
    if unknown:
        raise InvalidScenario(f"unknown layout keys: {', '.join(unknown)}")
    kwargs = {} if base is None else layout_to_dict(base)
    kwargs.update(d)
    try:
        return ThrusterLayout(
            angles=tuple(float(a) for a in kwargs["angles"]),
            positions=tuple((float(x), float(y)) for x, y in kwargs["positions"]),
            vertical_offsets=tuple(float(x) for x in kwargs.get("vertical_offsets", (0.0, 0.0))),
            vertical_dirs=tuple(float(x) for x in kwargs.get("vertical_dirs", (1.0, -1.0))),
        )
    except (TypeError, ValueError, KeyError) as e:
        raise InvalidScenario(f"invalid layout: {e}") from e
