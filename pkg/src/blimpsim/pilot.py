"""Scripted command sources and command-log replay.

Every pilot is stepped once per simulation tick and either returns a
PilotCommand or None.  Issue times follow a human reaction cadence: at
least min_gap between commands plus a uniformly drawn jitter, so no
scripted pilot can command faster than a person plausibly would.

Randomness comes from numpy's PCG64 stream seeded per pilot, which is
documented, cross-platform, and reproducible; the algorithm identifier
below is recorded in run metadata so a trace names the generator that
produced it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .core import (
    BlimpState,
    NonMonotoneLog,
    PilotCommand,
    clamp_command,
)

RNG_ALGORITHM = "pcg64"


@dataclass(frozen=True)
class ReactionModel:
    """Human cadence: min_gap floor plus uniform jitter, seeded.

    The 200 ms default matches typical human reaction time; stress
    tests may lower it explicitly.
    """

    min_gap: float = 0.200
    jitter: float = 0.050
    seed: int = 0

    def __post_init__(self):
        if self.min_gap < 0 or self.jitter < 0:
            raise ValueError("min_gap and jitter must be >= 0")


@dataclass(frozen=True)
class WaypointPlan:
    waypoints: Tuple[Tuple[float, float, float], ...]
    capture_radius: float = 0.5
    speed_scale: float = 1.0

    def __post_init__(self):
        if len(self.waypoints) == 0:
            raise ValueError("plan needs at least one waypoint")
        if self.capture_radius <= 0:
            raise ValueError("capture_radius must be > 0")
        if not (0.0 < self.speed_scale <= 1.0):
            raise ValueError("speed_scale must be in (0, 1]")


class _CadencePilot:
    """Shared cadence bookkeeping.  Subclasses draw the command body."""

    def __init__(self, rm: ReactionModel):
        self.rm = rm
        self.rng = np.random.Generator(np.random.PCG64(rm.seed))
        self.last_issue = -math.inf
        self.gap = rm.min_gap  # gap for the first command is irrelevant

    def _due(self, now: float) -> bool:
        return now - self.last_issue >= self.gap - 1e-12

    def _mark_issued(self, now: float) -> None:
        self.last_issue = now
        self.gap = self.rm.min_gap + float(self.rng.uniform(0.0, self.rm.jitter))


class ChaoticPilot(_CadencePilot):
    """Uniform random stick mashing at the reaction cadence.

    Excites the pendulum swing: full-range direction reversals and yaw
    input every couple hundred milliseconds, the worst case for an
    unassisted blimp.  Draw order per command is dir_x, dir_y, vz, yaw,
    then the next gap's jitter, so streams reproduce exactly per seed.
    """

    def step(self, s: BlimpState, now: float) -> Optional[PilotCommand]:
        if not self._due(now):
            return None
        dir_x = float(self.rng.uniform(-1.0, 1.0))
        dir_y = float(self.rng.uniform(-1.0, 1.0))
        vz = float(self.rng.uniform(-0.5, 0.5))
        yaw = float(self.rng.uniform(-1.0, 1.0))
        self._mark_issued(now)
        return clamp_command(PilotCommand(dir=(dir_x, dir_y), vz=vz,
                                          yaw=yaw, t_issued=now))


class WaypointPilot(_CadencePilot):
    """Steers toward the current waypoint at the reaction cadence.

    dir is the planar unit vector toward the waypoint times speed_scale;
    vz is proportional to altitude error at 0.5 per meter, clamped.
    Advances when within capture_radius (3D) and goes quiet once the
    plan is exhausted.
    """

    def __init__(self, plan: WaypointPlan, rm: ReactionModel):
        super().__init__(rm)
        self.plan = plan
        self.index = 0

    def step(self, s: BlimpState, now: float) -> Optional[PilotCommand]:
        while self.index < len(self.plan.waypoints):
            wx, wy, wz = self.plan.waypoints[self.index]
            d3 = math.sqrt((wx - s.p_xy[0]) ** 2 + (wy - s.p_xy[1]) ** 2
                           + (wz - s.z) ** 2)
            if d3 > self.plan.capture_radius:
                break
            self.index += 1
        if self.index >= len(self.plan.waypoints):
            return None
        if not self._due(now):
            return None
        wx, wy, wz = self.plan.waypoints[self.index]
        ex, ey = wx - s.p_xy[0], wy - s.p_xy[1]
        dist = math.hypot(ex, ey)
        if dist > 1e-12:
            dir_xy = (self.plan.speed_scale * ex / dist,
                      self.plan.speed_scale * ey / dist)
        else:
            dir_xy = (0.0, 0.0)
        vz = max(-1.0, min(1.0, 0.5 * (wz - s.z)))
        self._mark_issued(now)
        return clamp_command(PilotCommand(dir=dir_xy, vz=vz, yaw=0.0,
                                          t_issued=now))


class ReplayPilot:
    """Re-issues a recorded command stream at the recorded times."""

    def __init__(self, commands: Sequence[PilotCommand]):
        last = -math.inf
        for c in commands:
            if c.t_issued <= last:
                raise NonMonotoneLog(
                    f"command at t={c.t_issued} not after t={last}")
            last = c.t_issued
        self.commands = list(commands)
        self.index = 0

    def step(self, s: BlimpState, now: float) -> Optional[PilotCommand]:
        out = None
        while (self.index < len(self.commands)
               and self.commands[self.index].t_issued <= now + 1e-9):
            out = self.commands[self.index]
            self.index += 1
        return out


class NullPilot:
    """Issues nothing; the zero-command baseline."""

    def step(self, s: BlimpState, now: float) -> Optional[PilotCommand]:
        return None


COMMAND_LOG_HEADER = "t,dir_x,dir_y,vz,yaw"


def write_command_log(commands: Sequence[PilotCommand], path: str) -> None:
    """One line per command: t (6 decimals), dir_x, dir_y, vz, yaw."""
    last = -math.inf
    lines = [COMMAND_LOG_HEADER]
    for c in commands:
        if c.t_issued <= last:
            raise NonMonotoneLog(
                f"command at t={c.t_issued} not after t={last}")
        last = c.t_issued
        lines.append(f"{c.t_issued:.6f},{c.dir[0]!r},{c.dir[1]!r},"
                     f"{c.vz!r},{c.yaw!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_command_log(path: str) -> List[PilotCommand]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != COMMAND_LOG_HEADER:
        raise ValueError(f"{path}: missing command log header")
    out: List[PilotCommand] = []
    last = -math.inf
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 5:
            raise ValueError(f"{path}: bad record {ln!r}")
        t, dx, dy, vz, yaw = (float(x) for x in parts)
        if t <= last:
            raise NonMonotoneLog(f"{path}: t={t} not after t={last}")
        last = t
        out.append(PilotCommand(dir=(dx, dy), vz=vz, yaw=yaw, t_issued=t))
    return out
