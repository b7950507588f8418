"""Control stack: balancing PID, bang-bang yaw stabilizer, supervisor.

The assistive scheme is a three-mode hybrid machine driven by pilot
commands.  A command preempts whatever is running and starts a short
Balancing window in which a per-axis PID leans the blimp to the tilt
target implied by the stick; when the window expires the translational
output is frozen and a Stabilizing window lets the bang-bang controller
kill yaw rate; then the machine returns to Idle holding the frozen
trim.  Both windows together stay within the reaction window, so the
pilot never waits longer than that for the next command to take effect,
and with typical human command gaps the machine is already Idle when
the next command lands.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from .core import (
    BlimpParams,
    BlimpState,
    NonMonotoneClock,
    PilotCommand,
    Vec2,
    Wrench,
)
from .dynamics import bernoulli_force, thrust_for_balanced_pitch

# Deadlines are compared with this slack so a window that is an exact
# multiple of the tick period fires on the aligned tick despite float
# accumulation in now = k * dt.
_TIME_EPS = 1e-9


class Mode(str, enum.Enum):
    IDLE = "idle"
    BALANCING = "balancing"
    STABILIZING = "stabilizing"


@dataclass(frozen=True)
class PidGains:
    """Per-axis balancing gains; both tilt axes share one set."""

    kp: float = 1.5
    ki: float = 0.3
    kd: float = 0.4
    integral_limit: float = 0.5
    output_limit: float = 1.2

    def __post_init__(self):
        if self.kp < 0 or self.ki < 0 or self.kd < 0:
            raise ValueError("PID gains must be >= 0")
        if self.integral_limit <= 0 or self.output_limit <= 0:
            raise ValueError("PID limits must be > 0")


@dataclass(frozen=True)
class PidState:
    integral: Vec2 = (0.0, 0.0)
    prev_error: Vec2 = (0.0, 0.0)


@dataclass(frozen=True)
class BangBangConfig:
    """u is the torque magnitude; inside the deadband output is zero.

    The deadband is a chattering guard: without it the sign flips every
    tick once omega crosses zero.
    """

    u: float = 0.01
    deadband: float = 0.02

    def __post_init__(self):
        if self.u <= 0:
            raise ValueError("bang-bang torque magnitude u must be > 0")
        if self.deadband < 0:
            raise ValueError("deadband must be >= 0")


@dataclass(frozen=True)
class SupervisorConfig:
    t_balance: float = 0.100
    t_stabilize: float = 0.100
    reaction_window: float = 0.200

    def __post_init__(self):
        if self.t_balance <= 0 or self.t_stabilize < 0 or self.reaction_window <= 0:
            raise ValueError("supervisor windows must be positive")
        if self.t_balance + self.t_stabilize > self.reaction_window + _TIME_EPS:
            raise ValueError("t_balance + t_stabilize must fit in reaction_window")


@dataclass(frozen=True)
class ControlConfig:
    """Everything the supervisor needs besides physical parameters."""

    gains: PidGains = PidGains()
    bang_bang: BangBangConfig = BangBangConfig()
    supervisor: SupervisorConfig = SupervisorConfig()
    tilt_max: float = 0.15
    f_vmax: float = 0.4
    yaw_gain: float = 0.005

    def __post_init__(self):
        if self.tilt_max <= 0 or self.tilt_max >= math.pi / 2:
            raise ValueError("tilt_max must be in (0, pi/2)")
        if self.f_vmax < 0 or self.yaw_gain < 0:
            raise ValueError("f_vmax and yaw_gain must be >= 0")


@dataclass(frozen=True)
class SupervisorState:
    """Mode machine state.  held_wrench is the last translational output
    of a Balancing window, (f_x, f_y, f_z); it is what Idle and
    Stabilizing keep applying so the trim does not vanish mid-flight."""

    mode: Mode = Mode.IDLE
    phase_deadline: Optional[float] = None
    active_command: Optional[PilotCommand] = None
    held_wrench: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    last_now: float = -math.inf


def command_to_tilt_target(c: PilotCommand, tilt_max: float) -> Vec2:
    """Stick deflection to tilt target, linear per axis."""
    return (tilt_max * c.dir[0], tilt_max * c.dir[1])


def _clip(x: float, lim: float) -> float:
    return -lim if x < -lim else lim if x > lim else x


def balancing_step(target: Vec2, s: BlimpState, gains: PidGains,
                   st: PidState, dt: float, p: BlimpParams,
                   ) -> Tuple[Vec2, PidState]:
    """One PID update per tilt axis around the balanced-thrust feedforward.

    The derivative term acts on the measured tilt rate, not on the
    finite-differenced error, so a target jump (command preemption)
    cannot kick the output.  The integral is clamped after the update,
    which keeps |integral| <= integral_limit for any input sequence.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    force = [0.0, 0.0]
    integral = list(st.integral)
    err = [0.0, 0.0]
    for i in range(2):
        err[i] = target[i] - s.tilt[i]
        integral[i] = _clip(integral[i] + err[i] * dt, gains.integral_limit)
        f = (thrust_for_balanced_pitch(target[i], p)
             + gains.kp * err[i]
             + gains.ki * integral[i]
             - gains.kd * s.tilt_rate[i])
        force[i] = _clip(f, gains.output_limit)
    new_st = PidState(integral=(integral[0], integral[1]),
                      prev_error=(err[0], err[1]))
    return (force[0], force[1]), new_st


def bang_bang_step(omega_z: float, cfg: BangBangConfig) -> float:
    """Maximum opposing torque outside the deadband, zero inside."""
    if abs(omega_z) < cfg.deadband or omega_z == 0.0:
        return 0.0
    return -cfg.u if omega_z > 0.0 else cfg.u


def vertical_feedforward(c: PilotCommand, s: BlimpState, p: BlimpParams,
                         f_vmax: float) -> float:
    """Vertical demand plus cancellation of the Bernoulli descent force.

    Neutral stick therefore holds altitude during horizontal flight; the
    compensation term is negative (upward) whenever the blimp moves.
    """
    return c.vz * f_vmax - bernoulli_force(s.v_xy, p)


def reset(sup: Optional[SupervisorState] = None,
          ) -> Tuple[SupervisorState, PidState]:
    """Fresh Idle supervisor with zero held wrench and zero PID state."""
    return SupervisorState(), PidState()


def supervisor_step(sup: SupervisorState, pid_st: PidState,
                    incoming: Optional[PilotCommand], s: BlimpState,
                    now: float, ctrl: ControlConfig, p: BlimpParams,
                    dt: float = 0.01,
                    ) -> Tuple[Wrench, SupervisorState, PidState]:
    """Advance the mode machine one tick and produce the wrench.

    Order of evaluation: expired deadlines first (Balancing freezes its
    last output and hands over to Stabilizing; Stabilizing returns to
    Idle), then deadband early-exit, then preemption by an incoming
    command, which wins over everything and restarts Balancing with a
    fresh PID state on this very tick.
    """
    if now < sup.last_now:
        raise NonMonotoneClock(f"now={now} before previous {sup.last_now}")
    scfg = ctrl.supervisor
    mode = sup.mode
    deadline = sup.phase_deadline
    active = sup.active_command
    held = sup.held_wrench

    if mode is Mode.BALANCING and deadline is not None and now >= deadline - _TIME_EPS:
        mode = Mode.STABILIZING
        deadline = now + scfg.t_stabilize
    if mode is Mode.STABILIZING and deadline is not None and now >= deadline - _TIME_EPS:
        mode, deadline, active = Mode.IDLE, None, None
    if mode is Mode.STABILIZING and abs(s.omega_z) < ctrl.bang_bang.deadband:
        mode, deadline, active = Mode.IDLE, None, None

    if incoming is not None:
        mode = Mode.BALANCING
        deadline = now + scfg.t_balance
        active = incoming
        pid_st = PidState()

    if mode is Mode.BALANCING:
        assert active is not None
        target = command_to_tilt_target(active, ctrl.tilt_max)
        f_xy, pid_st = balancing_step(target, s, ctrl.gains, pid_st, dt, p)
        f_z = vertical_feedforward(active, s, p, ctrl.f_vmax)
        tau = ctrl.yaw_gain * active.yaw
        held = (f_xy[0], f_xy[1], f_z)
        wrench = Wrench(f_xy=f_xy, f_z=f_z, tau_z=tau)
    elif mode is Mode.STABILIZING:
        tau = bang_bang_step(s.omega_z, ctrl.bang_bang)
        wrench = Wrench(f_xy=(held[0], held[1]), f_z=held[2], tau_z=tau)
    else:
        wrench = Wrench(f_xy=(held[0], held[1]), f_z=held[2], tau_z=0.0)

    new_sup = SupervisorState(mode=mode, phase_deadline=deadline,
                              active_command=active, held_wrench=held,
                              last_now=now)
    return wrench, new_sup, pid_st


def control_to_dict(ctrl: ControlConfig) -> dict:
    return {
        "gains": {"kp": ctrl.gains.kp, "ki": ctrl.gains.ki, "kd": ctrl.gains.kd,
                  "integral_limit": ctrl.gains.integral_limit,
                  "output_limit": ctrl.gains.output_limit},
        "bang_bang": {"u": ctrl.bang_bang.u, "deadband": ctrl.bang_bang.deadband},
        "supervisor": {"t_balance": ctrl.supervisor.t_balance,
                       "t_stabilize": ctrl.supervisor.t_stabilize,
                       "reaction_window": ctrl.supervisor.reaction_window},
        "tilt_max": ctrl.tilt_max,
        "f_vmax": ctrl.f_vmax,
        "yaw_gain": ctrl.yaw_gain,
    }


def _merge_block(d: dict, block: str, cls, defaults):
    from .core import InvalidScenario

    sub = d.get(block)
    if sub is None:
        return defaults
    if not isinstance(sub, dict):
        raise InvalidScenario(f"control.{block} must be an object")
    known = {f for f in cls.__dataclass_fields__}
    unknown = sorted(set(sub) - known)
    if unknown:
        raise InvalidScenario(
            f"unknown control.{block} keys: {', '.join(unknown)}")
    kwargs = {k: getattr(defaults, k) for k in known}
    kwargs.update({k: float(v) for k, v in sub.items()})
    try:
        return cls(**kwargs)
    except ValueError as e:
        raise InvalidScenario(f"invalid control.{block}: {e}") from e


def control_from_dict(d: dict, base: Optional[ControlConfig] = None) -> ControlConfig:
    """ControlConfig from a nested mapping; absent fields come from ``base``."""
    from .core import InvalidScenario

    base = base or ControlConfig()
    known = {"gains", "bang_bang", "supervisor", "tilt_max", "f_vmax", "yaw_gain"}
    unknown = sorted(set(d) - known)
    if unknown:
        raise InvalidScenario(f"unknown control keys: {', '.join(unknown)}")
    gains = _merge_block(d, "gains", PidGains, base.gains)
    bb = _merge_block(d, "bang_bang", BangBangConfig, base.bang_bang)
    sup = _merge_block(d, "supervisor", SupervisorConfig, base.supervisor)
    try:
        return ControlConfig(
            gains=gains, bang_bang=bb, supervisor=sup,
            tilt_max=float(d.get("tilt_max", base.tilt_max)),
            f_vmax=float(d.get("f_vmax", base.f_vmax)),
            yaw_gain=float(d.get("yaw_gain", base.yaw_gain)),
        )
    except ValueError as e:
        raise InvalidScenario(f"invalid control config: {e}") from e
