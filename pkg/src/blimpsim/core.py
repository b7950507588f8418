"""Shared domain types for the blimp simulator.

Conventions used throughout the package:

* The +z axis points along gravity, so altitude z grows as the blimp
  descends and a positive f_z pushes the vehicle down.
* Planar quantities (position, velocity, tilt) are 2-vectors stored as
  plain float tuples.  Component i of ``tilt`` is the pendulum lean that
  accompanies acceleration along inertial axis i; the X-shaped actuation
  is symmetric, so both axes share identical dynamics.
* All types here are immutable values.  Anything stateful lives with the
  code that owns the state (controllers, pilots, the service session).

Units are SI unless noted: meters, seconds, newtons, radians.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from typing import Tuple

Vec2 = Tuple[float, float]


class BlimpError(Exception):
    """Base class for errors raised by this package."""


class NonPositiveParameter(BlimpError):
    """A physical parameter that must be strictly positive is not."""

    def __init__(self, name: str):
        super().__init__(f"parameter {name!r} must be strictly positive")
        self.name = name


class ThrustExceedsBalanceRange(BlimpError):
    """Horizontal thrust too large for any balanced tilt to exist."""


class TiltOutOfRange(BlimpError):
    """Tilt angle outside the open interval (-pi/2, pi/2)."""


class ModelRegionViolation(BlimpError):
    """State left the validity region of the reduced model."""


class NonMonotoneClock(BlimpError):
    """A supervisor step was given a time earlier than the previous one."""


class NonMonotoneLog(BlimpError):
    """Command log timestamps are not strictly increasing."""


class InvalidScenario(BlimpError):
    """Scenario file failed validation; message carries field diagnostics."""


class ScenarioMismatch(BlimpError):
    """Comparison scenarios differ in something other than the assist flag."""


class EmptyTrace(BlimpError):
    """Metrics requested on a trace with no records."""


class MalformedMessage(BlimpError):
    """Wire message could not be decoded."""


class PortInUse(BlimpError):
    """Requested service port is already bound."""


@dataclass(frozen=True)
class BlimpParams:
    """Physical constants of the vehicle.

    m : mass (kg)
    g : gravitational acceleration (m/s^2)
    r1 : distance center of gravity to center of buoyancy (m)
    r2 : vertical distance thrusters to center of buoyancy (m)
    r3 : horizontal distance thruster to gondola center (m)
    Dh : horizontal linear drag coefficient (N s/m)
    Dz : vertical linear drag coefficient (N s/m)
    Dwz : yaw rotational drag coefficient (N m s)
    Dwy : tilt rotational drag coefficient (N m s)
    Iz : yaw moment of inertia about the gravity axis (kg m^2)
    Iy : tilt (pendulum) moment of inertia (kg m^2)
    kb : Bernoulli coupling coefficient (N s^2/m^2)
    t_max : per-motor thrust limit (N)

    The defaults describe a plausible sub-meter indoor blimp: cruise
    speed about 1.75 m/s at 0.1 rad tilt and a yaw decay time constant
    near 7.7 s, slow enough that the pendulum swing matters.
    """

    m: float = 0.30
    g: float = 9.81
    r1: float = 0.15
    r2: float = 0.05
    r3: float = 0.04
    Dh: float = 0.5
    Dz: float = 0.10
    Dwz: float = 5.0e-4
    Dwy: float = 2.0e-3
    Iz: float = 0.01
    Iy: float = 0.012
    kb: float = 0.02
    t_max: float = 1.5


def validate_params(p: BlimpParams) -> BlimpParams:
    """Return ``p`` unchanged if every field is strictly positive.

    Raises NonPositiveParameter naming the first offending field.
    r2 < r1 is deliberately not required; only positivity is enforced.
    """
    for f in dataclasses.fields(p):
        v = getattr(p, f.name)
        if not isinstance(v, (int, float)) or not math.isfinite(v) or v <= 0.0:
            raise NonPositiveParameter(f.name)
    return p


@dataclass(frozen=True)
class BlimpState:
    """Reduced kinematic state.  z is positive down (along gravity)."""

    p_xy: Vec2 = (0.0, 0.0)
    z: float = 0.0
    v_xy: Vec2 = (0.0, 0.0)
    v_z: float = 0.0
    tilt: Vec2 = (0.0, 0.0)
    tilt_rate: Vec2 = (0.0, 0.0)
    psi: float = 0.0
    omega_z: float = 0.0
    t: float = 0.0

    def is_finite(self) -> bool:
        vals = (*self.p_xy, self.z, *self.v_xy, self.v_z,
                *self.tilt, *self.tilt_rate, self.psi, self.omega_z, self.t)
        return all(math.isfinite(v) for v in vals)


@dataclass(frozen=True)
class Wrench:
    """Body-frame force/torque demand.

    f_xy : planar force (N, 2-vector)
    f_z : vertical force (N, positive down)
    tau_z : yaw torque (N m)
    """

    f_xy: Vec2 = (0.0, 0.0)
    f_z: float = 0.0
    tau_z: float = 0.0


ZERO_WRENCH = Wrench()


@dataclass(frozen=True)
class MotorCommand:
    """Six non-negative motor thrusts (N): four horizontal, two vertical."""

    h: Tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    v: Tuple[float, float] = (0.0, 0.0)


@dataclass(frozen=True)
class PilotCommand:
    """Timestamped human intent.  All inputs are dimensionless in [-1, 1].

    dir : planar direction input (2-vector)
    vz : vertical input (positive descends, matching +z down)
    yaw : yaw input
    t_issued : timestamp (s)
    """

    dir: Vec2 = (0.0, 0.0)
    vz: float = 0.0
    yaw: float = 0.0
    t_issued: float = 0.0


def _clamp(x: float, lo: float, hi: float) -> float:
    return lo if x < lo else hi if x > hi else x


def clamp_command(raw: PilotCommand) -> PilotCommand:
    """Clamp every input component to [-1, 1]; the timestamp is preserved."""
    return PilotCommand(
        dir=(_clamp(raw.dir[0], -1.0, 1.0), _clamp(raw.dir[1], -1.0, 1.0)),
        vz=_clamp(raw.vz, -1.0, 1.0),
        yaw=_clamp(raw.yaw, -1.0, 1.0),
        t_issued=raw.t_issued,
    )


_PARAM_NAMES = tuple(f.name for f in dataclasses.fields(BlimpParams))


def params_to_dict(p: BlimpParams) -> dict:
    return {name: getattr(p, name) for name in _PARAM_NAMES}


def params_from_dict(d: dict) -> BlimpParams:
    """Build BlimpParams from a flat mapping; unknown keys are rejected."""
    unknown = sorted(set(d) - set(_PARAM_NAMES))
    if unknown:
        raise InvalidScenario(f"unknown parameter keys: {', '.join(unknown)}")
    merged = {name: float(d[name]) for name in d}
    return validate_params(BlimpParams(**merged))


def load_params(path: str) -> BlimpParams:
    """Read a JSON parameter file.  Missing fields keep their defaults."""
    with open(path, "r", encoding="utf-8") as fh:
        d = json.load(fh)
    if not isinstance(d, dict):
        raise InvalidScenario(f"parameter file {path} is not a JSON object")
    return params_from_dict(d)


def save_params(p: BlimpParams, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(params_to_dict(p), fh, indent=2, sort_keys=True)
        fh.write("\n")
