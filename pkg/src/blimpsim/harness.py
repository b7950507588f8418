"""Headless scenario runner, trace I/O, metrics, and the on/off comparison.

A scenario bundles everything a run needs: physics parameters, layout,
control configuration, a pilot, duration, tick size, initial state, the
assist flag, and the seed.  Runs are bit-deterministic: (scenario,
seed) fully determines the trace, which is what makes record/replay and
the acceptance comparisons meaningful.

The tick order is pilot, controller, allocator, physics.  The wrench
that reaches the integrator is always wrench_of(allocate(demand)), the
realizable one, so the trace never reports forces the motors cannot
produce.  ControlLoop below is the single implementation of the
controller stage; the interactive service drives the same object, so a
replayed session cannot diverge from the live one.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from .actuation import (
    ThrusterLayout,
    allocate,
    default_layout,
    layout_from_dict,
    layout_to_dict,
    wrench_of,
)
from .controllers import (
    ControlConfig,
    Mode,
    PidState,
    SupervisorState,
    control_from_dict,
    control_to_dict,
    supervisor_step,
)
from .core import (
    BlimpParams,
    BlimpState,
    EmptyTrace,
    InvalidScenario,
    MotorCommand,
    PilotCommand,
    ScenarioMismatch,
    Wrench,
    clamp_command,
    params_from_dict,
    params_to_dict,
    validate_params,
)
from .dynamics import MAX_DT, step_rk4, thrust_for_balanced_pitch
from .pilot import (
    RNG_ALGORITHM,
    ChaoticPilot,
    NullPilot,
    ReactionModel,
    ReplayPilot,
    WaypointPilot,
    WaypointPlan,
    read_command_log,
)

TRACE_HEADER = ("t,x,y,z,vx,vy,vz,tilt_x,tilt_y,tiltrate_x,tiltrate_y,"
                "psi,omega_z,fx,fy,fz,tau_z,m1,m2,m3,m4,m5,m6,mode")

_PILOT_KEYS = {
    "chaotic": {"type", "min_gap", "jitter"},
    "waypoint": {"type", "min_gap", "jitter", "waypoints", "capture_radius",
                 "speed_scale"},
    "replay": {"type", "log"},
    "none": {"type"},
    "interactive": {"type", "waypoints", "capture_radius"},
}


@dataclass(frozen=True)
class Scenario:
    params: BlimpParams = BlimpParams()
    layout: Optional[ThrusterLayout] = None
    control: ControlConfig = ControlConfig()
    pilot: Dict = field(default_factory=lambda: {"type": "none"})
    duration: float = 10.0
    dt: float = 0.01
    initial_state: BlimpState = BlimpState()
    assist: str = "on"
    seed: int = 0

    def resolved_layout(self) -> ThrusterLayout:
        return self.layout if self.layout is not None else default_layout(self.params.r3)


@dataclass(frozen=True)
class TraceRecord:
    t: float
    state: BlimpState
    wrench: Wrench
    motors: MotorCommand
    mode: str


@dataclass
class Trace:
    records: List[TraceRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        getters = {
            "t": lambda r: r.t,
            "omega_z": lambda r: r.state.omega_z,
            "tiltrate_x": lambda r: r.state.tilt_rate[0],
            "tiltrate_y": lambda r: r.state.tilt_rate[1],
            "x": lambda r: r.state.p_xy[0],
            "y": lambda r: r.state.p_xy[1],
            "z": lambda r: r.state.z,
        }
        return np.array([getters[name](r) for r in self.records], dtype=float)


@dataclass(frozen=True)
class MetricsReport:
    rms_omega_z: float
    rms_tilt_rate: float
    peak_omega_z: float
    task_completed: bool
    completion_time: Optional[float]
    path_rms_deviation: Optional[float]

    def to_dict(self) -> dict:
        return {
            "rms_omega_z": self.rms_omega_z,
            "rms_tilt_rate": self.rms_tilt_rate,
            "peak_omega_z": self.peak_omega_z,
            "task_completed": self.task_completed,
            "completion_time": self.completion_time,
            "path_rms_deviation": self.path_rms_deviation,
        }


@dataclass(frozen=True)
class ComparisonReport:
    on: MetricsReport
    off: MetricsReport
    rms_omega_ratio: float
    rms_tilt_rate_ratio: float

    def to_dict(self) -> dict:
        return {
            "assist_on": self.on.to_dict(),
            "assist_off": self.off.to_dict(),
            "rms_omega_ratio": self.rms_omega_ratio,
            "rms_tilt_rate_ratio": self.rms_tilt_rate_ratio,
        }


def _ratio(on: float, off: float) -> float:
    if off == 0.0:
        return 1.0 if on == 0.0 else math.inf
    return on / off


class ControlLoop:
    """Controller stage shared by the headless runner and the service.

    Assist on: the hybrid supervisor.  Assist off: the last command maps
    straight to balanced-thrust feedforward with no PID, no stabilizer,
    and no windows; it persists until the next command.
    """

    def __init__(self, sc: Scenario):
        self.assist_on = sc.assist == "on"
        self.ctrl = sc.control
        self.params = sc.params
        self.dt = sc.dt
        self.sup = SupervisorState()
        self.pid = PidState()
        self.current: Optional[PilotCommand] = None

    def tick(self, cmd: Optional[PilotCommand], state: BlimpState,
             now: float) -> Tuple[Wrench, str]:
        if cmd is not None:
            cmd = clamp_command(cmd)
        if self.assist_on:
            wrench, self.sup, self.pid = supervisor_step(
                self.sup, self.pid, cmd, state, now, self.ctrl,
                self.params, self.dt)
            return wrench, self.sup.mode.value
        if cmd is not None:
            self.current = cmd
        c = self.current
        if c is None:
            return Wrench(), "off"
        fx = thrust_for_balanced_pitch(self.ctrl.tilt_max * c.dir[0], self.params)
        fy = thrust_for_balanced_pitch(self.ctrl.tilt_max * c.dir[1], self.params)
        fz = c.vz * self.ctrl.f_vmax
        tau = self.ctrl.yaw_gain * c.yaw
        return Wrench(f_xy=(fx, fy), f_z=fz, tau_z=tau), "off"


def physics_tick(state: BlimpState, demand: Wrench, layout: ThrusterLayout,
                 p: BlimpParams, dt: float,
                 ) -> Tuple[BlimpState, MotorCommand, Wrench]:
    """Allocate the demand, integrate the realizable wrench one step."""
    alloc = allocate(demand, layout, p)
    realized = wrench_of(alloc.motors, layout)
    return step_rk4(state, realized, p, dt), alloc.motors, realized


def build_pilot(sc: Scenario):
    spec = sc.pilot
    kind = spec.get("type")
    if kind not in _PILOT_KEYS:
        raise InvalidScenario(f"unknown pilot type {kind!r}")
    unknown = sorted(set(spec) - _PILOT_KEYS[kind])
    if unknown:
        raise InvalidScenario(
            f"unknown pilot.{kind} keys: {', '.join(unknown)}")
    rm = ReactionModel(min_gap=float(spec.get("min_gap", 0.200)),
                       jitter=float(spec.get("jitter", 0.050)),
                       seed=sc.seed)
    if kind == "chaotic":
        return ChaoticPilot(rm)
    if kind == "waypoint":
        wps = spec.get("waypoints")
        if not wps:
            raise InvalidScenario("pilot.waypoint needs waypoints")
        plan = WaypointPlan(
            waypoints=tuple((float(x), float(y), float(z)) for x, y, z in wps),
            capture_radius=float(spec.get("capture_radius", 0.5)),
            speed_scale=float(spec.get("speed_scale", 1.0)))
        return WaypointPilot(plan, rm)
    if kind == "replay":
        log = spec.get("log")
        if not log or not os.path.exists(log):
            raise InvalidScenario(f"pilot.replay log {log!r} not found")
        return ReplayPilot(read_command_log(log))
    if kind == "interactive":
        raise InvalidScenario("interactive pilot runs under the service, "
                              "not the headless runner")
    return NullPilot()


def validate_scenario(sc: Scenario) -> Scenario:
    validate_params(sc.params)
    if not (sc.duration > 0):
        raise InvalidScenario(f"duration must be > 0, got {sc.duration}")
    if not (0.0 < sc.dt <= MAX_DT):
        raise InvalidScenario(f"dt must be in (0, {MAX_DT}], got {sc.dt}")
    if sc.assist not in ("on", "off"):
        raise InvalidScenario(f"assist must be 'on' or 'off', got {sc.assist!r}")
    if not sc.initial_state.is_finite():
        raise InvalidScenario("initial_state has non-finite values")
    kind = sc.pilot.get("type")
    if kind not in _PILOT_KEYS:
        raise InvalidScenario(f"unknown pilot type {kind!r}")
    unknown = sorted(set(sc.pilot) - _PILOT_KEYS[kind])
    if unknown:
        raise InvalidScenario(f"unknown pilot.{kind} keys: {', '.join(unknown)}")
    if kind == "replay":
        log = sc.pilot.get("log")
        if not log or not os.path.exists(log):
            raise InvalidScenario(f"pilot.replay log {log!r} not found")
    sc.resolved_layout()
    return sc


def simulate(sc: Scenario) -> Tuple[Trace, List[PilotCommand]]:
    """Run the closed loop; return the trace and the applied commands."""
    validate_scenario(sc)
    layout = sc.resolved_layout()
    pilot = build_pilot(sc)
    loop = ControlLoop(sc)
    state = sc.initial_state
    n = int(round(sc.duration / sc.dt))
    if n < 1:
        raise InvalidScenario("duration shorter than one tick")
    trace = Trace()
    commands: List[PilotCommand] = []
    for k in range(n):
        now = k * sc.dt
        cmd = pilot.step(state, now)
        if cmd is not None:
            cmd = clamp_command(replace(cmd, t_issued=now))
            commands.append(cmd)
        demand, mode = loop.tick(cmd, state, now)
        state, motors, realized = physics_tick(state, demand, layout,
                                               sc.params, sc.dt)
        trace.records.append(TraceRecord(t=state.t, state=state,
                                         wrench=realized, motors=motors,
                                         mode=mode))
    return trace, commands


def run_scenario(sc: Scenario) -> Trace:
    return simulate(sc)[0]


def compute_metrics(tr: Trace, sc: Scenario) -> MetricsReport:
    if len(tr) == 0:
        raise EmptyTrace("metrics need at least one record")
    omega = tr.column("omega_z")
    trx, try_ = tr.column("tiltrate_x"), tr.column("tiltrate_y")
    rms_omega = float(np.sqrt(np.mean(omega ** 2)))
    rms_tilt_rate = float(np.sqrt(np.mean(trx ** 2 + try_ ** 2)))
    peak = float(np.max(np.abs(omega)))

    completed = False
    completion_time: Optional[float] = None
    deviation: Optional[float] = None
    wps = sc.pilot.get("waypoints") if sc.pilot.get("type") in ("waypoint", "interactive") else None
    if wps:
        capture = float(sc.pilot.get("capture_radius", 0.5))
        pos = np.stack([tr.column("x"), tr.column("y"), tr.column("z")], axis=1)
        final = np.array([float(v) for v in wps[-1]])
        dist_final = np.linalg.norm(pos - final, axis=1)
        hits = np.nonzero(dist_final <= capture)[0]
        if hits.size:
            completed = True
            t = tr.column("t")
            completion_time = float(t[hits[0]] - t[0] + sc.dt)
        deviation = _polyline_rms_deviation(pos, sc, wps)
    return MetricsReport(rms_omega_z=rms_omega, rms_tilt_rate=rms_tilt_rate,
                         peak_omega_z=peak, task_completed=completed,
                         completion_time=completion_time,
                         path_rms_deviation=deviation)


def _polyline_rms_deviation(pos: np.ndarray, sc: Scenario, wps) -> float:
    """RMS distance from each sample to the start->waypoints polyline."""
    start = np.array([sc.initial_state.p_xy[0], sc.initial_state.p_xy[1],
                      sc.initial_state.z])
    verts = [start] + [np.array([float(v) for v in w]) for w in wps]
    best = np.full(pos.shape[0], np.inf)
    for a, b in zip(verts[:-1], verts[1:]):
        ab = b - a
        denom = float(ab @ ab)
        if denom < 1e-18:
            d = np.linalg.norm(pos - a, axis=1)
        else:
            s = np.clip((pos - a) @ ab / denom, 0.0, 1.0)
            proj = a + s[:, None] * ab
            d = np.linalg.norm(pos - proj, axis=1)
        best = np.minimum(best, d)
    return float(np.sqrt(np.mean(best ** 2)))


def compare(sc_on: Scenario, sc_off: Scenario) -> ComparisonReport:
    """Run the pair and report side-by-side metrics plus on/off ratios."""
    if sc_on.assist != "on" or sc_off.assist != "off":
        raise ScenarioMismatch(
            f"expected assist on/off pair, got {sc_on.assist!r}/{sc_off.assist!r}")
    d_on, d_off = scenario_to_dict(sc_on), scenario_to_dict(sc_off)
    d_on.pop("assist")
    d_off.pop("assist")
    if d_on != d_off:
        diff = [k for k in d_on if d_on.get(k) != d_off.get(k)]
        raise ScenarioMismatch(f"scenarios differ beyond assist: {diff}")
    m_on = compute_metrics(run_scenario(sc_on), sc_on)
    m_off = compute_metrics(run_scenario(sc_off), sc_off)
    return ComparisonReport(
        on=m_on, off=m_off,
        rms_omega_ratio=_ratio(m_on.rms_omega_z, m_off.rms_omega_z),
        rms_tilt_rate_ratio=_ratio(m_on.rms_tilt_rate, m_off.rms_tilt_rate))


def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def write_trace(tr: Trace, path: str) -> None:
    """CSV with the pinned header; floats carry 9 significant digits."""
    lines = [TRACE_HEADER]
    for r in tr.records:
        s = r.state
        vals = (r.t, s.p_xy[0], s.p_xy[1], s.z, s.v_xy[0], s.v_xy[1], s.v_z,
                s.tilt[0], s.tilt[1], s.tilt_rate[0], s.tilt_rate[1],
                s.psi, s.omega_z,
                r.wrench.f_xy[0], r.wrench.f_xy[1], r.wrench.f_z,
                r.wrench.tau_z, *r.motors.h, *r.motors.v)
        lines.append(",".join(_fmt(v) for v in vals) + "," + r.mode)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_trace(path: str) -> Trace:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines or lines[0] != TRACE_HEADER:
        raise ValueError(f"{path}: missing trace header")
    tr = Trace()
    prev_t = -math.inf
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 24:
            raise ValueError(f"{path}: bad record {ln!r}")
        f = [float(x) for x in parts[:23]]
        mode = parts[23]
        if mode not in ("idle", "balancing", "stabilizing", "off"):
            raise ValueError(f"{path}: bad mode {mode!r}")
        if f[0] <= prev_t:
            raise ValueError(f"{path}: time not increasing at t={f[0]}")
        prev_t = f[0]
        state = BlimpState(p_xy=(f[1], f[2]), z=f[3], v_xy=(f[4], f[5]),
                           v_z=f[6], tilt=(f[7], f[8]),
                           tilt_rate=(f[9], f[10]), psi=f[11], omega_z=f[12],
                           t=f[0])
        wrench = Wrench(f_xy=(f[13], f[14]), f_z=f[15], tau_z=f[16])
        motors = MotorCommand(h=(f[17], f[18], f[19], f[20]),
                              v=(f[21], f[22]))
        tr.records.append(TraceRecord(t=f[0], state=state, wrench=wrench,
                                      motors=motors, mode=mode))
    return tr


def write_run_metadata(trace_path: str, sc: Scenario) -> str:
    """Sidecar naming the RNG stream that produced the trace."""
    meta_path = trace_path + ".meta.json" if not trace_path.endswith(".csv") \
        else trace_path[:-4] + ".meta.json"
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump({"rng_algorithm": RNG_ALGORITHM, "seed": sc.seed,
                   "assist": sc.assist, "dt": sc.dt,
                   "duration": sc.duration}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return meta_path


_STATE_KEYS = {"p_xy", "z", "v_xy", "v_z", "tilt", "tilt_rate", "psi",
               "omega_z"}


def _state_from_dict(d: dict) -> BlimpState:
    unknown = sorted(set(d) - _STATE_KEYS)
    if unknown:
        raise InvalidScenario(
            f"unknown initial_state keys: {', '.join(unknown)}")

    def vec2(key):
        v = d.get(key, (0.0, 0.0))
        return (float(v[0]), float(v[1]))

    return BlimpState(p_xy=vec2("p_xy"), z=float(d.get("z", 0.0)),
                      v_xy=vec2("v_xy"), v_z=float(d.get("v_z", 0.0)),
                      tilt=vec2("tilt"), tilt_rate=vec2("tilt_rate"),
                      psi=float(d.get("psi", 0.0)),
                      omega_z=float(d.get("omega_z", 0.0)), t=0.0)


def _state_to_dict(s: BlimpState) -> dict:
    return {"p_xy": list(s.p_xy), "z": s.z, "v_xy": list(s.v_xy),
            "v_z": s.v_z, "tilt": list(s.tilt),
            "tilt_rate": list(s.tilt_rate), "psi": s.psi,
            "omega_z": s.omega_z}


_SCENARIO_KEYS = {"params", "layout", "control", "pilot", "duration", "dt",
                  "initial_state", "assist", "seed"}


def scenario_from_dict(d: dict) -> Scenario:
    if not isinstance(d, dict):
        raise InvalidScenario("scenario must be a JSON object")
    unknown = sorted(set(d) - _SCENARIO_KEYS)
    if unknown:
        raise InvalidScenario(f"unknown scenario keys: {', '.join(unknown)}")
    params = params_from_dict(d.get("params", {}))
    layout = None
    if "layout" in d:
        layout = layout_from_dict(d["layout"], base=default_layout(params.r3))
    control = control_from_dict(d.get("control", {}))
    pilot = d.get("pilot", {"type": "none"})
    if not isinstance(pilot, dict):
        raise InvalidScenario("pilot must be an object")
    initial = _state_from_dict(d.get("initial_state", {}))
    sc = Scenario(params=params, layout=layout, control=control, pilot=pilot,
                  duration=float(d.get("duration", 10.0)),
                  dt=float(d.get("dt", 0.01)),
                  initial_state=initial,
                  assist=d.get("assist", "on"),
                  seed=int(d.get("seed", 0)))
    return validate_scenario(sc)


def scenario_to_dict(sc: Scenario) -> dict:
    d = {
        "params": params_to_dict(sc.params),
        "control": control_to_dict(sc.control),
        "pilot": dict(sc.pilot),
        "duration": sc.duration,
        "dt": sc.dt,
        "initial_state": _state_to_dict(sc.initial_state),
        "assist": sc.assist,
        "seed": sc.seed,
    }
    if sc.layout is not None:
        d["layout"] = layout_to_dict(sc.layout)
    return d


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            d = json.load(fh)
    except json.JSONDecodeError as e:
        raise InvalidScenario(f"{path}: not valid JSON ({e})") from e
    return scenario_from_dict(d)
