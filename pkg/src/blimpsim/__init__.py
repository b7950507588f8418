"""Deterministic indoor-blimp simulator with an assistive hybrid controller.

Modules:
    core        shared value types, parameters, validation
    dynamics    reduced motion model, RK4 integrator, closed-form oracles
    actuation   wrench <-> six forward-only motors
    controllers balancing PID, bang-bang yaw stabilizer, supervisor
    pilot       scripted pilots, reaction cadence, command-log replay
    harness     scenario runner, traces, metrics, on/off comparison
    service     real-time WebSocket bridge for interactive piloting
"""

from .core import (
    BlimpError,
    BlimpParams,
    BlimpState,
    EmptyTrace,
    InvalidScenario,
    MalformedMessage,
    ModelRegionViolation,
    MotorCommand,
    NonMonotoneClock,
    NonMonotoneLog,
    NonPositiveParameter,
    PilotCommand,
    PortInUse,
    ScenarioMismatch,
    ThrustExceedsBalanceRange,
    TiltOutOfRange,
    Wrench,
    ZERO_WRENCH,
    clamp_command,
    load_params,
    params_from_dict,
    params_to_dict,
    save_params,
    validate_params,
)
from .dynamics import (
    MAX_DT,
    StateDerivative,
    balanced_pitch_for_thrust,
    bernoulli_force,
    closed_form_yaw,
    derivative,
    rotational_energy,
    step_rk4,
    thrust_for_balanced_pitch,
)
from .actuation import (
    AllocationResult,
    ThrusterLayout,
    allocate,
    default_layout,
    layout_from_dict,
    layout_to_dict,
    wrench_of,
)
from .controllers import (
    BangBangConfig,
    ControlConfig,
    Mode,
    PidGains,
    PidState,
    SupervisorConfig,
    SupervisorState,
    balancing_step,
    bang_bang_step,
    command_to_tilt_target,
    control_from_dict,
    control_to_dict,
    reset,
    supervisor_step,
    vertical_feedforward,
)
from .pilot import (
    COMMAND_LOG_HEADER,
    RNG_ALGORITHM,
    ChaoticPilot,
    NullPilot,
    ReactionModel,
    ReplayPilot,
    WaypointPilot,
    WaypointPlan,
    read_command_log,
    write_command_log,
)
from .harness import (
    TRACE_HEADER,
    ComparisonReport,
    ControlLoop,
    MetricsReport,
    Scenario,
    Trace,
    TraceRecord,
    build_pilot,
    compare,
    compute_metrics,
    load_scenario,
    physics_tick,
    read_trace,
    run_scenario,
    scenario_from_dict,
    scenario_to_dict,
    simulate,
    validate_scenario,
    write_run_metadata,
    write_trace,
)
from .service import (
    Session,
    SessionConfig,
    SessionHandle,
    SessionRunner,
    parse_client_message,
    record_session,
    serve_forever,
    start_session,
)

__version__ = "0.1.0"
