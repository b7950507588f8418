"""Real-time bridge between the simulator and WebSocket pilots.

One authoritative Session owns all mutable simulation state and is
ticked either by the wall-clock runner (live use) or directly (tests).
Network ingress lands in a thread-safe queue drained once per tick with
latest-command-wins, matching the supervisor's same-tick preemption;
telemetry fans out through bounded per-client queues, and a client that
falls more than a full backlog behind is dropped rather than ever
blocking the loop.

Wire protocol: one JSON object per WebSocket frame on `/pilot`.
Client to server:  {"type":"cmd", t_client, dir:[x,y], vz, yaw}
                   {"type":"config", assist:"on"|"off", reset:bool}
Server to client:  {"type":"state", t, pos:[3], vel:[3], tilt:[2],
                    tilt_rate:[2], psi, omega_z, mode, assist}
                   {"type":"ack", t_server, last_cmd_t}
                   {"type":"error", reason}
GET /health reports tick and client counts; GET /config returns the
scenario so a UI can draw the task geometry.  A non-finite simulation
state terminates the session with an error frame to every client.
"""

import dataclasses
import json
import math
import os
import queue
import socket
import sys
import threading
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .core import (
    BlimpState,
    InvalidScenario,
    MalformedMessage,
    PilotCommand,
    PortInUse,
    clamp_command,
)
from .harness import (
    ControlLoop,
    Scenario,
    Trace,
    TraceRecord,
    physics_tick,
    scenario_to_dict,
    validate_scenario,
    write_run_metadata,
    write_trace,
)
from .pilot import write_command_log

_BACKLOG_LIMIT = 64


@dataclass(frozen=True)
class SessionConfig:
    scenario: Scenario
    tick_rate: int = 100
    telemetry_rate: int = 20
    port: int = 8765
    host: str = "127.0.0.1"


def _validate_config(cfg: SessionConfig) -> None:
    validate_scenario(cfg.scenario)
    if cfg.tick_rate <= 0 or cfg.telemetry_rate <= 0:
        raise InvalidScenario("tick_rate and telemetry_rate must be > 0")
    if cfg.telemetry_rate > cfg.tick_rate:
        raise InvalidScenario("telemetry_rate must not exceed tick_rate")
    if cfg.tick_rate % cfg.telemetry_rate != 0:
        raise InvalidScenario("tick_rate must be a multiple of telemetry_rate")
    if abs(cfg.scenario.dt * cfg.tick_rate - 1.0) > 1e-9:
        raise InvalidScenario(
            f"tick_rate {cfg.tick_rate} and scenario dt {cfg.scenario.dt} "
            "must satisfy tick_rate * dt = 1")


def parse_client_message(text: str) -> dict:
    """Decode and validate one client frame; MalformedMessage on anything off."""
    try:
        msg = json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedMessage(f"not valid JSON: {e}") from e
    if not isinstance(msg, dict):
        raise MalformedMessage("frame must be a JSON object")
    tag = msg.get("type")
    if tag is None:
        raise MalformedMessage("missing 'type' tag")
    if tag == "cmd":
        allowed = {"type", "t_client", "dir", "vz", "yaw"}
        unknown = sorted(set(msg) - allowed)
        if unknown:
            raise MalformedMessage(f"unknown cmd fields: {', '.join(unknown)}")
        d = msg.get("dir")
        if (not isinstance(d, (list, tuple)) or len(d) != 2
                or not all(isinstance(v, (int, float)) for v in d)):
            raise MalformedMessage("cmd.dir must be [x, y]")
        for name in ("vz", "yaw"):
            if not isinstance(msg.get(name, 0.0), (int, float)):
                raise MalformedMessage(f"cmd.{name} must be a number")
        vals = [float(d[0]), float(d[1]),
                float(msg.get("vz", 0.0)), float(msg.get("yaw", 0.0)),
                float(msg.get("t_client", 0.0) or 0.0)]
        if not all(math.isfinite(v) for v in vals):
            raise MalformedMessage("cmd fields must be finite")
        return msg
    if tag == "config":
        allowed = {"type", "assist", "reset"}
        unknown = sorted(set(msg) - allowed)
        if unknown:
            raise MalformedMessage(f"unknown config fields: {', '.join(unknown)}")
        assist = msg.get("assist")
        if assist is not None and assist not in ("on", "off"):
            raise MalformedMessage("config.assist must be 'on' or 'off'")
        if not isinstance(msg.get("reset", False), bool):
            raise MalformedMessage("config.reset must be a boolean")
        return msg
    raise MalformedMessage(f"unknown message type {tag!r}")


class _Client:
    def __init__(self, client_id: int):
        self.id = client_id
        self.queue: "queue.Queue[str]" = queue.Queue(maxsize=_BACKLOG_LIMIT)
        self.dead = False

    def push(self, text: str) -> None:
        try:
            self.queue.put_nowait(text)
        except queue.Full:
            self.dead = True


class Session:
    """Authoritative simulation loop state.  tick() is the only mutator
    of simulation state and must be called from a single thread."""

    def __init__(self, cfg: SessionConfig):
        _validate_config(cfg)
        self.cfg = cfg
        self.dt = 1.0 / cfg.tick_rate
        self.scenario = dataclasses.replace(cfg.scenario, dt=self.dt)
        self.assist = self.scenario.assist
        self.state: BlimpState = self.scenario.initial_state
        self.loop = ControlLoop(self.scenario)
        self.layout = self.scenario.resolved_layout()
        self.tick_count = 0
        self.alive = True
        self.error: Optional[str] = None
        self._ingress: "queue.SimpleQueue" = queue.SimpleQueue()
        self._clients: Dict[int, _Client] = {}
        self._clients_lock = threading.Lock()
        self._next_client = 0
        self.commands: List[PilotCommand] = []
        self.trace = Trace()
        self._every = cfg.tick_rate // cfg.telemetry_rate

    # -- network side (any thread) ------------------------------------

    def ingest(self, text: str) -> str:
        """Queue one client frame; returns the ack frame to send back."""
        msg = parse_client_message(text)
        if msg["type"] == "cmd":
            cmd = clamp_command(PilotCommand(
                dir=(float(msg["dir"][0]), float(msg["dir"][1])),
                vz=float(msg.get("vz", 0.0)),
                yaw=float(msg.get("yaw", 0.0)),
                t_issued=self.sim_time()))
            self._ingress.put(("cmd", cmd))
            last_t = msg.get("t_client")
        else:
            self._ingress.put(("config", msg.get("assist"),
                               bool(msg.get("reset", False))))
            last_t = None
        return json.dumps({"type": "ack", "t_server": self.sim_time(),
                           "last_cmd_t": last_t})

    def attach_client(self) -> _Client:
        with self._clients_lock:
            c = _Client(self._next_client)
            self._next_client += 1
            self._clients[c.id] = c
        return c

    def detach_client(self, c: _Client) -> None:
        with self._clients_lock:
            self._clients.pop(c.id, None)

    def client_count(self) -> int:
        with self._clients_lock:
            return len(self._clients)

    # -- simulation side (runner thread only) -------------------------

    def sim_time(self) -> float:
        return self.tick_count * self.dt

    def _drain(self) -> Optional[PilotCommand]:
        latest: Optional[PilotCommand] = None
        while True:
            try:
                entry = self._ingress.get_nowait()
            except queue.Empty:
                break
            if entry[0] == "cmd":
                latest = entry[1]
            else:
                _, assist, do_reset = entry
                if assist is not None and assist != self.assist:
                    self.assist = assist
                    self.scenario = dataclasses.replace(self.scenario,
                                                        assist=assist)
                    self.loop = ControlLoop(self.scenario)
                if do_reset:
                    self.state = self.scenario.initial_state
                    self.loop = ControlLoop(self.scenario)
        return latest

    def tick(self) -> None:
        """One control + physics step at sim time tick_count * dt."""
        if not self.alive:
            return
        now = self.sim_time()
        cmd = self._drain()
        if cmd is not None:
            cmd = dataclasses.replace(cmd, t_issued=now)
            self.commands.append(cmd)
        demand, mode = self.loop.tick(cmd, self.state, now)
        self.state, motors, realized = physics_tick(
            self.state, demand, self.layout, self.scenario.params, self.dt)
        self.trace.records.append(TraceRecord(
            t=self.state.t, state=self.state, wrench=realized,
            motors=motors, mode=mode))
        self.tick_count += 1
        if not self.state.is_finite():
            self.error = "simulation state became non-finite"
            self.alive = False
            self._broadcast(json.dumps({"type": "error",
                                        "reason": self.error}))
            return
        if self.tick_count % self._every == 0:
            self._broadcast(self.state_message(mode))

    def state_message(self, mode: str) -> str:
        s = self.state
        return json.dumps({
            "type": "state", "t": s.t,
            "pos": [s.p_xy[0], s.p_xy[1], s.z],
            "vel": [s.v_xy[0], s.v_xy[1], s.v_z],
            "tilt": [s.tilt[0], s.tilt[1]],
            "tilt_rate": [s.tilt_rate[0], s.tilt_rate[1]],
            "psi": s.psi, "omega_z": s.omega_z, "mode": mode,
            "assist": self.assist,
        })

    def _broadcast(self, text: str) -> None:
        with self._clients_lock:
            targets = list(self._clients.values())
        for c in targets:
            if not c.dead:
                c.push(text)

    def run_for(self, ticks: int) -> None:
        """Advance synchronously; for tests and scripted sessions."""
        for _ in range(ticks):
            if not self.alive:
                break
            self.tick()


class SessionRunner(threading.Thread):
    """Paces Session.tick against the wall clock.

    Each tick k fires once perf_counter passes start + (k+1)/rate, so
    after any stall the loop catches up in a burst and the long-run
    tick count stays within one tick of rate * elapsed.
    """

    def __init__(self, session: Session):
        super().__init__(daemon=True, name="blimpsim-ticker")
        self.session = session
        self.stop_event = threading.Event()
        self._lock = threading.Lock()
        self.started_at: Optional[float] = None

    def progress(self) -> Tuple[int, float]:
        """(ticks completed, wall seconds elapsed), read consistently."""
        with self._lock:
            elapsed = (time.perf_counter() - self.started_at
                       if self.started_at is not None else 0.0)
            return self.session.tick_count, elapsed

    def run(self) -> None:
        rate = self.session.cfg.tick_rate
        with self._lock:
            self.started_at = time.perf_counter()
        k = 0
        while not self.stop_event.is_set() and self.session.alive:
            target = self.started_at + (k + 1) / rate
            now = time.perf_counter()
            if now < target:
                time.sleep(min(target - now, 0.05))
                continue
            with self._lock:
                self.session.tick()
                k += 1

    def stop(self) -> None:
        self.stop_event.set()
        self.join(timeout=5.0)


def record_session(session: Session, out_dir: str,
                   prefix: str = "session") -> Optional[Tuple[str, str]]:
    """Write the command log and trace; None (with a warning) on IO failure.

    Replaying the log headlessly reproduces the trace bit-identically
    provided assist was not reconfigured mid-session; config toggles
    have no column in the log format and are not replayable.
    """
    try:
        os.makedirs(out_dir, exist_ok=True)
        log_path = os.path.join(out_dir, f"{prefix}_commands.csv")
        trace_path = os.path.join(out_dir, f"{prefix}_trace.csv")
        write_command_log(session.commands, log_path)
        write_trace(session.trace, trace_path)
        write_run_metadata(trace_path, session.scenario)
        return log_path, trace_path
    except OSError as e:
        print(f"warning: session recording failed: {e}", file=sys.stderr)
        return None


def _check_port_free(host: str, port: int) -> None:
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as s:
        try:
            s.bind((host, port))
        except OSError as e:
            raise PortInUse(f"port {port} on {host} is already in use") from e


def create_app(session: Session):
    """FastAPI app exposing /pilot, /health, /config for one session."""
    import asyncio

    from fastapi import FastAPI, WebSocket, WebSocketDisconnect
    from fastapi.middleware.cors import CORSMiddleware

    app = FastAPI(title="blimpsim bridge", docs_url=None, redoc_url=None)
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.get("/health")
    def health():
        return {"ticks": session.tick_count,
                "clients": session.client_count(),
                "alive": session.alive}

    @app.get("/config")
    def config():
        return {"scenario": scenario_to_dict(session.scenario),
                "tick_rate": session.cfg.tick_rate,
                "telemetry_rate": session.cfg.telemetry_rate}

    @app.websocket("/pilot")
    async def pilot(ws: WebSocket):
        await ws.accept()
        client = session.attach_client()

        async def sender():
            # Keeps draining after session death so the final error
            # frame reaches the client before the link closes.
            try:
                while not client.dead:
                    try:
                        text = client.queue.get_nowait()
                    except queue.Empty:
                        if not session.alive:
                            break
                        await asyncio.sleep(0.005)
                        continue
                    await ws.send_text(text)
            except Exception:
                client.dead = True

        async def receiver():
            try:
                while not client.dead:
                    text = await ws.receive_text()
                    try:
                        ack = session.ingest(text)
                    except MalformedMessage as e:
                        await ws.send_text(json.dumps({"type": "error",
                                                       "reason": str(e)}))
                        continue
                    await ws.send_text(ack)
            except (WebSocketDisconnect, RuntimeError):
                client.dead = True

        try:
            done, pending = await asyncio.wait(
                [asyncio.create_task(sender()),
                 asyncio.create_task(receiver())],
                return_when=asyncio.FIRST_COMPLETED)
            for task in pending:
                task.cancel()
            for task in done:
                task.exception()
        finally:
            session.detach_client(client)

    return app


@dataclass
class SessionHandle:
    session: Session
    runner: SessionRunner
    server: object
    server_thread: threading.Thread
    out_dir: str

    def stop(self) -> Optional[Tuple[str, str]]:
        """Stop ticking, shut the server down, write the recording."""
        self.runner.stop()
        paths = record_session(self.session, self.out_dir)
        self.server.should_exit = True
        self.server_thread.join(timeout=5.0)
        return paths


def start_session(cfg: SessionConfig, out_dir: str = ".") -> SessionHandle:
    """Validate, bind, and launch the ticking session plus HTTP server."""
    import uvicorn

    _check_port_free(cfg.host, cfg.port)
    session = Session(cfg)
    app = create_app(session)
    uv_config = uvicorn.Config(app, host=cfg.host, port=cfg.port,
                               log_level="warning")
    server = uvicorn.Server(uv_config)
    server_thread = threading.Thread(target=server.run, daemon=True,
                                     name="blimpsim-http")
    server_thread.start()
    deadline = time.perf_counter() + 10.0
    while not server.started:
        if time.perf_counter() > deadline or not server_thread.is_alive():
            raise PortInUse(f"server failed to start on port {cfg.port}")
        time.sleep(0.01)
    runner = SessionRunner(session)
    runner.start()
    return SessionHandle(session=session, runner=runner, server=server,
                         server_thread=server_thread, out_dir=out_dir)


def serve_forever(sc: Scenario, port: int = 8765, out_dir: str = ".") -> None:
    """CLI entry: run until interrupted, then record the session."""
    tick_rate = int(round(1.0 / sc.dt))
    telemetry = max(d for d in range(1, min(20, tick_rate) + 1)
                    if tick_rate % d == 0)
    cfg = SessionConfig(scenario=sc, port=port, tick_rate=tick_rate,
                        telemetry_rate=telemetry)
    handle = start_session(cfg, out_dir=out_dir)
    print(f"serving on ws://{cfg.host}:{cfg.port}/pilot "
          f"(tick {cfg.tick_rate} Hz, telemetry {cfg.telemetry_rate} Hz); "
          "Ctrl-C to stop")
    try:
        while handle.session.alive:
            time.sleep(0.2)
        if handle.session.error:
            print(f"session ended: {handle.session.error}", file=sys.stderr)
    except KeyboardInterrupt:
        pass
    paths = handle.stop()
    if paths:
        print(f"recorded {paths[0]} and {paths[1]}")
