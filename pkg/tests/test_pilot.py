"""Command sources: cadence, reproducibility, waypoints, replay, logs."""

import math

import pytest

from blimpsim import (
    BlimpState,
    ChaoticPilot,
    NonMonotoneLog,
    NullPilot,
    PilotCommand,
    ReactionModel,
    ReplayPilot,
    RNG_ALGORITHM,
    WaypointPilot,
    WaypointPlan,
    read_command_log,
    write_command_log,
)

REST = BlimpState()


def test_rng_algorithm_name():
    assert RNG_ALGORITHM == "pcg64"


def test_reaction_model_validation():
    rm = ReactionModel()
    assert (rm.min_gap, rm.jitter, rm.seed) == (0.200, 0.050, 0)
    with pytest.raises(ValueError):
        ReactionModel(min_gap=-0.1)
    with pytest.raises(ValueError):
        ReactionModel(jitter=-0.01)


def test_waypoint_plan_validation():
    with pytest.raises(ValueError):
        WaypointPlan(waypoints=())
    with pytest.raises(ValueError):
        WaypointPlan(waypoints=((0, 0, 0),), capture_radius=0.0)
    with pytest.raises(ValueError):
        WaypointPlan(waypoints=((0, 0, 0),), speed_scale=0.0)
    with pytest.raises(ValueError):
        WaypointPlan(waypoints=((0, 0, 0),), speed_scale=1.5)


# ---------------------------------------------------------------- chaotic


def test_chaotic_first_command_frozen():
    c = ChaoticPilot(ReactionModel(seed=0)).step(REST, 0.0)
    assert c is not None and c.t_issued == 0.0
    assert c.dir == (0.2739233746429086, -0.4604265724722594)
    assert c.vz == -0.4590264760638053
    assert c.yaw == -0.9669447289429418


def test_chaotic_seed_selects_stream():
    c = ChaoticPilot(ReactionModel(seed=7)).step(REST, 0.0)
    assert c.dir == (0.25019093320933394, 0.794427601939151)
    assert c.vz == 0.2756856902451935
    assert c.yaw == -0.5495856200188163


def test_chaotic_quiet_until_next_gap():
    p = ChaoticPilot(ReactionModel(seed=0))
    assert p.step(REST, 0.0) is not None
    for k in range(1, 20):  # the gap is at least 0.2 s
        assert p.step(REST, k * 0.01) is None


def test_chaotic_reproducible_across_instances():
    def run(seed):
        p = ChaoticPilot(ReactionModel(seed=seed))
        return [p.step(REST, k * 0.01) for k in range(300)]

    a, b = run(3), run(3)
    assert a == b
    assert any(c is not None for c in a)


def test_chaotic_cadence_and_ranges():
    p = ChaoticPilot(ReactionModel(seed=1))
    cmds = []
    for k in range(1000):  # 10 s at dt=0.01
        c = p.step(REST, k * 0.01)
        if c is not None:
            cmds.append(c)
    # one command per 0.2-0.25 s, quantized to the tick grid
    assert 40 <= len(cmds) <= 50
    for a, b in zip(cmds, cmds[1:]):
        assert b.t_issued - a.t_issued >= 0.2 - 1e-9
    for c in cmds:
        assert -1.0 <= c.dir[0] <= 1.0 and -1.0 <= c.dir[1] <= 1.0
        assert -0.5 <= c.vz <= 0.5
        assert -1.0 <= c.yaw <= 1.0


# --------------------------------------------------------------- waypoint


def one_wp(*wps, radius=0.5, scale=1.0):
    return WaypointPilot(WaypointPlan(waypoints=tuple(wps),
                                      capture_radius=radius,
                                      speed_scale=scale),
                         ReactionModel(seed=0))


def test_waypoint_steers_toward_target():
    c = one_wp((3.0, 4.0, 0.0)).step(REST, 0.0)
    assert c.dir == pytest.approx((0.6, 0.8), abs=1e-15)
    assert c.vz == 0.0 and c.yaw == 0.0 and c.t_issued == 0.0


def test_waypoint_speed_scale():
    c = one_wp((3.0, 4.0, 0.0), scale=0.5).step(REST, 0.0)
    assert c.dir == pytest.approx((0.3, 0.4), abs=1e-15)


def test_waypoint_vz_proportional_and_clamped():
    c = one_wp((3.0, 4.0, 1.0)).step(REST, 0.0)
    assert c.vz == pytest.approx(0.5, abs=1e-15)  # 0.5 per meter
    c = one_wp((3.0, 4.0, 5.0)).step(REST, 0.0)
    assert c.vz == 1.0
    c = one_wp((3.0, 4.0, -5.0)).step(REST, 0.0)
    assert c.vz == -1.0


def test_waypoint_directly_above():
    c = one_wp((0.0, 0.0, 2.0)).step(REST, 0.0)
    assert c.dir == (0.0, 0.0)
    assert c.vz == 1.0


def test_waypoint_advances_on_capture():
    p = one_wp((0.2, 0.0, 0.0), (0.0, 5.0, 0.0))
    c = p.step(REST, 0.0)  # first waypoint already inside 0.5 m
    assert c.dir == pytest.approx((0.0, 1.0), abs=1e-15)
    assert p.index == 1


def test_waypoint_capture_is_3d():
    # planar distance inside the radius but altitude keeps it active
    p = one_wp((0.2, 0.0, 3.0))
    c = p.step(REST, 0.0)
    assert p.index == 0
    assert c.vz == 1.0


def test_waypoint_exhausted_goes_quiet():
    p = one_wp((0.1, 0.0, 0.0))
    assert p.step(REST, 0.0) is None
    assert p.step(REST, 5.0) is None


def test_waypoint_respects_cadence():
    p = one_wp((10.0, 0.0, 0.0))
    assert p.step(REST, 0.0) is not None
    assert p.step(REST, 0.1) is None


# ----------------------------------------------------------------- replay


def c_at(t, dx=0.1):
    return PilotCommand(t_issued=t, dir=(dx, 0.0), vz=0.0, yaw=0.0)


def test_replay_issues_at_recorded_times():
    p = ReplayPilot([c_at(0.1), c_at(0.3)])
    assert p.step(REST, 0.0) is None
    assert p.step(REST, 0.1).t_issued == 0.1
    assert p.step(REST, 0.2) is None
    assert p.step(REST, 0.3).t_issued == 0.3
    assert p.step(REST, 0.4) is None


def test_replay_latest_command_wins_after_a_jump():
    p = ReplayPilot([c_at(0.1, dx=0.1), c_at(0.15, dx=0.9)])
    c = p.step(REST, 0.2)
    assert c.dir[0] == 0.9  # the stale 0.1 s command is skipped


def test_replay_time_slack():
    p = ReplayPilot([c_at(0.1)])
    assert p.step(REST, 0.1 - 5e-10) is not None


def test_replay_rejects_non_monotone():
    with pytest.raises(NonMonotoneLog):
        ReplayPilot([c_at(0.2), c_at(0.1)])
    with pytest.raises(NonMonotoneLog):
        ReplayPilot([c_at(0.1), c_at(0.1)])


def test_null_pilot():
    p = NullPilot()
    assert p.step(REST, 0.0) is None
    assert p.step(REST, 100.0) is None


# ------------------------------------------------------------ command log


def test_command_log_round_trip(tmp_path):
    cmds = [
        PilotCommand(t_issued=0.0, dir=(0.2739233746429086, -0.75), vz=0.1,
                     yaw=-0.9669447289429418),
        PilotCommand(t_issued=0.25, dir=(-1.0, 1.0), vz=-0.5, yaw=0.0),
        PilotCommand(t_issued=0.51, dir=(0.0, 0.0), vz=0.0, yaw=1.0),
    ]
    path = str(tmp_path / "cmd.csv")
    write_command_log(cmds, path)
    back = read_command_log(path)
    assert back == cmds  # repr round-trips floats exactly


def test_command_log_header(tmp_path):
    path = str(tmp_path / "cmd.csv")
    write_command_log([c_at(0.1)], path)
    first = open(path).readline().strip()
    assert first == "t,dir_x,dir_y,vz,yaw"


def test_write_rejects_non_monotone(tmp_path):
    with pytest.raises(NonMonotoneLog):
        write_command_log([c_at(0.2), c_at(0.2)], str(tmp_path / "x.csv"))


def test_read_rejects_bad_files(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("nope\n0.1,0,0,0,0\n")
    with pytest.raises(ValueError, match="header"):
        read_command_log(str(p))
    p.write_text("t,dir_x,dir_y,vz,yaw\n0.1,0,0,0\n")
    with pytest.raises(ValueError, match="bad record"):
        read_command_log(str(p))
    p.write_text("t,dir_x,dir_y,vz,yaw\n0.2,0,0,0,0\n0.1,0,0,0,0\n")
    with pytest.raises(NonMonotoneLog):
        read_command_log(str(p))


def test_log_of_chaotic_session_replays_identically(tmp_path):
    pilot = ChaoticPilot(ReactionModel(seed=5))
    recorded = []
    for k in range(500):
        c = pilot.step(REST, round(k * 0.01, 6))
        if c is not None:
            recorded.append(c)
    path = str(tmp_path / "chaotic.csv")
    write_command_log(recorded, path)
    replay = ReplayPilot(read_command_log(path))
    replayed = []
    for k in range(500):
        c = replay.step(REST, round(k * 0.01, 6))
        if c is not None:
            replayed.append(c)
    assert replayed == recorded
