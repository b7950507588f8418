"""Reduced motion model of the blimp and its fixed-timestep integrator.

The model keeps three translational degrees of freedom plus yaw.  The
gondola hangs below the envelope, so horizontal thrust tilts the body
like a driven pendulum; the tilt angle in turn rotates the thrust
vector, which is what couples horizontal drive into vertical motion.
Per-axis equations (axis i is x or y, +z points along gravity):

    dp_i/dt   = v_i
    dz/dt     = v_z
    dpsi/dt   = omega_z
    m  dv_i/dt        = f_i cos(tilt_i) - Dh v_i
    m  dv_z/dt        = f_z - sum_i f_i sin(tilt_i) - Dz v_z + kb |v_xy|^2
    Iy d(tilt_rate_i)/dt = f_i r2 - m g r1 sin(tilt_i) - Dwy tilt_rate_i
    Iz d(omega_z)/dt  = tau_z - (Dh r3^2 + Dwz) omega_z

The Bernoulli term kb |v_xy|^2 acts downward: air accelerating around
the envelope lowers pressure above it and the blimp descends when it
translates.  Yaw is pure first-order rotation, fully decoupled from
translation, which is what makes the closed-form oracle below exact.

Tilt is only meaningful within |tilt_i| < pi/2; the derivative raises
ModelRegionViolation outside, rather than silently integrating garbage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    BlimpParams,
    BlimpState,
    ModelRegionViolation,
    ThrustExceedsBalanceRange,
    TiltOutOfRange,
    Vec2,
    Wrench,
)

MAX_DT = 0.02


@dataclass(frozen=True)
class StateDerivative:
    """Time derivative of every dynamic field of BlimpState."""

    d_p_xy: Vec2
    d_z: float
    d_v_xy: Vec2
    d_v_z: float
    d_tilt: Vec2
    d_tilt_rate: Vec2
    d_psi: float
    d_omega_z: float


def balanced_pitch_for_thrust(F_h: float, p: BlimpParams) -> float:
    """Equilibrium tilt theta0 under constant horizontal thrust F_h.

    At balance the thruster moment about the center of buoyancy cancels
    the gravity-pendulum moment: F_h r2 = m g r1 sin(theta0), so
    theta0 = asin(F_h r2 / (r1 m g)).  Raises ThrustExceedsBalanceRange
    when the argument leaves [-1, 1]; there is no balanced tilt then and
    clamping would hide an infeasible demand.
    """
    a = F_h * p.r2 / (p.r1 * p.m * p.g)
    if abs(a) > 1.0:
        raise ThrustExceedsBalanceRange(
            f"|F_h|={abs(F_h):.6g} N exceeds balance range "
            f"{p.r1 * p.m * p.g / p.r2:.6g} N")
    return math.asin(a)


def thrust_for_balanced_pitch(theta0: float, p: BlimpParams) -> float:
    """Exact inverse of balanced_pitch_for_thrust: F = (r1/r2) m g sin(theta0)."""
    if abs(theta0) >= math.pi / 2:
        raise TiltOutOfRange(f"|theta0|={abs(theta0):.6g} rad not below pi/2")
    return (p.r1 / p.r2) * p.m * p.g * math.sin(theta0)


def bernoulli_force(v_xy: Vec2, p: BlimpParams) -> float:
    """Downward coupling force kb |v_xy|^2 (N, >= 0)."""
    return p.kb * (v_xy[0] * v_xy[0] + v_xy[1] * v_xy[1])


# State vector layout used by the integrator: keep in one place so the
# packing cannot drift out of sync with the physics below.
# (px, py, z, vx, vy, vz, tx, ty, wx, wy, psi, wz) with w = rates.


def _derive(y, w: Wrench, p: BlimpParams):
    px, py, z, vx, vy, vz, tx, ty, rx, ry, psi, wz = y
    if abs(tx) >= math.pi / 2 or abs(ty) >= math.pi / 2:
        raise ModelRegionViolation(
            f"tilt ({tx:.4g}, {ty:.4g}) rad left the model region |tilt| < pi/2")
    fx, fy = w.f_xy
    sin_tx, cos_tx = math.sin(tx), math.cos(tx)
    sin_ty, cos_ty = math.sin(ty), math.cos(ty)
    dvx = (fx * cos_tx - p.Dh * vx) / p.m
    dvy = (fy * cos_ty - p.Dh * vy) / p.m
    dvz = (w.f_z - fx * sin_tx - fy * sin_ty - p.Dz * vz
           + p.kb * (vx * vx + vy * vy)) / p.m
    drx = (fx * p.r2 - p.m * p.g * p.r1 * sin_tx - p.Dwy * rx) / p.Iy
    dry = (fy * p.r2 - p.m * p.g * p.r1 * sin_ty - p.Dwy * ry) / p.Iy
    dwz = (w.tau_z - (p.Dh * p.r3 * p.r3 + p.Dwz) * wz) / p.Iz
    return (vx, vy, vz, dvx, dvy, dvz, rx, ry, drx, dry, wz, dwz)


def _pack(s: BlimpState):
    return (s.p_xy[0], s.p_xy[1], s.z, s.v_xy[0], s.v_xy[1], s.v_z,
            s.tilt[0], s.tilt[1], s.tilt_rate[0], s.tilt_rate[1],
            s.psi, s.omega_z)


def _unpack(y, t: float) -> BlimpState:
    return BlimpState(
        p_xy=(y[0], y[1]), z=y[2], v_xy=(y[3], y[4]), v_z=y[5],
        tilt=(y[6], y[7]), tilt_rate=(y[8], y[9]), psi=y[10], omega_z=y[11],
        t=t)


def derivative(s: BlimpState, w: Wrench, p: BlimpParams) -> StateDerivative:
    """Right-hand side of the model at state ``s`` under wrench ``w``."""
    d = _derive(_pack(s), w, p)
    return StateDerivative(
        d_p_xy=(d[0], d[1]), d_z=d[2], d_v_xy=(d[3], d[4]), d_v_z=d[5],
        d_tilt=(d[6], d[7]), d_tilt_rate=(d[8], d[9]),
        d_psi=d[10], d_omega_z=d[11])


def step_rk4(s: BlimpState, w: Wrench, p: BlimpParams, dt: float) -> BlimpState:
    """One classical Runge-Kutta step with ``w`` held constant over dt.

    dt must lie in (0, 0.02]; the upper bound keeps the stiffest default
    mode (the tilt pendulum, ~6 rad/s) far inside the stability region.
    Deterministic: identical inputs give bit-identical outputs.
    """
    if not (0.0 < dt <= MAX_DT):
        raise ValueError(f"dt={dt!r} outside (0, {MAX_DT}]")
    y0 = _pack(s)
    k1 = _derive(y0, w, p)
    h2 = dt / 2.0
    k2 = _derive(tuple(a + h2 * b for a, b in zip(y0, k1)), w, p)
    k3 = _derive(tuple(a + h2 * b for a, b in zip(y0, k2)), w, p)
    k4 = _derive(tuple(a + dt * b for a, b in zip(y0, k3)), w, p)
    h6 = dt / 6.0
    y1 = tuple(a + h6 * (b + 2.0 * c + 2.0 * d + e)
               for a, b, c, d, e in zip(y0, k1, k2, k3, k4))
    return _unpack(y1, s.t + dt)


def closed_form_yaw(omega0: float, tau_z: float, p: BlimpParams, t: float) -> float:
    """Exact yaw rate under constant torque.

    The yaw equation Iz dw/dt = tau - c w with c = Dh r3^2 + Dwz is a
    scalar linear ODE: w(t) = w_ss + (w0 - w_ss) exp(-c t / Iz) with
    w_ss = tau / c.  Used as the integrator oracle in tests.
    """
    if t < 0.0:
        raise ValueError("t must be >= 0")
    c = p.Dh * p.r3 * p.r3 + p.Dwz
    w_ss = tau_z / c
    return w_ss + (omega0 - w_ss) * math.exp(-c * t / p.Iz)


def rotational_energy(omega_z: float, p: BlimpParams) -> float:
    """Rotational kinetic energy E = Iz omega^2 / 2 (J)."""
    return 0.5 * p.Iz * omega_z * omega_z
