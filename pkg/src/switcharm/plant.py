"""Discrete-time electromechanical plant.

Elbow: forearm plus payload hanging on a non-backdrivable worm stage driven
by the elbow gearmotor. Grip: lead-driven jaw with a linear-spring object
contact. Both motors are quasi-static (speed settles within the tick).

Angles in radians with 0 = forearm horizontal, positive = flexion (up).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import NamedTuple, Optional

from .controller import ControllerOutputs, ElbowCmd, GripCmd
from .motor_model import (
    ELBOW_80838_5,
    GRIPPER_1271,
    MotorParams,
    current_draw,
    fit_motor,
    steady_state_speed,
)

G = 9.81  # m/s^2


@dataclass(frozen=True)
class PlantParams:
    elbow_motor: MotorParams = field(default_factory=lambda: fit_motor(ELBOW_80838_5))
    grip_motor: MotorParams = field(default_factory=lambda: fit_motor(GRIPPER_1271))
    worm_ratio: float = 100.0
    worm_efficiency: float = 0.5
    forearm_gravity_torque: float = 0.5886  # N*m, 0.4 kg at 0.15 m, horizontal
    payload_mass: float = 0.0  # kg
    payload_lever: float = 0.30  # m
    theta_min: float = -0.52  # rad, hard stop
    theta_max: float = 2.09  # rad, hard stop
    theta_down_limit: float = -0.50  # rad, limit switch trip
    theta_up_limit: float = 2.00  # rad, limit switch trip
    aperture_max: float = 0.10  # m
    drive_radius: float = 0.01  # m of aperture per rad of grip output shaft
    object_size: Optional[float] = None  # m, None = nothing in the hand
    object_stiffness: float = 2000.0  # N/m, also used for both jaw end-stops
    adc_fullscale_current: float = 0.5  # A
    adc_bits: int = 8
    comparator_threshold: float = 0.085  # A, gripper rated current
    comparator_hysteresis: float = 0.10

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if not (self.theta_min < self.theta_down_limit < self.theta_up_limit < self.theta_max):
            raise ValueError(
                "need theta_min < theta_down_limit < theta_up_limit < theta_max, got "
                f"{self.theta_min}, {self.theta_down_limit}, {self.theta_up_limit}, {self.theta_max}"
            )
        if not 0 < self.worm_efficiency <= 1:
            raise ValueError(f"worm_efficiency must be in (0, 1], got {self.worm_efficiency}")
        if self.worm_ratio <= 0:
            raise ValueError(f"worm_ratio must be > 0, got {self.worm_ratio}")
        if self.drive_radius <= 0:
            raise ValueError(f"drive_radius must be > 0, got {self.drive_radius}")
        if self.aperture_max <= 0:
            raise ValueError(f"aperture_max must be > 0, got {self.aperture_max}")
        if not 0 < self.comparator_threshold <= self.adc_fullscale_current:
            raise ValueError("need 0 < comparator_threshold <= adc_fullscale_current")
        if self.adc_bits < 1 or int(self.adc_bits) != self.adc_bits:
            raise ValueError(f"adc_bits must be a positive integer, got {self.adc_bits}")
        if not 0 <= self.comparator_hysteresis < 1:
            raise ValueError(f"comparator_hysteresis must be in [0, 1), got {self.comparator_hysteresis}")
        if self.object_stiffness <= 0:
            raise ValueError(f"object_stiffness must be > 0, got {self.object_stiffness}")
        if self.object_size is not None and self.object_size < 0:
            raise ValueError(f"object_size must be >= 0, got {self.object_size}")
        if self.payload_mass < 0 or self.payload_lever < 0 or self.forearm_gravity_torque < 0:
            raise ValueError("payload_mass, payload_lever and forearm_gravity_torque must be >= 0")

    # Joint-side view of the elbow motor through the worm stage.
    @property
    def joint_stall_torque(self) -> float:
        return self.elbow_motor.stall_torque * self.worm_ratio * self.worm_efficiency

    @property
    def joint_no_load_speed(self) -> float:
        return self.elbow_motor.no_load_speed / self.worm_ratio


PLANT_PARAM_NAMES = tuple(f.name for f in fields(PlantParams))


class PlantState(NamedTuple):
    theta: float  # rad
    omega: float  # rad/s
    aperture: float  # m, clamped to [0, aperture_max]
    grip_current: float  # A
    elbow_current: float  # A
    comparator_latched: bool
    adc_code: int = 0
    # Drive position of the jaw. Equals aperture except while the jaw is
    # pressed into an end-stop, where it runs past it by the stop deflection.
    jaw: float = 0.0


class SensorFrame(NamedTuple):
    elbow_max_up_limit: bool
    elbow_max_down_limit: bool
    overcurrent_comparator: bool


def initial_state(params: PlantParams, theta: float = 0.0) -> PlantState:
    """Arm at ``theta`` at rest, hand fully open, motors off."""
    if not params.theta_min <= theta <= params.theta_max:
        raise ValueError(f"initial theta {theta} outside hard stops")
    return PlantState(
        theta=theta,
        omega=0.0,
        aperture=params.aperture_max,
        grip_current=0.0,
        elbow_current=0.0,
        comparator_latched=False,
        adc_code=0,
        jaw=params.aperture_max,
    )


def sensors(state: PlantState, params: PlantParams) -> SensorFrame:
    return SensorFrame(
        elbow_max_up_limit=state.theta >= params.theta_up_limit,
        elbow_max_down_limit=state.theta <= params.theta_down_limit,
        overcurrent_comparator=state.comparator_latched,
    )


def gravity_torque(params: PlantParams, theta: float) -> float:
    """Joint torque from forearm and payload weight; positive opposes lifting."""
    lever_torque = params.forearm_gravity_torque + params.payload_mass * G * params.payload_lever
    return lever_torque * math.cos(theta)


def adc_encode(current: float, params: PlantParams) -> int:
    """Quantize a current to an unsigned ADC code, rounding half up."""
    top = (1 << int(params.adc_bits)) - 1
    code = math.floor(current / params.adc_fullscale_current * top + 0.5)
    return min(max(code, 0), top)


def trip_code(params: PlantParams) -> int:
    return adc_encode(params.comparator_threshold, params)


def release_code(params: PlantParams) -> float:
    return trip_code(params) * (1.0 - params.comparator_hysteresis)


def comparator_step(latched: bool, code: int, params: PlantParams) -> bool:
    if code >= trip_code(params):
        return True
    if code <= release_code(params):
        return False
    return latched


def contact_force(params: PlantParams, jaw: float) -> tuple[float, float]:
    """Spring forces on the jaw as (resisting closing, resisting opening), N."""
    k = params.object_stiffness
    closing = 0.0
    if params.object_size is not None and jaw < params.object_size:
        closing = k * (params.object_size - jaw)
    elif jaw < 0.0:
        closing = k * -jaw
    opening = k * (jaw - params.aperture_max) if jaw > params.aperture_max else 0.0
    return closing, opening


def _elbow_step(
    state: PlantState, params: PlantParams, cmd: ElbowCmd, dt: float
) -> tuple[float, float, float]:
    if cmd is ElbowCmd.OFF:
        # Worm stage is self-locking: the joint holds under any load.
        return state.theta, 0.0, 0.0

    reduction = params.worm_ratio * params.worm_efficiency
    gravity = gravity_torque(params, state.theta)
    # Downward travel is still drive-governed; gravity only ever unloads the worm.
    joint_load = max(0.0, gravity) if cmd is ElbowCmd.UP else max(0.0, -gravity)
    motor_load = joint_load / reduction
    speed = steady_state_speed(params.elbow_motor, motor_load) / params.worm_ratio
    omega = speed if cmd is ElbowCmd.UP else -speed
    current = current_draw(params.elbow_motor, motor_load, driven=True)

    theta = state.theta + omega * dt
    if theta > params.theta_max or theta < params.theta_min:
        theta = min(max(theta, params.theta_min), params.theta_max)
        # Blocked against a hard stop.
        if theta == state.theta:
            omega = 0.0
            current = params.elbow_motor.stall_current
    return theta, omega, current


def _grip_step(
    state: PlantState, params: PlantParams, cmd: GripCmd, dt: float
) -> tuple[float, float]:
    if cmd is GripCmd.OFF:
        return state.jaw, 0.0
    resist_close, resist_open = contact_force(params, state.jaw)
    if cmd is GripCmd.CLOSE:
        load = resist_close * params.drive_radius
        direction = -1.0
    else:
        load = resist_open * params.drive_radius
        direction = 1.0
    speed = steady_state_speed(params.grip_motor, load)
    jaw = state.jaw + direction * params.drive_radius * speed * dt
    return jaw, current_draw(params.grip_motor, load, driven=True)


def plant_step(
    state: PlantState, params: PlantParams, commands: ControllerOutputs, dt: float
) -> tuple[PlantState, SensorFrame]:
    """Advance the plant by ``dt`` seconds under the given motor commands.

    Loads are evaluated at the start of the tick; the reported currents are
    those drawn during the tick and positions are end-of-tick values.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    theta, omega, elbow_current = _elbow_step(state, params, commands.elbow_cmd, dt)
    jaw, grip_current = _grip_step(state, params, commands.grip_cmd_out, dt)
    aperture = min(max(jaw, 0.0), params.aperture_max)
    code = adc_encode(grip_current, params)
    latched = comparator_step(state.comparator_latched, code, params)
    new = PlantState(
        theta=theta,
        omega=omega,
        aperture=aperture,
        grip_current=grip_current,
        elbow_current=elbow_current,
        comparator_latched=latched,
        adc_code=code,
        jaw=jaw,
    )
    return new, sensors(new, params)
