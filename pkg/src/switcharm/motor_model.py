"""Quasi-static DC gearmotor model fitted from two datasheet anchor points.

The torque-speed characteristic is the straight line through the no-load
point (no_load_speed, 0) and the rated point (rated_speed, rated_torque).
Current is proportional to delivered torque (no-load current taken as 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

RPM_TO_RAD_S = 2.0 * math.pi / 60.0


@dataclass(frozen=True)
class MotorSpec:
    """Manufacturer datasheet values, quoted at the gearbox output shaft."""

    nominal_voltage: float  # V
    no_load_speed: float  # rpm
    rated_speed: float  # rpm
    rated_torque: float  # N*m
    rated_current: float  # A
    gear_ratio: float = 1.0  # metadata only, never re-applied
    mass: float = 0.0  # kg

    def validate(self) -> None:
        if self.nominal_voltage <= 0:
            raise ValueError(f"nominal_voltage must be > 0, got {self.nominal_voltage}")
        if self.rated_torque <= 0:
            raise ValueError(f"rated_torque must be > 0, got {self.rated_torque}")
        if self.rated_current <= 0:
            raise ValueError(f"rated_current must be > 0, got {self.rated_current}")
        if self.rated_speed < 0:
            raise ValueError(f"rated_speed must be >= 0, got {self.rated_speed}")
        if self.rated_speed >= self.no_load_speed:
            raise ValueError(
                "rated_speed must be below no_load_speed "
                f"({self.rated_speed} >= {self.no_load_speed} rpm): degenerate speed-torque line"
            )
        for name in ("gear_ratio", "mass"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class MotorParams:
    no_load_speed: float  # rad/s
    stall_torque: float  # N*m
    torque_per_ampere: float  # N*m/A

    def __post_init__(self) -> None:
        if not (self.no_load_speed > 0 and self.stall_torque > 0 and self.torque_per_ampere > 0):
            raise ValueError(f"motor parameters must all be positive: {self}")

    @property
    def stall_current(self) -> float:
        return self.stall_torque / self.torque_per_ampere


# 1271 series gearmotor, 10:1 head. 36 mm body.
GRIPPER_1271 = MotorSpec(
    nominal_voltage=12.0,
    no_load_speed=215.0,
    rated_speed=120.0,
    rated_torque=0.2,
    rated_current=0.085,
    gear_ratio=10.0,
    mass=0.055,
)

# 80838.5 instrument gearmotor, 13:2 head. Rated torque is listed as 1.1 N*cm
# and is kept verbatim; the plant's worm stage carries the missing reduction.
ELBOW_80838_5 = MotorSpec(
    nominal_voltage=24.0,
    no_load_speed=135.0,
    rated_speed=80.0,
    rated_torque=0.011,
    rated_current=0.115,
    gear_ratio=6.5,
    mass=0.145,
)

BUILTIN_SPECS: dict[str, MotorSpec] = {
    "gripper-1271": GRIPPER_1271,
    "elbow-80838.5": ELBOW_80838_5,
}


def fit_motor(spec: MotorSpec) -> MotorParams:
    """Fit the affine speed-torque line through the no-load and rated points.

    Raises ``ValueError`` if the spec is invalid, in particular when
    ``rated_speed >= no_load_speed`` (the two anchors would not define a line
    with a finite stall torque).
    """
    spec.validate()
    stall = spec.rated_torque * spec.no_load_speed / (spec.no_load_speed - spec.rated_speed)
    return MotorParams(
        no_load_speed=spec.no_load_speed * RPM_TO_RAD_S,
        stall_torque=stall,
        torque_per_ampere=spec.rated_torque / spec.rated_current,
    )


def steady_state_speed(params: MotorParams, load_torque: float) -> float:
    """Output speed (rad/s) where the motor line balances ``load_torque``.

    Loads at or above stall return exactly 0.0.
    """
    if load_torque >= params.stall_torque:
        return 0.0
    return max(0.0, params.no_load_speed * (1.0 - load_torque / params.stall_torque))


def current_draw(params: MotorParams, load_torque: float, driven: bool) -> float:
    """Winding current (A); an undriven motor draws nothing, a blocked one draws stall current."""
    if not driven:
        return 0.0
    return min(max(load_torque, 0.0), params.stall_torque) / params.torque_per_ampere


def anchor_residuals(spec: MotorSpec, params: MotorParams | None = None) -> tuple[float, float]:
    """Relative round-trip error of the rated anchor: (speed, current)."""
    if params is None:
        params = fit_motor(spec)
    speed = steady_state_speed(params, spec.rated_torque) / RPM_TO_RAD_S
    current = current_draw(params, spec.rated_torque, driven=True)
    speed_res = abs(speed - spec.rated_speed) / spec.rated_speed if spec.rated_speed else abs(speed)
    current_res = abs(current - spec.rated_current) / spec.rated_current
    return speed_res, current_res
