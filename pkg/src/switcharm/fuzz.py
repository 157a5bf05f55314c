"""Seeded random drive of controller + plant with per-tick safety checks.

Input generation is fixed so verdicts are reproducible in any language:

* PRNG is SplitMix64 (state += 0x9E3779B97F4A7C15, then the two
  xor-shift-multiply rounds with 0xBF58476D1CE4E5B9 / 0x94D049BB133111EB),
  all arithmetic modulo 2**64, seeded with the user seed.
* Every tick draws one 64-bit word ``r``. When the current frame's hold has
  run out, ``r & 0x3F`` becomes the new 6-bit frame (bit i drives
  ``SwitchFrame`` field i) and ``1 + ((r >> 6) & 0xFF)`` its hold in ticks.
* Bits 0-2 are the operator switches. Bits 3-5 are OR-ed onto the plant's
  real limit-switch and comparator outputs as injected sensor faults.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .config import SimConfig
from .controller import (
    ControllerOutputs,
    ControllerState,
    ElbowCmd,
    GripState,
    SwitchFrame,
    controller_step,
    debounce_step,
    map_outputs_to_pins,
    reset_controller,
)
from .plant import PlantParams, PlantState, initial_state, plant_step, sensors

MASK64 = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int) -> None:
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)


@dataclass(frozen=True)
class Violation:
    tick: int
    invariant: str
    detail: str

    def __str__(self) -> str:
        return f"tick {self.tick}: {self.invariant}: {self.detail}"


@dataclass(frozen=True)
class FuzzResult:
    ticks: int
    seed: int
    violation: Optional[Violation]
    grip_toggles: int
    limit_ticks: int

    @property
    def ok(self) -> bool:
        return self.violation is None


def check_tick(
    tick: int,
    prev: ControllerState,
    ctrl: ControllerState,
    stable: SwitchFrame,
    out: ControllerOutputs,
    plant: PlantState,
    params: PlantParams,
) -> Optional[Violation]:
    """Return the first safety invariant broken on this tick, if any."""
    pins = map_outputs_to_pins(out)
    if pins.elbow_pin_a and pins.elbow_pin_b:
        return Violation(tick, "h-bridge shoot-through", f"elbow pins {pins[:2]}")
    if stable.elbow_max_up_limit and out.elbow_cmd is ElbowCmd.UP:
        return Violation(tick, "limit dominance", "UP commanded with max-up limit asserted")
    if stable.elbow_max_down_limit and out.elbow_cmd is ElbowCmd.DOWN:
        return Violation(tick, "limit dominance", "DOWN commanded with max-down limit asserted")
    if ctrl.grip_fsm is GripState.HOLDING and prev.grip_fsm is not GripState.HOLDING:
        if prev.grip_fsm is not GripState.CLOSING or not stable.overcurrent_comparator:
            return Violation(tick, "grip reachability",
                             f"HOLDING entered from {prev.grip_fsm.value}, comparator={stable.overcurrent_comparator}")
    if not params.theta_min <= plant.theta <= params.theta_max:
        return Violation(tick, "elbow hard stops", f"theta={plant.theta!r}")
    if not 0.0 <= plant.aperture <= params.aperture_max:
        return Violation(tick, "aperture bounds", f"aperture={plant.aperture!r}")
    if plant.grip_current < 0 or plant.elbow_current < 0:
        return Violation(tick, "non-negative current", f"{plant.grip_current}, {plant.elbow_current}")
    return None


def run_fuzz(ticks: int, seed: int, config: SimConfig | None = None) -> FuzzResult:
    """Drive ``ticks`` random frames; stop at the first violated invariant."""
    config = config or SimConfig()
    params, dt = config.plant, config.dt
    rng = SplitMix64(seed)
    ctrl = reset_controller(config.n_debounce, config.t_open_max)
    plant = initial_state(params)
    sensed = sensors(plant, params)

    bits = 0
    hold = 0
    toggles = 0
    limit_ticks = 0
    for k in range(ticks):
        r = rng.next()
        if hold == 0:
            bits = r & 0x3F
            hold = 1 + ((r >> 6) & 0xFF)
        hold -= 1

        raw = SwitchFrame(
            bool(bits & 1),
            bool(bits & 2),
            bool(bits & 4),
            sensed.elbow_max_up_limit or bool(bits & 8),
            sensed.elbow_max_down_limit or bool(bits & 16),
            sensed.overcurrent_comparator or bool(bits & 32),
        )
        debouncer, stable = debounce_step(ctrl.debouncer, raw)
        prev = ctrl
        ctrl, out = controller_step(ctrl._replace(debouncer=debouncer), stable)
        plant, sensed = plant_step(plant, params, out, dt)

        if ctrl.grip_fsm is not prev.grip_fsm:
            toggles += 1
        if stable.elbow_max_up_limit or stable.elbow_max_down_limit:
            limit_ticks += 1
        violation = check_tick(k, prev, ctrl, stable, out, plant, params)
        if violation is not None:
            return FuzzResult(k + 1, seed, violation, toggles, limit_ticks)
    return FuzzResult(ticks, seed, None, toggles, limit_ticks)
