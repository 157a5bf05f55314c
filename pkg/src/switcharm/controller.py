"""Hardware-agnostic, tick-driven controller for the switch-operated arm.

Six logical inputs, three logical outputs. Everything is an immutable value
and every step function is pure, so the same logic can be replayed, fuzzed
or enumerated exhaustively.

Per tick the caller runs ``debounce_step`` on the raw frame, then feeds the
stable frame to ``controller_step``.
"""

from __future__ import annotations

import enum
from typing import NamedTuple

DEFAULT_N_DEBOUNCE = 5  # ticks
DEFAULT_T_OPEN_MAX = 3000  # ticks


class SwitchFrame(NamedTuple):
    """One sample of the six input pins."""

    elbow_up_cmd: bool = False  # right armpit
    elbow_down_cmd: bool = False  # left armpit
    grip_cmd: bool = False  # behind shoulder / below neck
    elbow_max_up_limit: bool = False
    elbow_max_down_limit: bool = False
    overcurrent_comparator: bool = False

    @classmethod
    def from_bits(cls, bits: int) -> SwitchFrame:
        """Bit i of ``bits`` drives field i (elbow_up_cmd is bit 0)."""
        return cls(*(bool((bits >> i) & 1) for i in range(6)))


ALL_FALSE = SwitchFrame()


class ElbowState(enum.Enum):
    IDLE = "IDLE"
    MOVING_UP = "MOVING_UP"
    MOVING_DOWN = "MOVING_DOWN"


class GripState(enum.Enum):
    OPEN = "OPEN"
    CLOSING = "CLOSING"
    HOLDING = "HOLDING"
    OPENING = "OPENING"


class ElbowCmd(enum.Enum):
    OFF = "OFF"
    UP = "UP"
    DOWN = "DOWN"


class GripCmd(enum.Enum):
    OFF = "OFF"
    CLOSE = "CLOSE"
    OPEN = "OPEN"


class DebouncerState(NamedTuple):
    stable: SwitchFrame
    counters: tuple[int, ...]  # consecutive raw samples disagreeing with stable
    n_debounce: int


class ControllerState(NamedTuple):
    elbow_fsm: ElbowState
    grip_fsm: GripState
    opening_timer: int
    debouncer: DebouncerState
    grip_edge_memory: bool
    t_open_max: int


class ControllerOutputs(NamedTuple):
    elbow_cmd: ElbowCmd
    grip_cmd_out: GripCmd


class PinLevels(NamedTuple):
    elbow_pin_a: int
    elbow_pin_b: int
    grip_drive_pin: int
    grip_dir_flag: int


def new_debouncer(n_debounce: int = DEFAULT_N_DEBOUNCE) -> DebouncerState:
    if n_debounce < 1:
        raise ValueError(f"n_debounce must be >= 1, got {n_debounce}")
    return DebouncerState(ALL_FALSE, (0,) * 6, n_debounce)


def reset_controller(
    n_debounce: int = DEFAULT_N_DEBOUNCE, t_open_max: int = DEFAULT_T_OPEN_MAX
) -> ControllerState:
    """Power-on state: elbow idle, hand assumed fully open, inputs all low."""
    if t_open_max < 1:
        raise ValueError(f"t_open_max must be >= 1, got {t_open_max}")
    return ControllerState(
        elbow_fsm=ElbowState.IDLE,
        grip_fsm=GripState.OPEN,
        opening_timer=0,
        debouncer=new_debouncer(n_debounce),
        grip_edge_memory=False,
        t_open_max=t_open_max,
    )


def debounce_step(state: DebouncerState, raw: SwitchFrame) -> tuple[DebouncerState, SwitchFrame]:
    """Counter debouncer: a stable level flips on the N-th consecutive differing sample."""
    n = state.n_debounce
    stable = list(state.stable)
    counters = list(state.counters)
    for i, level in enumerate(raw):
        if level == stable[i]:
            counters[i] = 0
            continue
        counters[i] += 1
        if counters[i] >= n:
            stable[i] = bool(level)
            counters[i] = 0
    new_stable = SwitchFrame(*stable)
    return DebouncerState(new_stable, tuple(counters), n), new_stable


def grip_trigger(state: ControllerState, stable_grip_cmd: bool) -> tuple[ControllerState, bool]:
    """Rising edge of the debounced grip switch (the shoulder "jerk")."""
    triggered = stable_grip_cmd and not state.grip_edge_memory
    return state._replace(grip_edge_memory=stable_grip_cmd), triggered


def _elbow_rule(stable: SwitchFrame) -> ElbowState:
    up, down = stable.elbow_up_cmd, stable.elbow_down_cmd
    if up and not down and not stable.elbow_max_up_limit:
        return ElbowState.MOVING_UP
    if down and not up and not stable.elbow_max_down_limit:
        return ElbowState.MOVING_DOWN
    return ElbowState.IDLE


_TRIGGER_NEXT = {
    GripState.OPEN: GripState.CLOSING,
    GripState.CLOSING: GripState.OPENING,
    GripState.HOLDING: GripState.OPENING,
    GripState.OPENING: GripState.CLOSING,
}

_ELBOW_OUT = {
    ElbowState.IDLE: ElbowCmd.OFF,
    ElbowState.MOVING_UP: ElbowCmd.UP,
    ElbowState.MOVING_DOWN: ElbowCmd.DOWN,
}

_GRIP_OUT = {
    GripState.OPEN: GripCmd.OFF,
    GripState.CLOSING: GripCmd.CLOSE,
    GripState.HOLDING: GripCmd.OFF,
    GripState.OPENING: GripCmd.OPEN,
}


def outputs_for(state: ControllerState) -> ControllerOutputs:
    return ControllerOutputs(_ELBOW_OUT[state.elbow_fsm], _GRIP_OUT[state.grip_fsm])


def controller_step(
    state: ControllerState, stable: SwitchFrame
) -> tuple[ControllerState, ControllerOutputs]:
    """Advance both state machines by one tick on an already debounced frame.

    The grip trigger is handled first. Comparator and timeout exits then
    apply only to a grip state that was already active when the tick began,
    so a trigger is never cancelled on the tick it arrives.
    """
    state, triggered = grip_trigger(state, stable.grip_cmd)
    elbow = _elbow_rule(stable)

    grip = state.grip_fsm
    timer = state.opening_timer
    if triggered:
        grip = _TRIGGER_NEXT[grip]
        timer = state.t_open_max if grip is GripState.OPENING else 0
    elif grip is GripState.CLOSING:
        if stable.overcurrent_comparator:
            grip = GripState.HOLDING
    elif grip is GripState.OPENING:
        timer -= 1
        if stable.overcurrent_comparator or timer <= 0:
            grip = GripState.OPEN
            timer = 0

    state = state._replace(elbow_fsm=elbow, grip_fsm=grip, opening_timer=timer)
    return state, ControllerOutputs(_ELBOW_OUT[elbow], _GRIP_OUT[grip])


_ELBOW_PINS = {ElbowCmd.OFF: (0, 0), ElbowCmd.UP: (1, 0), ElbowCmd.DOWN: (0, 1)}
_GRIP_PINS = {GripCmd.OFF: (0, 0), GripCmd.CLOSE: (1, 0), GripCmd.OPEN: (1, 1)}


def map_outputs_to_pins(out: ControllerOutputs) -> PinLevels:
    """H-bridge pin levels. The elbow pair can never be (1, 1).

    The grip drive uses one enable pin plus a direction flag; the flag reads
    0 whenever the drive pin is low.
    """
    a, b = _ELBOW_PINS[out.elbow_cmd]
    drive, direction = _GRIP_PINS[out.grip_cmd_out]
    return PinLevels(a, b, drive, direction)
