import itertools
from collections import deque

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from switcharm.controller import (
    ALL_FALSE,
    ControllerOutputs,
    ElbowCmd,
    ElbowState,
    GripCmd,
    GripState,
    SwitchFrame,
    controller_step,
    debounce_step,
    grip_trigger,
    map_outputs_to_pins,
    new_debouncer,
    outputs_for,
    reset_controller,
)

ALL_FRAMES = [SwitchFrame.from_bits(b) for b in range(64)]


def frame(**kw):
    return SwitchFrame(**kw)


def run_debounce(levels, n=5, index=0):
    """Feed a single input's raw levels; return the stable levels seen per tick."""
    state = new_debouncer(n)
    out = []
    for level in levels:
        raw = [False] * 6
        raw[index] = level
        state, stable = debounce_step(state, SwitchFrame(*raw))
        assert all(0 <= c <= n for c in state.counters)
        out.append(stable[index])
    return out


# --- debouncer -------------------------------------------------------------


def test_debounce_passes_after_n_samples():
    stable = run_debounce([True] * 8, n=5)
    assert stable == [False] * 4 + [True] * 4  # flips on the 5th sample


def test_debounce_single_glitch_ignored():
    levels = [False] * 5 + [True] + [False] * 10
    assert run_debounce(levels, n=5) == [False] * 16


def test_debounce_alternating_never_changes():
    # Hand trace, N=5: counter goes 1,0,1,0,... and never reaches 5.
    levels = [i % 2 == 0 for i in range(20)]
    assert run_debounce(levels, n=5) == [False] * 20


def test_debounce_release_also_needs_n_samples():
    levels = [True] * 5 + [False] * 6
    assert run_debounce(levels, n=5) == [False] * 4 + [True] * 5 + [False] * 2


def test_debounce_inputs_independent():
    state = new_debouncer(2)
    raw = frame(elbow_up_cmd=True, overcurrent_comparator=True)
    state, s1 = debounce_step(state, raw)
    state, s2 = debounce_step(state, raw._replace(elbow_up_cmd=False))
    assert s1 == ALL_FALSE
    assert s2 == frame(overcurrent_comparator=True)


def test_debounce_rejects_zero_window():
    with pytest.raises(ValueError):
        new_debouncer(0)


@given(st.lists(st.booleans(), max_size=200), st.integers(1, 8))
def test_debounce_changes_only_after_n_agreeing_samples(levels, n):
    stable = run_debounce(levels, n=n)
    prev = False
    for i, s in enumerate(stable):
        if s != prev:
            window = levels[max(0, i - n + 1): i + 1]
            assert len(window) == n and all(v == s for v in window)
        prev = s


# --- grip trigger ----------------------------------------------------------


def test_trigger_rising_edge_once():
    state = reset_controller()
    state, t1 = grip_trigger(state, False)
    state, t2 = grip_trigger(state, True)
    assert (t1, t2) == (False, True)


def test_trigger_held_fires_once():
    state = reset_controller()
    fired = 0
    for _ in range(1000):
        state, t = grip_trigger(state, True)
        fired += t
    assert fired == 1


def test_trigger_two_presses_through_debouncer():
    # Hand trace with N=5: press 6, release 6, press 6 ticks. Stable rises on
    # tick 4, falls on tick 10, rises on tick 16 -> triggers on ticks 4 and 16.
    levels = [True] * 6 + [False] * 6 + [True] * 6
    state = reset_controller(n_debounce=5)
    fired_at = []
    for tick, level in enumerate(levels):
        deb, stable = debounce_step(state.debouncer, frame(grip_cmd=level))
        state, t = grip_trigger(state._replace(debouncer=deb), stable.grip_cmd)
        if t:
            fired_at.append(tick)
    assert fired_at == [4, 16]


# --- controller_step -------------------------------------------------------


def step_from(elbow=ElbowState.IDLE, grip=GripState.OPEN, timer=0, edge=False, **inputs):
    state = reset_controller()._replace(elbow_fsm=elbow, grip_fsm=grip, opening_timer=timer,
                                        grip_edge_memory=edge)
    return controller_step(state, frame(**inputs))


def test_up_pressed_moves_up():
    state, out = step_from(elbow_up_cmd=True)
    assert state.elbow_fsm is ElbowState.MOVING_UP
    assert out.elbow_cmd is ElbowCmd.UP


def test_down_pressed_moves_down():
    state, out = step_from(elbow_down_cmd=True)
    assert (state.elbow_fsm, out.elbow_cmd) == (ElbowState.MOVING_DOWN, ElbowCmd.DOWN)


def test_max_up_limit_stops_motion():
    state, out = step_from(ElbowState.MOVING_UP, elbow_up_cmd=True, elbow_max_up_limit=True)
    assert (state.elbow_fsm, out.elbow_cmd) == (ElbowState.IDLE, ElbowCmd.OFF)


def test_max_down_limit_blocks_only_down():
    _, out = step_from(elbow_down_cmd=True, elbow_max_down_limit=True)
    assert out.elbow_cmd is ElbowCmd.OFF
    _, out = step_from(elbow_up_cmd=True, elbow_max_down_limit=True)
    assert out.elbow_cmd is ElbowCmd.UP


def test_both_pressed_is_off():
    state, out = step_from(ElbowState.MOVING_UP, elbow_up_cmd=True, elbow_down_cmd=True)
    assert (state.elbow_fsm, out.elbow_cmd) == (ElbowState.IDLE, ElbowCmd.OFF)


def test_release_stops():
    _, out = step_from(ElbowState.MOVING_DOWN)
    assert out.elbow_cmd is ElbowCmd.OFF


def test_trigger_in_open_starts_closing():
    state, out = step_from(grip_cmd=True)
    assert (state.grip_fsm, out.grip_cmd_out) == (GripState.CLOSING, GripCmd.CLOSE)


def test_comparator_in_closing_holds():
    state, out = step_from(grip=GripState.CLOSING, edge=True, grip_cmd=True, overcurrent_comparator=True)
    assert (state.grip_fsm, out.grip_cmd_out) == (GripState.HOLDING, GripCmd.OFF)


@pytest.mark.parametrize("start", [GripState.CLOSING, GripState.HOLDING])
def test_trigger_starts_opening_with_full_timer(start):
    state, out = step_from(grip=start, grip_cmd=True)
    assert (state.grip_fsm, out.grip_cmd_out) == (GripState.OPENING, GripCmd.OPEN)
    assert state.opening_timer == state.t_open_max


def test_trigger_in_opening_recloses():
    state, out = step_from(grip=GripState.OPENING, timer=10, grip_cmd=True)
    assert (state.grip_fsm, out.grip_cmd_out) == (GripState.CLOSING, GripCmd.CLOSE)


def test_comparator_in_opening_ends_at_open():
    state, out = step_from(grip=GripState.OPENING, timer=10, overcurrent_comparator=True)
    assert (state.grip_fsm, out.grip_cmd_out) == (GripState.OPEN, GripCmd.OFF)


@pytest.mark.parametrize("start", [GripState.OPEN, GripState.HOLDING])
def test_comparator_ignored_when_idle(start):
    state, out = step_from(grip=start, overcurrent_comparator=True)
    assert (state.grip_fsm, out.grip_cmd_out) == (start, GripCmd.OFF)


def test_opening_timeout_trace():
    # Hand trace with T_open_max = 4: trigger on tick 0 loads the timer, the
    # drive stays OPEN for ticks 0..3 and the FSM lands in OPEN on tick 4.
    state = reset_controller(t_open_max=4)._replace(grip_fsm=GripState.HOLDING)
    history = []
    for tick in range(6):
        state, out = controller_step(state, frame(grip_cmd=(tick == 0)))
        history.append((state.grip_fsm, state.opening_timer, out.grip_cmd_out))
    assert history == [
        (GripState.OPENING, 4, GripCmd.OPEN),
        (GripState.OPENING, 3, GripCmd.OPEN),
        (GripState.OPENING, 2, GripCmd.OPEN),
        (GripState.OPENING, 1, GripCmd.OPEN),
        (GripState.OPEN, 0, GripCmd.OFF),
        (GripState.OPEN, 0, GripCmd.OFF),
    ]


def test_trigger_and_comparator_same_tick_trigger_wins():
    # Comparator exits only apply to a state held since the start of the tick.
    state, out = step_from(grip=GripState.CLOSING, grip_cmd=True, overcurrent_comparator=True)
    assert state.grip_fsm is GripState.OPENING
    state, out = step_from(grip=GripState.OPEN, grip_cmd=True, overcurrent_comparator=True)
    assert state.grip_fsm is GripState.CLOSING


# --- pins and reset --------------------------------------------------------


@pytest.mark.parametrize(
    "elbow, grip, pins",
    [
        (ElbowCmd.UP, GripCmd.OFF, (1, 0, 0, 0)),
        (ElbowCmd.DOWN, GripCmd.OFF, (0, 1, 0, 0)),
        (ElbowCmd.OFF, GripCmd.OFF, (0, 0, 0, 0)),
        (ElbowCmd.OFF, GripCmd.CLOSE, (0, 0, 1, 0)),
        (ElbowCmd.UP, GripCmd.OPEN, (1, 0, 1, 1)),
    ],
)
def test_pin_mapping(elbow, grip, pins):
    assert tuple(map_outputs_to_pins(ControllerOutputs(elbow, grip))) == pins


def test_elbow_pins_never_both_high():
    for elbow, grip in itertools.product(ElbowCmd, GripCmd):
        a, b, _, _ = map_outputs_to_pins(ControllerOutputs(elbow, grip))
        assert (a, b) != (1, 1)


def test_reset_state():
    state = reset_controller()
    assert state.elbow_fsm is ElbowState.IDLE
    assert state.grip_fsm is GripState.OPEN
    assert state.opening_timer == 0
    assert state.debouncer.stable == ALL_FALSE
    assert state.debouncer.n_debounce == 5 and state.t_open_max == 3000
    deb, stable = debounce_step(state.debouncer, ALL_FALSE)
    _, out = controller_step(state._replace(debouncer=deb), stable)
    assert out == ControllerOutputs(ElbowCmd.OFF, GripCmd.OFF)


# --- exhaustive small model ------------------------------------------------


def reachable_states(t_open_max=3):
    """BFS over controller_step with all 64 stable frames (debouncer excluded)."""
    start = reset_controller(t_open_max=t_open_max)
    seen = {start}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        for f in ALL_FRAMES:
            nxt, _ = controller_step(state, f)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def test_exhaustive_safety_and_reachability():
    states = reachable_states()
    pairs = {(s.elbow_fsm, s.grip_fsm) for s in states}
    assert pairs == set(itertools.product(ElbowState, GripState))
    for state in states:
        for f in ALL_FRAMES:
            nxt, out = controller_step(state, f)
            assert out == outputs_for(nxt)
            pins = map_outputs_to_pins(out)
            assert (pins.elbow_pin_a, pins.elbow_pin_b) != (1, 1)
            if f.elbow_max_up_limit:
                assert out.elbow_cmd is not ElbowCmd.UP
            if f.elbow_max_down_limit:
                assert out.elbow_cmd is not ElbowCmd.DOWN
            if nxt.elbow_fsm is ElbowState.MOVING_UP:
                assert f.elbow_up_cmd and not f.elbow_max_up_limit
            if nxt.elbow_fsm is ElbowState.MOVING_DOWN:
                assert f.elbow_down_cmd and not f.elbow_max_down_limit
            if nxt.grip_fsm is GripState.HOLDING and state.grip_fsm is not GripState.HOLDING:
                assert state.grip_fsm is GripState.CLOSING and f.overcurrent_comparator


@settings(max_examples=50)
@given(st.lists(st.integers(0, 63), max_size=300))
def test_deterministic(bits):
    def trajectory():
        state = reset_controller(n_debounce=2, t_open_max=20)
        out = []
        for b in bits:
            deb, stable = debounce_step(state.debouncer, SwitchFrame.from_bits(b))
            state, o = controller_step(state._replace(debouncer=deb), stable)
            out.append((state, o))
        return out

    assert trajectory() == trajectory()
