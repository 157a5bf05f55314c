"""Fixed-timestep co-simulation of controller and plant.

Each tick: apply due scenario events, assemble the raw input frame from the
operator switches and the plant sensors of the previous tick, debounce,
step the controller, step the plant, record a sample.
"""

from __future__ import annotations

import dataclasses
import math

from .config import SimConfig, apply_overrides
from .controller import (
    SwitchFrame,
    controller_step,
    debounce_step,
    reset_controller,
)
from .plant import initial_state, plant_step, sensors
from .scenario import TIME_EPS, EventKind, Scenario, time_to_tick
from .trace import Trace, TraceSample

_SWITCH_INDEX = {"ELBOW_UP": 0, "ELBOW_DOWN": 1, "GRIP": 2}


def effective_config(scenario: Scenario, config: SimConfig | None = None) -> SimConfig:
    """Config with the scenario's ``param`` lines and ``dt`` applied on top."""
    config = config or SimConfig()
    if scenario.params:
        config = apply_overrides(config, scenario.params)
    if scenario.dt is not None:
        config = dataclasses.replace(config, dt=scenario.dt)
    return config


def tick_count(duration: float, dt: float) -> int:
    return math.ceil(duration / dt - TIME_EPS)


def run_simulation(scenario: Scenario, config: SimConfig | None = None, *, stride: int = 1) -> Trace:
    """Simulate ``scenario`` and return the trace (every ``stride``-th tick)."""
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    config = effective_config(scenario, config)
    params, dt = config.plant, config.dt
    if not scenario.duration > 0:
        raise ValueError(f"scenario duration must be > 0, got {scenario.duration}")

    ctrl = reset_controller(config.n_debounce, config.t_open_max)
    plant = initial_state(params)
    sensed = sensors(plant, params)
    operator = [False, False, False]
    pending = [(time_to_tick(ev.time, dt), ev) for ev in scenario.events]
    next_event = 0

    trace = Trace(dt=dt, stride=stride)
    for k in range(tick_count(scenario.duration, dt)):
        while next_event < len(pending) and pending[next_event][0] <= k:
            ev = pending[next_event][1]
            next_event += 1
            if ev.kind is EventKind.PRESS:
                operator[_SWITCH_INDEX[ev.args[0]]] = True
            elif ev.kind is EventKind.RELEASE:
                operator[_SWITCH_INDEX[ev.args[0]]] = False
            elif ev.kind is EventKind.SET_PAYLOAD:
                params = dataclasses.replace(params, payload_mass=ev.args[0])
            elif ev.kind is EventKind.PLACE_OBJECT:
                params = dataclasses.replace(params, object_size=ev.args[0], object_stiffness=ev.args[1])

        raw = SwitchFrame(*operator, *sensed)
        debouncer, stable = debounce_step(ctrl.debouncer, raw)
        ctrl, out = controller_step(ctrl._replace(debouncer=debouncer), stable)
        plant, sensed = plant_step(plant, params, out, dt)

        if k % stride == 0:
            trace.samples.append(
                TraceSample(
                    time=k * dt,
                    raw=raw,
                    stable=stable,
                    elbow_fsm=ctrl.elbow_fsm,
                    grip_fsm=ctrl.grip_fsm,
                    elbow_cmd=out.elbow_cmd,
                    grip_cmd_out=out.grip_cmd_out,
                    theta=plant.theta,
                    omega=plant.omega,
                    aperture=plant.aperture,
                    grip_current=plant.grip_current,
                    adc_code=plant.adc_code,
                    comparator=plant.comparator_latched,
                )
            )
    return trace
