"""Co-simulation of a switch-controlled transhumeral prosthesis.

A portable tick-driven controller (debounced switches, elbow and grip state
machines, current-feedback grip cutoff) runs against a quasi-static
electromechanical plant fitted from gearmotor datasheets.
"""

from .config import ConfigError, SimConfig, apply_overrides, load_config
from .controller import (
    ControllerOutputs,
    ControllerState,
    ElbowCmd,
    ElbowState,
    GripCmd,
    GripState,
    SwitchFrame,
    controller_step,
    debounce_step,
    grip_trigger,
    map_outputs_to_pins,
    reset_controller,
)
from .engine import run_simulation
from .motor_model import (
    BUILTIN_SPECS,
    ELBOW_80838_5,
    GRIPPER_1271,
    MotorParams,
    MotorSpec,
    current_draw,
    fit_motor,
    steady_state_speed,
)
from .plant import PlantParams, PlantState, adc_encode, comparator_step, gravity_torque, plant_step
from .scenario import Scenario, ScenarioError, evaluate_assertions, parse_scenario
from .trace import Trace, TraceSample, serialize_trace

__all__ = [
    "BUILTIN_SPECS", "ConfigError", "ControllerOutputs", "ControllerState", "ELBOW_80838_5",
    "ElbowCmd", "ElbowState", "GRIPPER_1271", "GripCmd", "GripState", "MotorParams", "MotorSpec",
    "PlantParams", "PlantState", "Scenario", "ScenarioError", "SimConfig", "SwitchFrame", "Trace",
    "TraceSample", "adc_encode", "apply_overrides", "comparator_step", "controller_step",
    "current_draw", "debounce_step", "evaluate_assertions", "fit_motor", "gravity_torque",
    "grip_trigger", "load_config", "map_outputs_to_pins", "parse_scenario", "plant_step",
    "reset_controller", "run_simulation", "serialize_trace", "steady_state_speed",
]
