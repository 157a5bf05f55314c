"""Simulation configuration: plant parameters plus controller tunables.

The file format is one ``key = value`` per line, ``#`` starts a comment.
Keys are the ``PlantParams`` field names plus ``n_debounce``, ``t_open_max``
and ``dt``. Motors are chosen with ``elbow_motor`` / ``grip_motor`` set to a
built-in spec name or a motor spec file, and individual fitted parameters
can be overridden with dotted keys such as ``grip_motor.stall_torque``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .controller import DEFAULT_N_DEBOUNCE, DEFAULT_T_OPEN_MAX
from .motor_model import BUILTIN_SPECS, MotorParams, MotorSpec, fit_motor
from .plant import PLANT_PARAM_NAMES, PlantParams

DEFAULT_DT = 0.001  # s

MOTOR_KEYS = ("elbow_motor", "grip_motor")
MOTOR_PARAM_FIELDS = tuple(f.name for f in dataclasses.fields(MotorParams))
INT_KEYS = frozenset({"n_debounce", "t_open_max", "adc_bits"})
NUMERIC_PLANT_KEYS = tuple(k for k in PLANT_PARAM_NAMES if k not in MOTOR_KEYS)

CONFIG_KEYS: frozenset[str] = frozenset(
    NUMERIC_PLANT_KEYS
    + MOTOR_KEYS
    + tuple(f"{m}.{p}" for m in MOTOR_KEYS for p in MOTOR_PARAM_FIELDS)
    + ("n_debounce", "t_open_max", "dt")
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    plant: PlantParams = field(default_factory=PlantParams)
    n_debounce: int = DEFAULT_N_DEBOUNCE
    t_open_max: int = DEFAULT_T_OPEN_MAX
    dt: float = DEFAULT_DT

    def __post_init__(self) -> None:
        if self.n_debounce < 1:
            raise ConfigError(f"n_debounce must be >= 1, got {self.n_debounce}")
        if self.t_open_max < 1:
            raise ConfigError(f"t_open_max must be >= 1, got {self.t_open_max}")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ConfigError(f"dt must be a positive number, got {self.dt}")


def value_kind(key: str) -> str:
    """'int', 'float', 'optional-float' or 'motor' for a known key."""
    if key in MOTOR_KEYS:
        return "motor"
    if key in INT_KEYS:
        return "int"
    if key == "object_size":
        return "optional-float"
    return "float"


def parse_number(text: str, kind: str) -> float | int | None:
    """Parse one value of the given kind; raises ``ValueError`` on junk."""
    if kind == "optional-float" and text.lower() == "none":
        return None
    if kind == "int":
        value = float(text)
        if not value.is_integer():
            raise ValueError(f"expected an integer, got {text!r}")
        return int(value)
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"expected a finite number, got {text!r}")
    return value


def parse_key_values(text: str, source: str = "<config>") -> dict[str, str]:
    """Split ``key = value`` text into a dict, rejecting unknown or repeated keys."""
    items: dict[str, str] = {}
    errors = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            errors.append(f"{source}:{lineno}: expected 'key = value'")
        elif key in items:
            errors.append(f"{source}:{lineno}: duplicate key {key!r}")
        else:
            items[key] = value
    if errors:
        raise ConfigError("\n".join(errors))
    return items


def load_motor_spec(text: str, source: str = "<spec>") -> MotorSpec:
    """Read a motor spec file (rpm, N*m, A, kg) in the key = value format."""
    items = parse_key_values(text, source)
    names = {f.name for f in dataclasses.fields(MotorSpec)}
    unknown = sorted(set(items) - names)
    if unknown:
        raise ConfigError(f"{source}: unknown motor spec keys: {', '.join(unknown)}")
    try:
        values = {k: parse_number(v, "float") for k, v in items.items()}
        spec = MotorSpec(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    try:
        spec.validate()
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    return spec


def resolve_motor_spec(name_or_path: str) -> MotorSpec:
    if name_or_path in BUILTIN_SPECS:
        return BUILTIN_SPECS[name_or_path]
    path = Path(name_or_path)
    if not path.is_file():
        known = ", ".join(sorted(BUILTIN_SPECS))
        raise ConfigError(f"{name_or_path!r} is neither a built-in motor ({known}) nor a spec file")
    return load_motor_spec(path.read_text(), str(path))


def apply_overrides(config: SimConfig, overrides: Mapping[str, object]) -> SimConfig:
    """Return ``config`` with overrides applied; values may be text or already parsed."""
    unknown = sorted(set(overrides) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")

    plant_changes: dict[str, object] = {}
    top_changes: dict[str, object] = {}
    motor_changes: dict[str, dict[str, float]] = {m: {} for m in MOTOR_KEYS}
    for key, raw in overrides.items():
        kind = "float" if "." in key else value_kind(key)
        if kind == "motor":
            plant_changes[key] = fit_motor(resolve_motor_spec(str(raw)))
            continue
        try:
            value = parse_number(raw, kind) if isinstance(raw, str) else raw
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}") from exc
        if "." in key:
            motor, param = key.split(".", 1)
            motor_changes[motor][param] = value
        elif key in ("n_debounce", "t_open_max", "dt"):
            top_changes[key] = value
        else:
            plant_changes[key] = value

    try:
        for motor, changes in motor_changes.items():
            if changes:
                base = plant_changes.get(motor, getattr(config.plant, motor))
                plant_changes[motor] = dataclasses.replace(base, **changes)
        plant = dataclasses.replace(config.plant, **plant_changes)
        return dataclasses.replace(config, plant=plant, **top_changes)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path, base: SimConfig | None = None) -> SimConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return apply_overrides(base or SimConfig(), parse_key_values(text, str(path)))
