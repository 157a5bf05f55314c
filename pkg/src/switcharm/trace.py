"""Per-tick simulation record and its CSV rendering."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple

from .controller import ElbowCmd, ElbowState, GripCmd, GripState, SwitchFrame

INPUT_NAMES = SwitchFrame._fields


class TraceSample(NamedTuple):
    time: float
    raw: SwitchFrame
    stable: SwitchFrame
    elbow_fsm: ElbowState
    grip_fsm: GripState
    elbow_cmd: ElbowCmd
    grip_cmd_out: GripCmd
    theta: float
    omega: float
    aperture: float
    grip_current: float
    adc_code: int
    comparator: bool


COLUMNS: tuple[str, ...] = (
    ("time",)
    + tuple(f"raw_{n}" for n in INPUT_NAMES)
    + tuple(f"stable_{n}" for n in INPUT_NAMES)
    + TraceSample._fields[3:]
)


@dataclass
class Trace:
    dt: float
    stride: int = 1
    samples: list[TraceSample] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def tick_of(self, index: int) -> int:
        return index * self.stride


def _fmt_float(value: float) -> str:
    text = f"{value:.6f}"
    # Tiny negatives must not render as "-0.000000" in golden files.
    return "0.000000" if text == "-0.000000" else text


def _render(value: object) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, int):
        return str(value)
    return _fmt_float(value)


def sample_row(sample: TraceSample) -> list[str]:
    row = [_fmt_float(sample.time)]
    row += [_render(v) for v in sample.raw]
    row += [_render(v) for v in sample.stable]
    row += [_render(v) for v in sample[3:]]
    return row


def serialize_trace(trace: Trace | list[TraceSample]) -> str:
    """CSV text: header row, fixed 6-decimal floats, 0/1 booleans, LF endings."""
    lines = [",".join(COLUMNS)]
    lines += [",".join(sample_row(s)) for s in trace]
    return "\n".join(lines) + "\n"


def read_trace_csv(text: str) -> list[dict[str, str | float | int]]:
    """Parse serialized trace rows back into dicts (numbers converted, tokens kept)."""
    lines = text.splitlines()
    if not lines:
        return []
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        row: dict[str, str | float | int] = {}
        for name, cell in zip(header, line.split(",")):
            if cell.isdigit():
                row[name] = int(cell)
            else:
                try:
                    row[name] = float(cell)
                except ValueError:
                    row[name] = cell
        rows.append(row)
    return rows
