"""INI-style run configuration: parsing, validation and serialisation.

A document has the sections ``[run]``, ``[constants]``, ``[packet.neg]``,
``[packet.pos]`` and ``[grid]``; keys that appear before the first section
header belong to ``[run]``. Every omitted key takes its preset or default
value. Unknown sections and keys are errors, reported with their line number.

Example::

    scenario = ewea

    [packet.pos]
    dx0 = 1.4e-7

    [grid]
    nx = 201
    frames = 0, 7.5e-10, 1.5e-9
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .integrator import DEFAULT_DT, DEFAULT_STRIDE
from .model import Scenario, ScenarioKind, make_scenario

__all__ = [
    "ConfigError",
    "GridSpec",
    "RunOptions",
    "RunConfig",
    "INTENSITY_FRAMES",
    "QPOTENTIAL_FRAMES",
    "default_frames",
    "parse_config",
    "load_config",
    "serialize_config",
]

INTENSITY_FRAMES = tuple(np.linspace(0.0, 1.5e-9, 6))
QPOTENTIAL_FRAMES = tuple(np.linspace(0.0, 2.6923e-9, 6))


class ConfigError(ValueError):
    """Malformed configuration document."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def default_frames(which="intensity"):
    """Six uniform frames; the quantum potential runs to a later end time."""
    if which == "intensity":
        return INTENSITY_FRAMES
    if which == "qpotential":
        return QPOTENTIAL_FRAMES
    raise ValueError(f"unknown field {which!r}; expected 'intensity' or 'qpotential'")


@dataclass(frozen=True)
class GridSpec:
    """Rectangular (x, z) grid and the frame times to export.

    ``frames = None`` means the default set for the exported field.
    """

    x_min: float = -3.5e-6
    x_max: float = 3.5e-6
    z_min: float = -3.5e-6
    z_max: float = 3.5e-6
    nx: int = 101
    nz: int = 101
    frames: Optional[tuple] = None

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.z_min < self.z_max):
            raise ValueError("grid bounds must satisfy x_min < x_max and z_min < z_max")
        if int(self.nx) != self.nx or int(self.nz) != self.nz or self.nx < 2 or self.nz < 2:
            raise ValueError("nx and nz must be integers >= 2")
        if self.frames is not None:
            f = np.asarray(self.frames, dtype=float)
            if f.ndim != 1 or len(f) == 0:
                raise ValueError("frames must be a nonempty list of times")
            if np.any(f < 0) or np.any(np.diff(f) <= 0):
                raise ValueError("frames must be nonnegative and strictly increasing")
            object.__setattr__(self, "frames", tuple(float(v) for v in f))

    def axes(self):
        return (np.linspace(self.x_min, self.x_max, self.nx),
                np.linspace(self.z_min, self.z_max, self.nz))

    def frame_times(self, which="intensity"):
        return self.frames if self.frames is not None else default_frames(which)


@dataclass(frozen=True)
class RunOptions:
    """Trajectory run settings.

    ``born`` (count) selects Born-rule sampling, otherwise a ``grid_init`` x
    ``grid_init`` lattice per pinhole is used.
    """

    t_final: float = 1.5e-9
    dt: float = DEFAULT_DT
    stride: int = DEFAULT_STRIDE
    grid_init: int = 3
    born: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if not self.t_final > 0 or not self.dt > 0:
            raise ValueError("t_final and dt must be positive")
        if self.stride < 1 or self.grid_init < 1:
            raise ValueError("stride and grid_init must be >= 1")
        if self.born is not None and self.born < 1:
            raise ValueError("born must be a positive count")


@dataclass(frozen=True)
class RunConfig:
    scenario: Scenario
    grid: GridSpec
    options: RunOptions


# section -> key -> (scenario override name or None, converter)
_SCENARIO_KEYS = {
    "constants": {k: k for k in ("hbar", "m", "x0", "z0", "kx", "ky", "kz")},
    "packet.neg": {"dx0": "dx0_neg", "amp": "amp_neg"},
    "packet.pos": {"dx0": "dx0_pos", "amp": "amp_pos", "chi": "chi"},
}
_GRID_KEYS = {"x_min": float, "x_max": float, "z_min": float, "z_max": float,
              "nx": int, "nz": int, "frames": "frames"}
_RUN_KEYS = {"scenario": str, "t_final": float, "dt": float, "stride": int,
             "grid_init": int, "born": int, "seed": int}
_SECTIONS = ("run", *_SCENARIO_KEYS, "grid")


def _convert(conv, raw, key, line):
    try:
        if conv == "frames":
            return tuple(float(v) for v in raw.split(",") if v.strip())
        if conv is int:
            as_float = float(raw)
            if as_float != int(as_float):
                raise ValueError
            return int(as_float)
        return conv(raw)
    except ValueError:
        raise ConfigError(f"invalid value {raw!r} for {key!r}", line) from None


def parse_config(text: str, scenario: Optional[str] = None) -> RunConfig:
    """Parse a configuration document.

    Parameters
    ----------
    text : str
        The document.
    scenario : str, optional
        Preset to use when the document has no ``scenario`` key.

    Returns
    -------
    RunConfig

    Raises
    ------
    ConfigError
        Syntax errors, unknown sections or keys, duplicate keys, bad values.
    ScenarioError
        Physically invalid parameters (from :func:`make_scenario`).
    """
    section = "run"
    seen = set()
    overrides, grid, run = {}, {}, {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {raw_line.strip()!r}", lineno)
            section = line[1:-1].strip().lower()
            if section not in _SECTIONS:
                raise ConfigError(f"unknown section [{section}]", lineno)
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw_line.strip()!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower()
        if (section, key) in seen:
            raise ConfigError(f"duplicate key {key!r} in [{section}]", lineno)
        seen.add((section, key))
        if section in _SCENARIO_KEYS:
            if key not in _SCENARIO_KEYS[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]", lineno)
            overrides[_SCENARIO_KEYS[section][key]] = _convert(float, value, key, lineno)
        elif section == "grid":
            if key not in _GRID_KEYS:
                raise ConfigError(f"unknown key {key!r} in [grid]", lineno)
            grid[key] = _convert(_GRID_KEYS[key], value, key, lineno)
        else:
            if key not in _RUN_KEYS:
                raise ConfigError(f"unknown key {key!r} in [run]", lineno)
            run[key] = _convert(_RUN_KEYS[key], value, key, lineno)

    kind = run.pop("scenario", scenario or "ewea").lower()
    try:
        ScenarioKind(kind)
    except ValueError:
        raise ConfigError(f"unknown scenario {kind!r}") from None
    try:
        gridspec = GridSpec(**grid)
        options = RunOptions(**run)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(make_scenario(kind, overrides), gridspec, options)


def load_config(path, scenario=None) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), scenario)


def serialize_config(scenario: Scenario, grid: Optional[GridSpec] = None,
                     options: Optional[RunOptions] = None) -> str:
    """Write every parameter explicitly; ``parse_config`` reads it back bit-exactly."""
    grid = grid or GridSpec()
    options = options or RunOptions()
    c, neg, pos = scenario.constants, scenario.packet_neg, scenario.packet_pos
    lines = ["[run]", f"scenario = {scenario.kind.value}"]
    for k in ("t_final", "dt", "stride", "grid_init", "seed"):
        lines.append(f"{k} = {getattr(options, k)!r}")
    if options.born is not None:
        lines.append(f"born = {options.born!r}")
    lines += ["", "[constants]", f"hbar = {c.hbar!r}", f"m = {c.m!r}"]
    lines += [f"{k} = {getattr(neg, k)!r}" for k in ("x0", "z0", "kx", "ky", "kz")]
    lines += ["", "[packet.neg]", f"dx0 = {neg.dx0!r}", f"amp = {neg.amp!r}"]
    lines += ["", "[packet.pos]", f"dx0 = {pos.dx0!r}", f"amp = {pos.amp!r}", f"chi = {pos.chi!r}"]
    lines += ["", "[grid]"]
    lines += [f"{k} = {getattr(grid, k)!r}" for k in ("x_min", "x_max", "z_min", "z_max", "nx", "nz")]
    if grid.frames is not None:
        lines.append("frames = " + ", ".join(repr(f) for f in grid.frames))
    return "\n".join(lines) + "\n"


def with_frames(grid: GridSpec, frames) -> GridSpec:
    return replace(grid, frames=None if frames is None else tuple(frames))
