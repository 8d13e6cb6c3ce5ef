"""Plot-ready CSV export of field grids and trajectories.

Numbers are written with 17 significant digits so that every double reads
back exactly, and output bytes depend only on the inputs.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import fields
from .config import GridSpec
from .model import Scenario

__all__ = ["FieldExport", "export_field_grid", "export_trajectories", "export_profile"]

FIELD_HEADER = "x,z,value"
TRAJECTORY_HEADER = "traj_id,t,x,y,z,vx,vy,vz,status"


def _num(v) -> str:
    return "" if np.isnan(v) else format(float(v), ".17g")


@dataclass(frozen=True)
class FieldExport:
    files: tuple
    frames: tuple
    masked_points: int


def export_field_grid(scenario: Scenario, grid: GridSpec, which: str, out) -> FieldExport:
    """Write one CSV per frame into directory ``out``.

    Rows run over x fastest, then z (z-outer). Quantum-potential cells inside
    the node mask have an empty value field; their total count is returned.
    Files are named ``{which}_{index:02d}.csv``; ``{which}_frames.csv`` lists
    frame index, time, file name and masked-cell count.
    """
    if which not in ("intensity", "qpotential"):
        raise ValueError(f"unknown field {which!r}")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    xs, zs = grid.axes()
    X, Z = np.meshgrid(xs, zs)              # shape (nz, nx): z outer
    frames = grid.frame_times(which)
    files, masked_total, index = [], 0, []
    for i, t in enumerate(frames):
        if which == "intensity":
            values = fields.intensity(scenario, X, 0.0, Z, t)
        else:
            values = fields.quantum_potential(scenario, X, 0.0, Z, t, on_node="nan")[2]
        masked = int(np.count_nonzero(np.isnan(values)))
        masked_total += masked
        path = out / f"{which}_{i:02d}.csv"
        rows = [FIELD_HEADER]
        rows += [f"{_num(x)},{_num(z)},{_num(v)}"
                 for x, z, v in zip(X.ravel(), Z.ravel(), values.ravel())]
        path.write_text("\n".join(rows) + "\n", encoding="utf-8")
        files.append(path)
        index.append(f"{i},{_num(t)},{path.name},{masked}")
    (out / f"{which}_frames.csv").write_text(
        "frame,t,file,masked\n" + "\n".join(index) + "\n", encoding="utf-8")
    return FieldExport(tuple(files), tuple(frames), masked_total)


def export_trajectories(trajectories, out) -> Path:
    """Write all trajectories to one CSV file (``out`` is the file path).

    One row per recorded sample, trajectory blocks in input order, numbered
    from 0.
    """
    trajectories = list(trajectories)
    if not trajectories:
        raise ValueError("nothing to export: the ensemble is empty")
    out = Path(out)
    if out.parent and not out.parent.exists():
        os.makedirs(out.parent, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(TRAJECTORY_HEADER + "\n")
        for tid, tr in enumerate(trajectories):
            status = tr.status.value
            for row in zip(tr.t, tr.x, tr.y, tr.z, tr.vx, tr.vy, tr.vz):
                fh.write(f"{tid}," + ",".join(_num(v) for v in row) + f",{status}\n")
    return out


def export_profile(profile, out) -> Path:
    """Write a fringe profile as ``x,value`` rows."""
    out = Path(out)
    rows = ["x,value"] + [f"{_num(x)},{_num(v)}" for x, v in zip(profile.axis_positions, profile.values)]
    out.write_text("\n".join(rows) + "\n", encoding="utf-8")
    return out
