"""Fixed-step RK4 integration of the guidance equations.

Only x and z are integrated; the y motion is uniform, ``y(t) = y0 + alpha*ky*(t - t0)``,
and is written down in closed form. All trajectories of a batch are advanced
together as numpy arrays. Every operation is elementwise, so a trajectory's
result does not depend on which batch it travels in.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import fields
from .model import Scenario
from .oracle import DegenerateNodeError

__all__ = [
    "DEFAULT_DT",
    "DEFAULT_STRIDE",
    "Status",
    "NodeMaskedError",
    "TrajectoryState",
    "Trajectory",
    "rk4_step",
    "integrate_trajectory",
    "integrate_ensemble",
]

DEFAULT_DT = 1e-12
DEFAULT_STRIDE = 10


class Status(enum.Enum):
    COMPLETED = "completed"
    NODE_MASKED = "node_masked"


class NodeMaskedError(DegenerateNodeError):
    """An RK4 stage landed inside the node mask."""


@dataclass(frozen=True)
class TrajectoryState:
    t: float
    x: float
    y: float
    z: float
    vx: float
    vy: float
    vz: float


@dataclass(frozen=True)
class Trajectory:
    """Recorded samples of one trajectory, as parallel 1-D arrays."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    vx: np.ndarray
    vy: np.ndarray
    vz: np.ndarray
    status: Status = Status.COMPLETED

    def __len__(self):
        return len(self.t)

    @property
    def initial(self) -> TrajectoryState:
        return self[0]

    @property
    def final(self) -> TrajectoryState:
        return self[-1]

    def __getitem__(self, i) -> TrajectoryState:
        return TrajectoryState(*(float(getattr(self, k)[i]) for k in
                                 ("t", "x", "y", "z", "vx", "vy", "vz")))


def _rhs(scenario, x, z, t):
    """Guidance velocity (vx, vz) and a mask of points inside the node mask."""
    return fields.guidance_xz(scenario, x, z, t)


def _step(scenario, x, z, t, dt):
    k1x, k1z, b1 = _rhs(scenario, x, z, t)
    k2x, k2z, b2 = _rhs(scenario, x + 0.5 * dt * k1x, z + 0.5 * dt * k1z, t + 0.5 * dt)
    k3x, k3z, b3 = _rhs(scenario, x + 0.5 * dt * k2x, z + 0.5 * dt * k2z, t + 0.5 * dt)
    k4x, k4z, b4 = _rhs(scenario, x + dt * k3x, z + dt * k3z, t + dt)
    x_new = x + dt / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
    z_new = z + dt / 6 * (k1z + 2 * k2z + 2 * k3z + k4z)
    return x_new, z_new, b1 | b2 | b3 | b4


def rk4_step(scenario: Scenario, state, t: float, dt: float):
    """Advance ``state = (x, z)`` (scalars or arrays) by one classical RK4 step.

    Raises
    ------
    NodeMaskedError
        If any of the four stage evaluations falls inside the node mask.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    x, z = (np.asarray(v, dtype=float) for v in state)
    x_new, z_new, bad = _step(scenario, x, z, t, dt)
    if np.any(bad):
        raise NodeMaskedError("RK4 stage inside the node mask")
    return x_new, z_new


def _step_count(t0, t1, dt):
    if not t1 > t0:
        raise ValueError("t1 must be greater than t0")
    if not dt > 0:
        raise ValueError("dt must be positive")
    n = int(round((t1 - t0) / dt))
    if n < 1 or abs(n * dt - (t1 - t0)) > 1e-9 * (t1 - t0):
        raise ValueError(f"dt={dt!r} does not divide the interval [{t0!r}, {t1!r}]")
    return n


def integrate_ensemble(scenario: Scenario, inits, t0: float, t1: float,
                       dt: float = DEFAULT_DT, stride: int = DEFAULT_STRIDE, y0: float = 0.0):
    """Integrate many trajectories from ``inits``, a sequence of (x, z) pairs.

    ``stride`` is the number of RK4 steps between recorded samples. The
    initial and final states are always recorded. A trajectory whose RK4
    stage hits the node mask stops there, keeps the samples recorded so far
    and gets status ``NODE_MASKED``; the rest of the batch carries on.
    """
    inits = np.asarray(inits, dtype=float).reshape(-1, 2)
    n_steps = _step_count(t0, t1, dt)
    stride = int(stride)
    if stride < 1:
        raise ValueError("stride must be a positive integer")
    record = sorted(set(range(0, n_steps + 1, stride)) | {n_steps})
    n = len(inits)

    xs = np.full((len(record), n), np.nan)
    zs = np.full((len(record), n), np.nan)
    last = np.full(n, -1)               # index of the last recorded sample per trajectory
    alive = np.ones(n, dtype=bool)
    all_alive = True
    x, z = inits[:, 0].copy(), inits[:, 1].copy()

    slot = 0
    for step in range(n_steps + 1):
        if step == record[slot]:
            xs[slot, alive] = x[alive]
            zs[slot, alive] = z[alive]
            last[alive] = slot
            slot += 1
        if step == n_steps or not alive.any():
            break
        t = t0 + step * dt
        if all_alive:
            x, z, bad = _step(scenario, x, z, t, dt)
            if bad.any():
                alive[bad] = False
                all_alive = False
            continue
        idx = np.flatnonzero(alive)
        x_new, z_new, bad = _step(scenario, x[idx], z[idx], t, dt)
        x[idx], z[idx] = x_new, z_new
        alive[idx[bad]] = False

    times = t0 + np.asarray(record, dtype=float) * dt
    vy = scenario.vy
    out = []
    for j in range(n):
        k = last[j] + 1
        t = times[:k]
        v = fields.velocity(scenario, xs[:k, j], 0.0, zs[:k, j], t, on_node="nan")
        out.append(Trajectory(
            t=t, x=xs[:k, j].copy(), y=y0 + vy * (t - t0), z=zs[:k, j].copy(),
            vx=v[0], vy=v[1], vz=v[2],
            status=Status.COMPLETED if alive[j] else Status.NODE_MASKED,
        ))
    return out


def integrate_trajectory(scenario: Scenario, init, t0: float, t1: float,
                         dt: float = DEFAULT_DT, stride: int = DEFAULT_STRIDE,
                         y0: float = 0.0) -> Trajectory:
    """Integrate a single trajectory starting at ``init = (x, z)``."""
    return integrate_ensemble(scenario, [init], t0, t1, dt, stride, y0)[0]
