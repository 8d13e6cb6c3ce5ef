"""Initial conditions for trajectory ensembles and scalar observables.

Covers square lattices inside each pinhole, Born-rule rejection sampling of
the t = 0 density, central-fringe visibility, the L1 distance between an
ensemble histogram and the intensity, and the continuity-equation residual.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import fields
from .model import Scenario, Side, packet_state_at

__all__ = [
    "Provenance",
    "InitialSet",
    "FringeProfile",
    "NoFringeError",
    "SamplerStallError",
    "square_grid_initials",
    "born_sample_initials",
    "fringe_profile",
    "central_fringe_visibility",
    "bin_probabilities",
    "endpoint_density_distance",
    "continuity_residual",
    "first_valley_depths",
    "overlap_peak_position",
]

BORN_DOMAIN = 1e-6          # half-width of the sampling square, m
PRESCAN_POINTS = 201
MAJORANT_FACTOR = 1.05
MIN_ACCEPTANCE = 1e-4

SCAN_HALF_WIDTH = 2e-6
SCAN_POINTS = 2001

HIST_BINS = 40
HIST_HALF_WIDTH = 3.5e-6


class NoFringeError(ValueError):
    """The profile has no interior minimum on one side of its maximum."""


class SamplerStallError(RuntimeError):
    """Rejection sampling acceptance rate fell below the floor."""


class Provenance(enum.Enum):
    SQUARE_GRID = "square_grid"
    BORN_SAMPLED = "born_sampled"


@dataclass(frozen=True)
class InitialSet:
    points: np.ndarray                 # (N, 2) array of (x, z), m
    provenance: Provenance
    seed: Optional[int] = None
    domain: tuple = field(default=None)

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class FringeProfile:
    axis_positions: np.ndarray
    values: np.ndarray
    t: float

    def __post_init__(self):
        x = np.asarray(self.axis_positions)
        if x.ndim != 1 or len(x) != len(self.values):
            raise ValueError("positions and values must be 1-D arrays of equal length")
        steps = np.diff(x)
        if len(x) > 1 and (np.any(steps <= 0) or np.ptp(steps) > 1e-6 * steps.mean()):
            raise ValueError("positions must be strictly increasing and uniformly spaced")


def square_grid_initials(scenario: Scenario, n: int) -> InitialSet:
    """Two ``n x n`` lattices, one per pinhole, each spanning the packet width.

    The lattice for a pinhole covers ``center +- dx0/2`` in x and z, where
    ``dx0`` is that packet's own initial width. ``n = 1`` gives the centres.
    The ``-x0`` lattice comes first; within a lattice x varies fastest.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    blocks = []
    for side in (Side.NEGATIVE, Side.POSITIVE):
        p = scenario.packet(side)
        if n == 1:
            ux = np.array([p.center_x])
            uz = np.array([p.center_z])
        else:
            ux = np.linspace(p.center_x - p.dx0 / 2, p.center_x + p.dx0 / 2, n)
            uz = np.linspace(p.center_z - p.dx0 / 2, p.center_z + p.dx0 / 2, n)
        gz, gx = np.meshgrid(uz, ux, indexing="ij")
        blocks.append(np.column_stack([gx.ravel(), gz.ravel()]))
    return InitialSet(np.vstack(blocks), Provenance.SQUARE_GRID)


def born_sample_initials(scenario: Scenario, count: int, seed: int,
                         half_width: float = BORN_DOMAIN, t: float = 0.0,
                         batch: int = 200_000) -> InitialSet:
    """Rejection-sample ``count`` positions from the intensity at time ``t``.

    Proposals are uniform on the square ``[-half_width, half_width]^2``; the
    majorant is 1.05 times the largest intensity found on a 201 x 201 prescan
    of the square (packet centres included).
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    g = np.linspace(-half_width, half_width, PRESCAN_POINTS)
    gx, gz = np.meshgrid(g, g)
    centers = [scenario.packet(s).center_x for s in Side]
    peak = max(np.max(fields.intensity(scenario, gx, 0.0, gz, t)),
               np.max(fields.intensity(scenario, np.array(centers), 0.0, 0.0, t)))
    majorant = MAJORANT_FACTOR * peak

    rng = np.random.default_rng(seed)
    accepted = []
    n_acc = n_prop = 0
    while n_acc < count:
        xy = rng.uniform(-half_width, half_width, size=(batch, 2))
        u = rng.uniform(0.0, majorant, size=batch)
        keep = u < fields.intensity(scenario, xy[:, 0], 0.0, xy[:, 1], t)
        accepted.append(xy[keep])
        n_acc += int(keep.sum())
        n_prop += batch
        if n_acc / n_prop < MIN_ACCEPTANCE:
            raise SamplerStallError(
                f"acceptance rate {n_acc / n_prop:.2e} below {MIN_ACCEPTANCE:g}; "
                "check the sampling domain"
            )
    points = np.vstack(accepted)[:count]
    return InitialSet(points, Provenance.BORN_SAMPLED, seed=seed,
                      domain=(-half_width, half_width))


def fringe_profile(scenario: Scenario, t: float, z: float = 0.0,
                   half_width: float = SCAN_HALF_WIDTH, n: int = SCAN_POINTS) -> FringeProfile:
    """Intensity along the line ``z = const`` for ``x`` in ``[-half_width, half_width]``."""
    x = np.linspace(-half_width, half_width, n)
    return FringeProfile(x, fields.intensity(scenario, x, 0.0, z, t), t)


def _adjacent_minima(values):
    i = int(np.argmax(values))
    left = i
    while left > 0 and values[left - 1] < values[left]:
        left -= 1
    right = i
    while right < len(values) - 1 and values[right + 1] < values[right]:
        right += 1
    if left == 0 or right == len(values) - 1:
        raise NoFringeError("no interior minimum on both sides of the central maximum")
    return left, i, right


def central_fringe_visibility(profile: FringeProfile) -> float:
    """(I_max - I_min) / (I_max + I_min) around the profile's global maximum.

    ``I_min`` is the larger of the two minima flanking the maximum.
    """
    v = np.asarray(profile.values, dtype=float)
    left, i, right = _adjacent_minima(v)
    i_max = v[i]
    i_min = max(v[left], v[right])
    return float((i_max - i_min) / (i_max + i_min))


def bin_probabilities(scenario: Scenario, t: float, bins: int = HIST_BINS,
                      half_width: float = HIST_HALF_WIDTH, sub: int = 8) -> np.ndarray:
    """Intensity mass of each cell of a ``bins x bins`` grid, normalised to sum 1.

    Each cell is integrated with a ``sub x sub`` midpoint rule. Index order is
    ``[ix, iz]``, matching ``numpy.histogram2d(x, z)``.
    """
    edges = np.linspace(-half_width, half_width, bins + 1)
    w = edges[1] - edges[0]
    offs = (np.arange(sub) + 0.5) / sub * w
    pts = (edges[:-1, None] + offs[None, :]).ravel()
    gx, gz = np.meshgrid(pts, pts, indexing="ij")
    dens = fields.intensity(scenario, gx, 0.0, gz, t)
    mass = dens.reshape(bins, sub, bins, sub).sum(axis=(1, 3))
    return mass / mass.sum()


def endpoint_density_distance(trajectories, scenario: Scenario, t: float,
                              bins: int = HIST_BINS, half_width: float = HIST_HALF_WIDTH) -> float:
    """L1 distance between the ensemble's (x, z) histogram and the intensity at ``t``.

    ``trajectories`` is a list of :class:`~pilotwave.integrator.Trajectory`
    (their final samples are used) or an ``(N, 2)`` array of positions. Both
    distributions are normalised over the histogram window, so the result lies
    in [0, 2].
    """
    if isinstance(trajectories, np.ndarray):
        pts = trajectories.reshape(-1, 2)
    else:
        pts = np.array([(tr.x[-1], tr.z[-1]) for tr in trajectories])
    edges = np.linspace(-half_width, half_width, bins + 1)
    hist, _, _ = np.histogram2d(pts[:, 0], pts[:, 1], bins=[edges, edges])
    total = hist.sum()
    if total == 0:
        return 2.0
    return float(np.abs(hist / total - bin_probabilities(scenario, t, bins, half_width)).sum())


def continuity_residual(scenario: Scenario, x, y, z, t, dt_probe: float = 1e-13):
    """Normalised residual of d(R^2)/dt + div(R^2 grad S / m).

    The time derivative is the five-point centred difference with step
    ``dt_probe`` (the three-point one leaves truncation errors of ~1e-2 in
    the fast-moving tails of a narrow packet); the divergence is analytic. The residual is divided by the larger of the two
    terms; where both are below 1e-12 of the time-``t`` rate scale
    ``peak(t) * alpha / Delta_min(t)^2`` it is reported as 0, with
    ``peak(t) = sum_i (beta_i amp_i)^2`` the packets' combined peak intensity.
    """
    if np.any(np.asarray(t) - 2 * dt_probe < 0):
        raise ValueError("t - 2*dt_probe must be nonnegative")
    if np.any(fields.node_mask(scenario, x, z, t)):
        raise fields.DegenerateNodeError("continuity residual requested inside the node mask")
    def at(k):
        return fields.intensity(scenario, x, y, z, t + k * dt_probe)

    dt_term = (-at(2) + 8 * at(1) - 8 * at(-1) + at(-2)) / (12 * dt_probe)
    div_term = fields.flux_divergence(scenario, x, y, z, t)
    alpha = scenario.alpha
    states = [packet_state_at(scenario, side, float(np.max(t))) for side in Side]
    peak = sum((st.beta * scenario.packet(st_side).amp) ** 2
               for st, st_side in zip(states, Side))
    rate = peak * alpha / min(st.dx_t_sq for st in states)
    big = np.maximum(np.abs(dt_term), np.abs(div_term))
    vacuous = big < 1e-12 * rate
    with np.errstate(invalid="ignore", divide="ignore"):
        res = np.abs(dt_term + div_term) / np.maximum(big, 1e-300)
    return np.where(vacuous, 0.0, res)


def first_valley_depths(scenario: Scenario, t: float, z: float = 0.0,
                        half_width: float = SCAN_HALF_WIDTH, n: int = SCAN_POINTS):
    """Deepest quantum potential either side of the central bright fringe.

    Along the scan line, the left valley is the minimum of Q between the
    nearest intensity maximum left of the central one and the central one;
    likewise on the right. Returns ``(q_left, q_right)`` in joules.
    """
    prof = fringe_profile(scenario, t, z, half_width, n)
    v = prof.values
    left, i, right = _adjacent_minima(v)
    lo = left
    while lo > 0 and v[lo - 1] > v[lo]:
        lo -= 1
    hi = right
    while hi < len(v) - 1 and v[hi + 1] > v[hi]:
        hi += 1
    q = fields.quantum_potential(scenario, prof.axis_positions, 0.0, z, t, on_node="nan")[2]
    return float(np.nanmin(q[lo:i + 1])), float(np.nanmin(q[i:hi + 1]))


def overlap_peak_position(scenario: Scenario, t: float, z: float = 0.0,
                          half_width: float = 3.5e-6, n: int = 7001) -> float:
    """x where the interference envelope ``2 R1 R2`` peaks along ``z = const``."""
    x = np.linspace(-half_width, half_width, n)
    r1, r2, _, _ = fields.envelope_and_phase(scenario, x, 0.0, z, t)
    return float(x[np.argmax(r1 * r2)])
