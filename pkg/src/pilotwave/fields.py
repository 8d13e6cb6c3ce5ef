"""Closed-form intensity, quantum potential and guidance velocity fields.

Each packet is written as ``R_i exp(i S_i / hbar)`` with a real Gaussian
envelope ``R_i`` and a real phase ``S_i``. Every field below is assembled from
those two functions and their exact x/z derivatives; nothing is differentiated
numerically.

The phases are handled as dimensionless angles. The ``ky * y`` plane wave and
the ``(omega_x + omega_z) t`` term are common to both packets, so they are left
out of the interference phase ``phi = (S_1 - S_2)/hbar``. At y = 0.195 m the
y plane wave alone is ~2e11 rad, and adding it before taking the cosine would
throw away five digits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import Scenario, Side
from .oracle import DegenerateNodeError

__all__ = [
    "NODE_RELATIVE_THRESHOLD",
    "FieldSample",
    "node_threshold",
    "node_mask",
    "envelope_and_phase",
    "intensity",
    "intensity_gradient",
    "quantum_potential",
    "phase_gradient",
    "velocity",
    "guidance_xz",
    "flux_divergence",
    "field_sample",
]

# Points with R^2 below this fraction of the central-axis intensity count as nodes.
NODE_RELATIVE_THRESHOLD = 1e-12


class _Packet(NamedTuple):
    r: np.ndarray        # envelope R_i
    phase: np.ndarray    # S_i/hbar without the shared ky*y - (wx+wz)t part
    dlog_x: np.ndarray   # d ln R_i / dx
    dlog_z: np.ndarray
    d2log: np.ndarray    # d2 ln R_i / dx2 (same for z); scalar for scalar t
    dphase_x: np.ndarray
    dphase_z: np.ndarray
    d2phase: np.ndarray


def _packet(scenario: Scenario, side: Side, x, z, t) -> _Packet:
    p = scenario.packet(side)
    s = side.sign
    alpha = scenario.alpha
    w2 = p.dx0 * p.dx0
    at = alpha * t
    spread = w2 + at * at / w2
    chirp = w2 * w2 + at * at
    beta = np.sqrt(4 * np.pi ** 2 / chirp)
    theta = 0.5 * np.arctan(-at / w2)
    curv = at / chirp                    # d2 phase / dx2

    xi = x + s * (p.x0 - alpha * p.kx * t)
    zeta = z + s * (p.z0 - alpha * p.kz * t)
    rho2 = xi * xi + zeta * zeta
    r = (beta * p.amp) * np.exp(rho2 * (-0.5 / spread))
    # s kx (x + s x0) = s kx x + kx x0 since s^2 = 1
    phase = (rho2 * (0.5 * curv) + (s * p.kx) * x + (s * p.kz) * z
             + (p.kx * p.x0 + p.kz * p.z0 + 2 * theta + p.chi))
    inv = -1.0 / spread
    return _Packet(
        r=r,
        phase=phase,
        dlog_x=xi * inv,
        dlog_z=zeta * inv,
        d2log=inv,
        dphase_x=curv * xi + s * p.kx,
        dphase_z=curv * zeta + s * p.kz,
        d2phase=curv,
    )


def _pair(scenario, x, z, t):
    if np.ndim(t) == 0:
        # scalar time: per-packet constants stay scalars
        t = float(t)
        x, z = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(z, dtype=float))
    else:
        x, z, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, z, t)))
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    a = _packet(scenario, Side.NEGATIVE, x, z, t)
    b = _packet(scenario, Side.POSITIVE, x, z, t)
    phi = a.phase - b.phase
    return a, b, np.cos(phi), np.sin(phi)


def _intensity(a, b, c):
    return a.r * a.r + b.r * b.r + 2 * a.r * b.r * c


def _axis_terms(a, b, c, s, axis):
    """Intensity, its first/second derivative, current and current derivative along one axis."""
    a1, a2 = getattr(a, "dlog_" + axis), getattr(b, "dlog_" + axis)
    h1, h2 = a.d2log, b.d2log
    g1, g2 = getattr(a, "dphase_" + axis), getattr(b, "dphase_" + axis)
    k1, k2 = a.d2phase, b.d2phase
    r1s, r2s, r12 = a.r * a.r, b.r * b.r, a.r * b.r
    dphi = g1 - g2
    sa = a1 + a2

    d1 = 2 * a1 * r1s + 2 * a2 * r2s + 2 * r12 * (sa * c - dphi * s)
    d2 = ((2 * h1 + 4 * a1 * a1) * r1s + (2 * h2 + 4 * a2 * a2) * r2s
          + 2 * r12 * ((sa * sa + h1 + h2 - dphi * dphi) * c - (2 * sa * dphi + (k1 - k2)) * s))
    cross = (g1 + g2) * c + (a1 - a2) * s
    current = r1s * g1 + r2s * g2 + r12 * cross
    dcurrent = (2 * a1 * r1s * g1 + r1s * k1 + 2 * a2 * r2s * g2 + r2s * k2
                + r12 * sa * cross
                + r12 * ((k1 + k2) * c - (g1 + g2) * dphi * s + (h1 - h2) * s + (a1 - a2) * dphi * c))
    return d1, d2, current, dcurrent


def _current(a, b, c, s, axis):
    """Probability current along one axis, in units of hbar/m."""
    a1, a2 = getattr(a, "dlog_" + axis), getattr(b, "dlog_" + axis)
    g1, g2 = getattr(a, "dphase_" + axis), getattr(b, "dphase_" + axis)
    return (a.r * a.r * g1 + b.r * b.r * g2
            + a.r * b.r * ((g1 + g2) * c + (a1 - a2) * s))


def node_threshold(scenario: Scenario, t):
    """Intensity below which a point is treated as a node at time ``t``."""
    if np.ndim(t) == 0:
        return NODE_RELATIVE_THRESHOLD * _axis_intensity(scenario, float(t))
    a, b, c, _ = _pair(scenario, 0.0, 0.0, t)
    return NODE_RELATIVE_THRESHOLD * _intensity(a, b, c)


def _axis_intensity(scenario, t):
    # scalar R^2(0, 0, t) without the array machinery of _pair
    if t < 0:
        raise ValueError("t must be nonnegative")
    a = _packet(scenario, Side.NEGATIVE, 0.0, 0.0, t)
    b = _packet(scenario, Side.POSITIVE, 0.0, 0.0, t)
    return float(a.r * a.r + b.r * b.r + 2 * a.r * b.r * math.cos(a.phase - b.phase))


def node_mask(scenario: Scenario, x, z, t) -> np.ndarray:
    """True where the intensity is too small for 1/R^2 to be trusted."""
    a, b, c, _ = _pair(scenario, x, z, t)
    return ~(_intensity(a, b, c) >= node_threshold(scenario, t))


def _masked(values, bad, on_node):
    if not np.any(bad):
        return values
    if on_node == "raise":
        raise DegenerateNodeError(f"{int(np.count_nonzero(bad))} point(s) inside the node mask")
    out = []
    for v in values:
        v = np.array(v, dtype=float)
        v[bad] = np.nan
        out.append(v)
    return tuple(out)


def envelope_and_phase(scenario: Scenario, x, y, z, t):
    """Return ``(r1, r2, s1, s2)``; phases in J s, wrapped to (-pi hbar, pi hbar]."""
    a, b, _, _ = _pair(scenario, x, z, t)
    hbar = scenario.constants.hbar
    common = scenario.packet_neg.ky * np.asarray(y, dtype=float) - (
        scenario.alpha * (scenario.packet_neg.kx ** 2 + scenario.packet_neg.kz ** 2) / 2
    ) * np.asarray(t, dtype=float)

    def wrap(angle):
        return -np.angle(np.exp(-1j * angle))

    return a.r, b.r, hbar * wrap(a.phase + common), hbar * wrap(b.phase + common)


def intensity(scenario: Scenario, x, y, z, t) -> np.ndarray:
    """R^2 = R1^2 + R2^2 + 2 R1 R2 cos(phi). Independent of ``y``."""
    a, b, c, _ = _pair(scenario, x, z, t)
    return _intensity(a, b, c)


def intensity_gradient(scenario: Scenario, x, y, z, t):
    """Analytic ``(dR^2/dx, dR^2/dz)``."""
    a, b, c, s = _pair(scenario, x, z, t)
    return _axis_terms(a, b, c, s, "x")[0], _axis_terms(a, b, c, s, "z")[0]


def quantum_potential(scenario: Scenario, x, y, z, t, on_node="raise"):
    """Return ``(qx, qz, q)`` in joules; the y part vanishes identically.

    Per axis, ``Q_u = hbar^2/(8m) (d_u R^2 / R^2)^2 - hbar^2/(4m) d_uu R^2 / R^2``.
    ``on_node`` is ``"raise"`` or ``"nan"`` (masked points become NaN).
    """
    a, b, c, s = _pair(scenario, x, z, t)
    inten = _intensity(a, b, c)
    hbar, m = scenario.constants.hbar, scenario.constants.m
    bad = ~(inten >= node_threshold(scenario, np.asarray(t, dtype=float)))
    out = []
    with np.errstate(invalid="ignore", divide="ignore"):
        for axis in ("x", "z"):
            d1, d2, _, _ = _axis_terms(a, b, c, s, axis)
            g = d1 / inten
            out.append(hbar ** 2 / (8 * m) * g * g - hbar ** 2 / (4 * m) * (d2 / inten))
    qx, qz = out
    return _masked((qx, qz, qx + qz), bad, on_node)


def _current_ratio(scenario, x, z, t, on_node):
    a, b, c, s = _pair(scenario, x, z, t)
    inten = _intensity(a, b, c)
    bad = ~(inten >= node_threshold(scenario, np.asarray(t, dtype=float)))
    with np.errstate(invalid="ignore", divide="ignore"):
        jx = _current(a, b, c, s, "x") / inten
        jz = _current(a, b, c, s, "z") / inten
    return _masked((jx, jz), bad, on_node)


def phase_gradient(scenario: Scenario, x, y, z, t, on_node="raise") -> np.ndarray:
    """Momentum field grad S (kg m/s), shape ``(3, *broadcast_shape)``."""
    jx, jz = _current_ratio(scenario, x, z, t, on_node)
    hbar = scenario.constants.hbar
    py = np.full_like(jx, hbar * scenario.packet_neg.ky)
    return np.stack([hbar * jx, py, hbar * jz])


def velocity(scenario: Scenario, x, y, z, t, on_node="raise") -> np.ndarray:
    """Guidance velocity grad S / m (m/s), shape ``(3, *broadcast_shape)``."""
    jx, jz = _current_ratio(scenario, x, z, t, on_node)
    alpha = scenario.alpha
    return np.stack([alpha * jx, np.full_like(jx, scenario.vy), alpha * jz])


def guidance_xz(scenario: Scenario, x, z, t):
    """Transverse guidance velocity in one pass: ``(vx, vz, inside_mask)``.

    Never raises; velocities inside the node mask are NaN.
    """
    a, b, c, s = _pair(scenario, x, z, t)
    inten = _intensity(a, b, c)
    bad = ~(inten >= node_threshold(scenario, t))
    alpha = scenario.alpha
    with np.errstate(invalid="ignore", divide="ignore"):
        vx = alpha * (_current(a, b, c, s, "x") / inten)
        vz = alpha * (_current(a, b, c, s, "z") / inten)
    vx = np.where(bad, np.nan, vx)
    vz = np.where(bad, np.nan, vz)
    return vx, vz, bad


def flux_divergence(scenario: Scenario, x, y, z, t) -> np.ndarray:
    """div(R^2 grad S / m) from analytic derivatives of the probability current."""
    a, b, c, s = _pair(scenario, x, z, t)
    dx = _axis_terms(a, b, c, s, "x")[3]
    dz = _axis_terms(a, b, c, s, "z")[3]
    return scenario.alpha * (dx + dz)


@dataclass(frozen=True)
class FieldSample:
    """All closed-form field values at a set of points.

    ``s12`` is the dimensionless interference phase (S1 - S2)/hbar. ``qx``,
    ``qz``, ``q`` and ``grad_s`` are NaN inside the node mask.
    """

    r1: np.ndarray
    r2: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    s12: np.ndarray
    intensity: np.ndarray
    qx: np.ndarray
    qz: np.ndarray
    q: np.ndarray
    grad_s: np.ndarray


def field_sample(scenario: Scenario, x, y, z, t) -> FieldSample:
    a, b, _, _ = _pair(scenario, x, z, t)
    r1, r2, s1, s2 = envelope_and_phase(scenario, x, y, z, t)
    qx, qz, q = quantum_potential(scenario, x, y, z, t, on_node="nan")
    return FieldSample(
        r1=r1, r2=r2, s1=s1, s2=s2, s12=a.phase - b.phase,
        intensity=intensity(scenario, x, y, z, t),
        qx=qx, qz=qz, q=q,
        grad_s=phase_gradient(scenario, x, y, z, t, on_node="nan"),
    )
