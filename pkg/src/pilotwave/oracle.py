"""Direct complex evaluation of the two pinhole packets and their derivatives.

This module is the reference the closed-form field module is checked against.
It never uses the modulus/phase split: every packet is evaluated as the
literal product of its complex factors, and derivatives come from the exact
log-derivative of that product, ``d psi/dx = L'(x) psi`` and
``d2 psi/dx2 = (L'' + L'^2) psi``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import PhysicalConstants, Scenario, Side

__all__ = [
    "PsiJet",
    "DegenerateNodeError",
    "eval_packet",
    "eval_superposition",
    "oracle_phase_gradient",
    "oracle_quantum_potential",
]


class DegenerateNodeError(ArithmeticError):
    """Raised when a quantity needs 1/psi at a (near) node of the wavefunction."""


@dataclass(frozen=True)
class PsiJet:
    """Wavefunction value with its first and second spatial derivatives.

    All fields are complex arrays of a common broadcast shape.
    """

    value: np.ndarray
    d_dx: np.ndarray
    d_dy: np.ndarray
    d_dz: np.ndarray
    d2_dx2: np.ndarray
    d2_dy2: np.ndarray
    d2_dz2: np.ndarray

    def __add__(self, other: "PsiJet") -> "PsiJet":
        return PsiJet(*(a + b for a, b in zip(self._fields(), other._fields())))

    def scaled(self, c) -> "PsiJet":
        return PsiJet(*(c * a for a in self._fields()))

    def _fields(self):
        return (self.value, self.d_dx, self.d_dy, self.d_dz,
                self.d2_dx2, self.d2_dy2, self.d2_dz2)

    @property
    def density(self) -> np.ndarray:
        return self.value.real ** 2 + self.value.imag ** 2


def eval_packet(scenario: Scenario, side, x, y, z, t) -> PsiJet:
    """Evaluate one pinhole packet and its analytic derivatives.

    The packet at ``-x0`` (``side="neg"``) is a Gaussian in x and z drifting
    towards +x, modulated by plane waves in x, z and y; the ``+x0`` packet is
    its mirror image carrying the extra phase ``exp(i chi)``.
    """
    side = Side(side)
    p = scenario.packet(side)
    s = side.sign
    alpha = scenario.alpha
    x, y, z, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z, t)))
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")

    w2 = p.dx0 ** 2
    at = alpha * t
    spread = w2 + at ** 2 / w2          # Gaussian width^2 at time t
    chirp = w2 ** 2 + at ** 2           # denominator of the quadratic phase
    vx, vz = alpha * p.kx, alpha * p.kz
    omega = alpha * p.kx ** 2 / 2 + alpha * p.kz ** 2 / 2

    xi = x + s * p.x0 - s * vx * t
    zeta = z + s * p.z0 - s * vz * t

    norm = np.sqrt(2 * np.pi / (w2 + 1j * at)) * np.sqrt(2 * np.pi / (w2 + 1j * at))
    value = (
        p.amp * norm
        * np.exp(-xi ** 2 / (2 * spread)) * np.exp(1j * at * xi ** 2 / (2 * chirp))
        * np.exp(-zeta ** 2 / (2 * spread)) * np.exp(1j * at * zeta ** 2 / (2 * chirp))
        * np.exp(1j * s * p.kx * (x + s * p.x0))
        * np.exp(1j * s * p.kz * (z + s * p.z0))
        * np.exp(1j * p.ky * y)
        * np.exp(-1j * omega * t)
    )
    if side is Side.POSITIVE:
        value = value * np.exp(1j * p.chi)

    dlog_x = -xi / spread + 1j * (at * xi / chirp + s * p.kx)
    dlog_z = -zeta / spread + 1j * (at * zeta / chirp + s * p.kz)
    d2log = -1 / spread + 1j * at / chirp
    return PsiJet(
        value=value,
        d_dx=dlog_x * value,
        d_dy=1j * p.ky * value,
        d_dz=dlog_z * value,
        d2_dx2=(d2log + dlog_x ** 2) * value,
        d2_dy2=-(p.ky ** 2) * value,
        d2_dz2=(d2log + dlog_z ** 2) * value,
    )


def eval_superposition(scenario: Scenario, x, y, z, t) -> PsiJet:
    """Jet of psi = psi_neg + psi_pos."""
    return eval_packet(scenario, Side.NEGATIVE, x, y, z, t) + eval_packet(
        scenario, Side.POSITIVE, x, y, z, t
    )


def _node_points(jet: PsiJet, threshold, on_node):
    dens = jet.density
    bad = ~(dens > threshold)
    if on_node == "raise" and np.any(bad):
        raise DegenerateNodeError(
            f"{int(np.count_nonzero(bad))} point(s) at or below the node threshold"
        )
    return bad


def _log_derivs(jet: PsiJet, bad):
    v = np.where(bad, np.nan, jet.value)
    with np.errstate(invalid="ignore", divide="ignore"):
        return (jet.d_dx / v, jet.d_dy / v, jet.d_dz / v,
                jet.d2_dx2 / v, jet.d2_dy2 / v, jet.d2_dz2 / v)


def oracle_phase_gradient(jet: PsiJet, hbar: float, threshold: float = 0.0,
                          on_node: str = "raise") -> np.ndarray:
    """Momentum field hbar * Im(grad psi / psi), stacked along the first axis.

    ``threshold`` is the largest inadmissible ``|psi|^2``. Points at or below
    it raise :class:`DegenerateNodeError`, or become NaN with ``on_node="nan"``.
    """
    gx, gy, gz, *_ = _log_derivs(jet, _node_points(jet, threshold, on_node))
    return hbar * np.stack([gx.imag, gy.imag, gz.imag])


def oracle_quantum_potential(jet: PsiJet, constants: PhysicalConstants,
                             threshold: float = 0.0, on_node: str = "raise"):
    """Quantum potential from the jet, per axis.

    Uses ``lap(R)/R = Re(lap(psi)/psi) + |Im(grad(psi)/psi)|^2`` axis by axis.
    Returns ``(qx, qy, qz, q)`` with ``q = qx + qz``: the y-dependence of psi
    is a pure plane wave, so ``qy`` vanishes analytically and is only returned
    as a numerical diagnostic (it carries roundoff of order hbar^2 ky^2 eps / m).
    """
    gx, gy, gz, hx, hy, hz = _log_derivs(jet, _node_points(jet, threshold, on_node))
    c = -constants.hbar ** 2 / (2 * constants.m)
    qx = c * (hx.real + gx.imag ** 2)
    qy = c * (hy.real + gy.imag ** 2)
    qz = c * (hz.real + gz.imag ** 2)
    return qx, qy, qz, qx + qz
