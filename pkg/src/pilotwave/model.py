"""Physical constants, scenario presets and time-dependent packet quantities.

All values are SI. A :class:`Scenario` holds two :class:`PacketParams`, one
per pinhole: the packet on the ``negative`` side is centred at ``-x0`` and
travels towards ``+x``; the ``positive`` one is centred at ``+x0`` and
travels towards ``-x``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

__all__ = [
    "Side",
    "ScenarioKind",
    "PhysicalConstants",
    "PacketParams",
    "Scenario",
    "PacketState",
    "ScenarioError",
    "make_scenario",
    "packet_state_at",
    "OVERRIDE_KEYS",
    "amps_from_angle",
]

HBAR = 1.05457180e-34
ELECTRON_MASS = 9.10938356e-31
X0 = 5e-7
Z0 = 0.0
DX0 = 7e-8
KX = 1.295698717e6
KY = 1.122938132e12
KZ = 0.0


class ScenarioError(ValueError):
    """Invalid scenario parameters."""


class Side(enum.Enum):
    NEGATIVE = "neg"
    POSITIVE = "pos"

    @property
    def sign(self) -> int:
        """+1 for the packet at -x0, -1 for the packet at +x0."""
        return 1 if self is Side.NEGATIVE else -1


class ScenarioKind(enum.Enum):
    EWEA = "ewea"
    EWUA = "ewua"
    UWEA = "uwea"
    CUSTOM = "custom"


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = HBAR
    m: float = ELECTRON_MASS

    def __post_init__(self):
        if not (self.hbar > 0 and self.m > 0):
            raise ScenarioError("hbar and m must be strictly positive")

    @property
    def alpha(self) -> float:
        return self.hbar / self.m


@dataclass(frozen=True)
class PacketParams:
    side: Side
    x0: float = X0
    z0: float = Z0
    dx0: float = DX0
    kx: float = KX
    ky: float = KY
    kz: float = KZ
    amp: float = 0.5
    chi: float = 0.0

    def __post_init__(self):
        if not (self.dx0 > 0 and math.isfinite(self.dx0)):
            raise ScenarioError(f"packet width must be positive, got dx0={self.dx0!r}")
        if not 0.0 <= self.amp <= 1.0:
            raise ScenarioError(f"amplitude weight must lie in [0, 1], got {self.amp!r}")
        if self.side is Side.NEGATIVE and self.chi != 0.0:
            raise ScenarioError("the phase shift chi applies to the +x0 packet only")

    @property
    def center_x(self) -> float:
        return -self.side.sign * self.x0

    @property
    def center_z(self) -> float:
        return -self.side.sign * self.z0


@dataclass(frozen=True)
class Scenario:
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)
    packet_neg: PacketParams = field(default_factory=lambda: PacketParams(Side.NEGATIVE))
    packet_pos: PacketParams = field(default_factory=lambda: PacketParams(Side.POSITIVE))
    kind: ScenarioKind = ScenarioKind.EWEA

    def __post_init__(self):
        if self.packet_neg.side is not Side.NEGATIVE or self.packet_pos.side is not Side.POSITIVE:
            raise ScenarioError("packet sides are swapped")
        shared = ("x0", "z0", "kx", "ky", "kz")
        for name in shared:
            if getattr(self.packet_neg, name) != getattr(self.packet_pos, name):
                raise ScenarioError(f"{name} must be shared by both packets")
        total = self.packet_neg.amp + self.packet_pos.amp
        if abs(total - 1.0) > 1e-12:
            raise ScenarioError(f"amplitude weights must sum to 1, got {total!r}")

    def packet(self, side: Side) -> PacketParams:
        return self.packet_neg if side is Side.NEGATIVE else self.packet_pos

    @property
    def alpha(self) -> float:
        return self.constants.alpha

    @property
    def vy(self) -> float:
        """Particle (and packet) velocity along y, alpha * ky."""
        return self.constants.alpha * self.packet_neg.ky


# Flat override names accepted by make_scenario.
OVERRIDE_KEYS = (
    "hbar", "m", "x0", "z0", "kx", "ky", "kz",
    "dx0_neg", "dx0_pos", "amp_neg", "amp_pos", "b", "chi",
)

# Amplitudes are cos^2(b), sin^2(b) for b = pi/4 (equal) and b = arccos(1/2)
# (unequal), stored exactly so that the equal-amplitude presets stay mirror
# symmetric to the last bit.
_PRESETS = {
    ScenarioKind.EWEA: dict(amps=(0.5, 0.5), dx0_neg=DX0, dx0_pos=DX0),
    ScenarioKind.EWUA: dict(amps=(0.25, 0.75), dx0_neg=DX0, dx0_pos=DX0),
    ScenarioKind.UWEA: dict(amps=(0.5, 0.5), dx0_neg=DX0, dx0_pos=2 * DX0),
}


def amps_from_angle(b):
    """Amplitude weights ``(cos^2 b, sin^2 b)``."""
    return math.cos(b) ** 2, math.sin(b) ** 2


def make_scenario(kind="ewea", overrides=None) -> Scenario:
    """Build a scenario from a preset, optionally overriding parameters.

    Parameters
    ----------
    kind : str or ScenarioKind
        ``ewea`` (equal widths, equal amplitudes), ``ewua`` (equal widths,
        amplitudes cos^2(b), sin^2(b) with b = arccos(1/2)), ``uwea`` (the
        +x0 packet twice as wide) or ``custom`` (EWEA base values).
    overrides : dict, optional
        Flat parameter map, keys from :data:`OVERRIDE_KEYS`. ``b`` sets both
        amplitudes at once and cannot be combined with ``amp_neg``/``amp_pos``.

    Returns
    -------
    Scenario
        ``kind`` is kept when the overrides leave every value at its preset,
        otherwise it becomes ``CUSTOM``.
    """
    kind = ScenarioKind(kind.lower()) if isinstance(kind, str) else ScenarioKind(kind)
    overrides = dict(overrides or {})
    unknown = set(overrides) - set(OVERRIDE_KEYS)
    if unknown:
        raise ScenarioError(f"unknown scenario parameter(s): {', '.join(sorted(unknown))}")
    if "b" in overrides and ({"amp_neg", "amp_pos"} & set(overrides)):
        raise ScenarioError("give either the angle b or explicit amplitudes, not both")

    base = _PRESETS.get(kind, _PRESETS[ScenarioKind.EWEA])
    amp_neg, amp_pos = base["amps"]
    if "b" in overrides:
        amp_neg, amp_pos = amps_from_angle(float(overrides["b"]))
    if "amp_neg" in overrides:
        amp_neg = float(overrides["amp_neg"])
        amp_pos = float(overrides.get("amp_pos", 1.0 - amp_neg))
    elif "amp_pos" in overrides:
        amp_pos = float(overrides["amp_pos"])
        amp_neg = 1.0 - amp_pos

    constants = PhysicalConstants(
        hbar=float(overrides.get("hbar", HBAR)), m=float(overrides.get("m", ELECTRON_MASS))
    )
    shared = {k: float(overrides.get(k, default)) for k, default in
              (("x0", X0), ("z0", Z0), ("kx", KX), ("ky", KY), ("kz", KZ))}
    neg = PacketParams(Side.NEGATIVE, dx0=float(overrides.get("dx0_neg", base["dx0_neg"])),
                       amp=amp_neg, **shared)
    pos = PacketParams(Side.POSITIVE, dx0=float(overrides.get("dx0_pos", base["dx0_pos"])),
                       amp=amp_pos, chi=float(overrides.get("chi", 0.0)), **shared)
    scenario = Scenario(constants, neg, pos, kind)
    if overrides and kind is not ScenarioKind.CUSTOM and scenario != make_scenario(kind):
        scenario = replace(scenario, kind=ScenarioKind.CUSTOM)
    return scenario


@dataclass(frozen=True)
class PacketState:
    t: float
    dx_t_sq: float     # spread Delta^2(t), m^2
    dx1_t_sq: float    # Delta0^4 + alpha^2 t^2, m^4
    beta: float
    theta: float
    vx: float
    vz: float
    omega_x: float
    omega_z: float

    @property
    def dx_t(self) -> float:
        return math.sqrt(self.dx_t_sq)


def packet_state_at(scenario: Scenario, side: Side, t: float) -> PacketState:
    """Spread, normalisation and drift of one packet at time ``t``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    p = scenario.packet(Side(side))
    alpha = scenario.alpha
    w2 = p.dx0 * p.dx0
    at = alpha * t
    dx1_sq = w2 * w2 + at * at
    return PacketState(
        t=t,
        dx_t_sq=w2 + at * at / w2,
        dx1_t_sq=dx1_sq,
        beta=math.sqrt(4 * math.pi ** 2 / dx1_sq),
        theta=0.5 * math.atan(-at / w2),
        vx=alpha * p.kx,
        vz=alpha * p.kz,
        omega_x=alpha * p.kx ** 2 / 2,
        omega_z=alpha * p.kz ** 2 / 2,
    )
