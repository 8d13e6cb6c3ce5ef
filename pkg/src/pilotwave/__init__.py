"""Pilot-wave (de Broglie-Bohm) simulation of two-pinhole interference.

Two Gaussian packets, one per pinhole, spread and overlap; the package
evaluates the resulting intensity, quantum potential and guidance velocity in
closed form, integrates particle trajectories, and extracts fringe
visibilities.
"""
from .model import (
    PacketParams,
    PacketState,
    PhysicalConstants,
    Scenario,
    ScenarioError,
    ScenarioKind,
    Side,
    make_scenario,
    packet_state_at,
)
from .oracle import DegenerateNodeError, PsiJet, eval_packet, eval_superposition
from .fields import (
    FieldSample,
    envelope_and_phase,
    field_sample,
    intensity,
    node_mask,
    phase_gradient,
    quantum_potential,
    velocity,
)
from .integrator import (
    NodeMaskedError,
    Status,
    Trajectory,
    TrajectoryState,
    integrate_ensemble,
    integrate_trajectory,
    rk4_step,
)
from .observables import (
    FringeProfile,
    InitialSet,
    NoFringeError,
    born_sample_initials,
    central_fringe_visibility,
    continuity_residual,
    endpoint_density_distance,
    fringe_profile,
    square_grid_initials,
)
from .config import ConfigError, GridSpec, RunOptions, parse_config, serialize_config
from .export import export_field_grid, export_trajectories
from .report import RunReport, VerifyOptions, run_verify

__version__ = "0.1.0"
