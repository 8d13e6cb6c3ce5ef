import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pilotwave.model import (
    DX0,
    PacketParams,
    PhysicalConstants,
    Scenario,
    ScenarioError,
    ScenarioKind,
    Side,
    amps_from_angle,
    make_scenario,
    packet_state_at,
)

# reference values from 40-digit arithmetic on the tabulated constants
ALPHA = 1.157676359826042938e-4
DX_T_EWEA_END = 2.481722470762617652e-6
BETA_T_END = 3.616834322130423556e13
THETA_T_END = -0.7712931846901219724


def test_constants():
    c = PhysicalConstants()
    assert c.alpha == pytest.approx(ALPHA, rel=1e-15)
    assert abs(c.alpha - c.hbar / c.m) <= 1e-12 * c.alpha
    with pytest.raises(ScenarioError):
        PhysicalConstants(hbar=0.0)


def test_presets():
    ewea, ewua, uwea = (make_scenario(k) for k in ("ewea", "ewua", "uwea"))
    assert (ewea.packet_neg.amp, ewea.packet_pos.amp) == (0.5, 0.5)
    assert ewea.packet_neg.dx0 == ewea.packet_pos.dx0 == 7e-8
    assert (ewua.packet_neg.amp, ewua.packet_pos.amp) == (0.25, 0.75)
    assert (uwea.packet_neg.dx0, uwea.packet_pos.dx0) == (7e-8, 1.4e-7)
    assert uwea.kind is ScenarioKind.UWEA
    for sc in (ewea, ewua, uwea):
        assert sc.packet_neg.amp + sc.packet_pos.amp == 1.0
        assert sc.packet_neg.center_x == -5e-7 and sc.packet_pos.center_x == 5e-7
        assert sc.packet_neg.z0 == 0.0 and sc.packet_pos.chi == 0.0


def test_ewua_amplitudes_from_angle():
    neg, pos = amps_from_angle(math.pi / 3)
    assert (neg, pos) == pytest.approx((0.25, 0.75), abs=1e-15)


def test_drift_speeds_match_table():
    sc = make_scenario("ewea")
    st_ = packet_state_at(sc, Side.NEGATIVE, 0.7e-9)
    assert st_.vx == pytest.approx(150.0, rel=1e-4)
    assert sc.vy == pytest.approx(1.3e8, rel=1e-4)
    assert st_.vx == pytest.approx(149.99997741278342, rel=1e-14)
    assert st_.omega_x == pytest.approx(ALPHA * 1.295698717e6 ** 2 / 2, rel=1e-14)
    assert st_.vz == 0.0 and st_.omega_z == 0.0


def test_packet_state_at_zero():
    st_ = packet_state_at(make_scenario("ewea"), "neg", 0.0)
    assert st_.dx_t == pytest.approx(7e-8, rel=1e-15)
    assert st_.beta == pytest.approx(2 * math.pi / 4.9e-15, rel=1e-15)
    assert st_.theta == 0.0


def test_packet_state_at_end_frame():
    st_ = packet_state_at(make_scenario("ewea"), Side.NEGATIVE, 1.5e-9)
    assert st_.dx_t == pytest.approx(DX_T_EWEA_END, rel=1e-13)
    assert st_.beta == pytest.approx(BETA_T_END, rel=1e-13)
    assert st_.theta == pytest.approx(THETA_T_END, rel=1e-13)
    assert st_.dx1_t_sq == pytest.approx(DX0 ** 4 + (ALPHA * 1.5e-9) ** 2, rel=1e-14)


def test_packet_state_rejects_negative_time():
    with pytest.raises(ValueError):
        packet_state_at(make_scenario("ewea"), Side.NEGATIVE, -1e-12)


def test_spread_nondecreasing():
    sc = make_scenario("uwea")
    for side in Side:
        w = [packet_state_at(sc, side, t).dx_t_sq for t in np.linspace(0, 3e-9, 100)]
        assert np.all(np.diff(w) >= 0)


def test_narrow_packet_spreads_faster():
    sc = make_scenario("uwea")
    for t in np.linspace(1e-11, 3e-9, 50):
        neg = packet_state_at(sc, Side.NEGATIVE, t).dx_t / sc.packet_neg.dx0
        pos = packet_state_at(sc, Side.POSITIVE, t).dx_t / sc.packet_pos.dx0
        assert neg > pos


def test_overrides_and_kind():
    sc = make_scenario("ewea", {"dx0_pos": 1.4e-7})
    assert sc.kind is ScenarioKind.CUSTOM
    assert sc.packet_pos.dx0 == make_scenario("uwea").packet_pos.dx0
    assert make_scenario("ewea", {"kx": 1.295698717e6}).kind is ScenarioKind.EWEA
    sc = make_scenario("ewea", {"amp_neg": 0.3})
    assert sc.packet_pos.amp == pytest.approx(0.7)
    assert make_scenario("ewea", {"chi": 0.5}).packet_pos.chi == 0.5


@pytest.mark.parametrize("overrides", [
    {"dx0_neg": 0.0},
    {"dx0_pos": -1e-8},
    {"amp_neg": 1.5},
    {"amp_neg": 0.3, "amp_pos": 0.3},
    {"b": 0.3, "amp_neg": 0.5},
    {"kx_": 1.0},
])
def test_override_validation(overrides):
    with pytest.raises(ScenarioError):
        make_scenario("ewea", overrides)


def test_chi_only_on_positive_packet():
    with pytest.raises(ScenarioError):
        PacketParams(Side.NEGATIVE, chi=0.1)


def test_shared_geometry_enforced():
    with pytest.raises(ScenarioError):
        Scenario(packet_neg=PacketParams(Side.NEGATIVE, x0=4e-7))


@given(st.floats(0.0, math.pi / 2))
def test_angle_amplitudes_sum_to_one(b):
    sc = make_scenario("custom", {"b": b})
    assert sc.packet_neg.amp + sc.packet_pos.amp == pytest.approx(1.0, abs=1e-15)
