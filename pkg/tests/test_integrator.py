import numpy as np
import pytest

from pilotwave.integrator import (
    NodeMaskedError,
    Status,
    integrate_ensemble,
    integrate_trajectory,
    rk4_step,
)
from pilotwave.model import make_scenario
from pilotwave.observables import square_grid_initials

T1 = 1.5e-9


@pytest.fixture(scope="module")
def ewea():
    return make_scenario("ewea")


@pytest.fixture(scope="module")
def ewea_grid_run(ewea):
    inits = square_grid_initials(ewea, 3).points
    return inits, integrate_ensemble(ewea, inits, 0.0, T1)


def test_constant_rhs_is_exact():
    # an isolated packet seen at its own centre at t = 0 has v = alpha kx exactly
    sc = make_scenario("ewea", {"amp_neg": 1.0, "dx0_neg": 1.0})
    x, z = rk4_step(sc, (-5e-7, 0.0), 0.0, 1e-12)
    assert x == pytest.approx(-5e-7 + sc.alpha * sc.packet_neg.kx * 1e-12, rel=1e-15, abs=1e-30)
    assert z == 0.0


def test_symmetry_axis_is_fixed_point(ewea):
    for t in (0.0, 2e-10, 1.2e-9):
        assert rk4_step(ewea, (0.0, 0.0), t, 1e-12) == (0.0, 0.0)
    tr = integrate_trajectory(ewea, (0.0, 0.0), 0.0, T1)
    assert np.all(tr.x == 0.0) and np.all(tr.z == 0.0)


def test_screen_distance(ewea):
    tr = integrate_trajectory(ewea, (0.0, 0.0), 0.0, T1)
    assert tr.final.y == ewea.vy * T1
    assert tr.final.y == pytest.approx(0.195, abs=1.5e-5)
    assert tr.final.y == pytest.approx(0.19499983934454248, rel=1e-15)


def test_rk4_step_raises_inside_mask(ewea):
    with pytest.raises(NodeMaskedError):
        rk4_step(ewea, (4e-6, 4e-6), 0.0, 1e-12)


def test_sampling_layout(ewea_grid_run):
    inits, trajs = ewea_grid_run
    assert len(trajs) == 18
    for tr in trajs:
        assert tr.status is Status.COMPLETED
        assert len(tr) == 151
        assert tr.t[0] == 0.0 and tr.t[-1] == pytest.approx(T1, rel=1e-15)
        steps = np.diff(tr.t)
        assert np.all(steps > 0)
        assert np.ptp(steps) <= 1e-9 * steps.mean()


def test_initial_samples_are_inits(ewea_grid_run):
    inits, trajs = ewea_grid_run
    for (x, z), tr in zip(inits, trajs):
        assert (tr.initial.x, tr.initial.z) == (x, z)


def test_y_exact(ewea, ewea_grid_run):
    _, trajs = ewea_grid_run
    for tr in trajs:
        assert np.max(np.abs(tr.y - ewea.vy * tr.t)) == 0.0
        assert np.all(tr.vy == ewea.vy)


def test_no_crossing(ewea_grid_run):
    _, trajs = ewea_grid_run
    for tr in trajs:
        assert len(set(np.sign(tr.x))) == 1


def test_mirror_images(ewea):
    a, b = integrate_ensemble(ewea, [(-5.2e-7, 2e-8), (5.2e-7, 2e-8)], 0.0, T1)
    assert np.max(np.abs(a.x + b.x)) <= 1e-9
    assert np.max(np.abs(a.z - b.z)) <= 1e-9


def test_batching_is_bit_identical(ewea):
    inits = square_grid_initials(ewea, 2).points
    batch = integrate_ensemble(ewea, inits, 0.0, 3e-10)
    for i, init in enumerate(inits):
        single = integrate_trajectory(ewea, init, 0.0, 3e-10)
        assert np.array_equal(single.x, batch[i].x) and np.array_equal(single.z, batch[i].z)
    perm = [3, 1, 7, 0, 2, 6, 5, 4]
    shuffled = integrate_ensemble(ewea, inits[perm], 0.0, 3e-10)
    for j, i in enumerate(perm):
        assert np.array_equal(shuffled[j].x, batch[i].x)


def test_convergence_order(ewea):
    inits = [(-5e-7 + 2e-8, 1e-8), (5e-7 - 3e-8, -2e-8)]

    def ends(dt):
        return np.array([(t.x[-1], t.z[-1]) for t in integrate_ensemble(ewea, inits, 0.0, T1, dt, 10 ** 9)])

    ref = ends(2.5e-13)
    errs = [np.max(np.hypot(*(ends(dt) - ref).T)) for dt in (4e-12, 2e-12, 1e-12)]
    assert errs[0] / errs[1] >= 12
    assert errs[1] / errs[2] >= 12


def test_node_masked_trajectory_is_truncated(ewea):
    # starts in the far tail, where the intensity is below the mask at t = 0
    trajs = integrate_ensemble(ewea, [(-5e-7, 0.0), (3.5e-6, 3.5e-6)], 0.0, 1e-10)
    assert trajs[0].status is Status.COMPLETED
    assert trajs[1].status is Status.NODE_MASKED
    assert len(trajs[1]) < len(trajs[0])
    assert len(trajs[1]) >= 1


def test_interval_validation(ewea):
    with pytest.raises(ValueError):
        integrate_trajectory(ewea, (0.0, 0.0), 0.0, 1e-9, dt=3e-12)
    with pytest.raises(ValueError):
        integrate_trajectory(ewea, (0.0, 0.0), 1e-9, 1e-9)
    with pytest.raises(ValueError):
        integrate_trajectory(ewea, (0.0, 0.0), 0.0, 1e-9, stride=0)


def test_uwea_narrow_pinhole_fans_out_faster():
    sc = make_scenario("uwea")
    inits = square_grid_initials(sc, 3).points
    trajs = integrate_ensemble(sc, inits, 0.0, 7.5e-10)
    spread0 = [np.ptp([tr.x[0] for tr in trajs[k:k + 9]]) for k in (0, 9)]
    spread1 = [np.ptp([tr.x[-1] for tr in trajs[k:k + 9]]) for k in (0, 9)]
    assert spread1[0] / spread0[0] > spread1[1] / spread0[1]
