"""Numerical acceptance checks.

Each ``check_*`` function runs one numbered criterion and returns a
:class:`CheckResult` holding the measured values, the thresholds and a
pass/fail verdict. Failures are recorded, never raised. The same functions
back ``pilotwave verify`` and the acceptance test module.

Error metrics
-------------
Plain relative error ``|a - b| / max(|a|, |b|)`` is meaningless where a field
crosses zero, so two scaled variants are used:

* momentum components are compared relative to ``max(|a|, |b|, floor)``
  with ``floor = 1e-6 * frame max of hbar |grad psi / psi|``. The complex
  log-derivative sets the roundoff of the oracle's ``Im`` part, which is all
  that is left where a component vanishes by symmetry;
* quantum potential values are compared relative to their term scale
  ``sum_u hbar^2/(8m) (d_u R^2/R^2)^2 + hbar^2/(4m) |d_uu R^2/R^2|``, which
  bounds ``|Q|`` from above and is the size of the two terms that cancel.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import fields, observables, oracle
from .fields import _axis_terms, _intensity, _pair
from .integrator import Status, integrate_ensemble
from .model import Scenario, ScenarioKind, make_scenario

__all__ = [
    "CheckResult",
    "PRESETS",
    "GRID_HALF_WIDTH",
    "GRID_POINTS",
    "CHECK_FRAMES",
    "FD_STEP",
    "relative_error",
    "floored_relative_error",
    "q_term_scale",
    "fd_first",
    "fd_second",
    "check_intensity_oracle",
    "check_field_oracle",
    "check_visibility",
    "check_screen_distance",
    "check_continuity",
    "check_rk4_order",
    "pinhole_born_initials",
    "check_equivariance",
    "check_symmetry",
    "check_qualitative",
    "ALL_CHECKS",
]

PRESETS = ("ewea", "ewua", "uwea")
GRID_HALF_WIDTH = 3.5e-6
GRID_POINTS = 101
CHECK_FRAMES = tuple(np.linspace(0.0, 1.5e-9, 6))
MASK_FRACTION = 1e-12
FD_STEP = 1e-10
T_FINAL = 1.5e-9

VISIBILITY_TARGETS = {"ewea": (0.99, 1.0), "ewua": (0.55, 0.65), "uwea": (0.80, 0.96)}


@dataclass
class CheckResult:
    criterion: int
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)
    detail: str = ""
    skipped: bool = False

    @property
    def status(self) -> str:
        if self.skipped:
            return "skip"
        return "pass" if self.passed else "fail"

    def line(self) -> str:
        vals = ", ".join(f"{k}={_fmt(v)}" for k, v in self.measured.items())
        text = f"[{self.status.upper()}] {self.criterion}. {self.name}: {vals}"
        return text + (f" ({self.detail})" if self.detail else "")


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.6g}"
    return str(v)


def _scenarios(names):
    return [s if isinstance(s, Scenario) else make_scenario(s) for s in names]


def _label(sc):
    return sc.kind.value


# -- metrics ---------------------------------------------------------------

def relative_error(a, b):
    """Elementwise ``|a - b| / max(|a|, |b|)``; 0 where both vanish."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    den = np.maximum(np.abs(a), np.abs(b))
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(den > 0, np.abs(a - b) / den, np.where(a == b, 0.0, np.inf))


def floored_relative_error(a, b, floor):
    """``|a - b| / max(|a|, |b|, floor)``."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)


def q_term_scale(scenario, x, z, t):
    """Size of the two terms whose difference is the quantum potential."""
    a, b, c, s = _pair(scenario, x, z, t)
    inten = _intensity(a, b, c)
    hbar, m = scenario.constants.hbar, scenario.constants.m
    total = 0.0
    with np.errstate(invalid="ignore", divide="ignore"):
        for axis in ("x", "z"):
            d1, d2, _, _ = _axis_terms(a, b, c, s, axis)
            total = total + hbar ** 2 / (8 * m) * (d1 / inten) ** 2 + hbar ** 2 / (4 * m) * np.abs(d2 / inten)
    return total


def _worst(err, mask):
    """Max of ``err`` over ``mask``; NaN inside the mask counts as infinite."""
    e = np.where(np.isnan(err), np.inf, err)
    return float(np.max(e[mask])) if np.any(mask) else 0.0


def fd_first(f, x, z, axis, h=FD_STEP):
    """Five-point centred first derivative of ``f(x, z)`` along ``axis``."""
    if axis == "x":
        g = lambda k: f(x + k * h, z)
    else:
        g = lambda k: f(x, z + k * h)
    return (-g(2) + 8 * g(1) - 8 * g(-1) + g(-2)) / (12 * h)


def fd_second(f, x, z, axis, h=FD_STEP):
    """Five-point centred second derivative of ``f(x, z)`` along ``axis``."""
    if axis == "x":
        g = lambda k: f(x + k * h, z)
    else:
        g = lambda k: f(x, z + k * h)
    return (-g(2) + 16 * g(1) - 30 * g(0) + 16 * g(-1) - g(-2)) / (12 * h * h)


def _grid():
    g = np.linspace(-GRID_HALF_WIDTH, GRID_HALF_WIDTH, GRID_POINTS)
    return np.meshgrid(g, g)


# -- criteria --------------------------------------------------------------

def check_intensity_oracle(scenarios=PRESETS, frames=CHECK_FRAMES, tol=1e-9, max_runtime=5.0):
    """1. Closed-form intensity against the literal complex superposition."""
    start = time.perf_counter()
    X, Z = _grid()
    worst = 0.0
    for sc in _scenarios(scenarios):
        for t in frames:
            dens = oracle.eval_superposition(sc, X, 0.0, Z, t).density
            mask = dens > MASK_FRACTION * dens.max()
            worst = max(worst, _worst(relative_error(fields.intensity(sc, X, 0.0, Z, t), dens), mask))
    runtime = time.perf_counter() - start
    return CheckResult(1, "oracle equivalence, intensity", worst < tol and runtime < max_runtime,
                       {"max_rel_err": worst, "tol": tol, "runtime_s": runtime})


def check_field_oracle(scenarios=PRESETS, frames=CHECK_FRAMES, tol_jet=1e-9, tol_fd=1e-4,
                       max_runtime=10.0):
    """2. Closed-form Q and grad S against the complex jet and finite differences."""
    start = time.perf_counter()
    X, Z = _grid()
    err = dict(grad_s_jet=0.0, q_jet=0.0, grad_s_fd=0.0, q_fd=0.0)
    for sc in _scenarios(scenarios):
        hbar, m = sc.constants.hbar, sc.constants.m
        for t in frames:
            jet = oracle.eval_superposition(sc, X, 0.0, Z, t)
            dens = jet.density
            thr = MASK_FRACTION * dens.max()
            mask = dens > thr
            gs = fields.phase_gradient(sc, X, 0.0, Z, t, on_node="nan")
            q = fields.quantum_potential(sc, X, 0.0, Z, t, on_node="nan")[2]
            og = oracle.oracle_phase_gradient(jet, hbar, thr, on_node="nan")
            oq = oracle.oracle_quantum_potential(jet, sc.constants, thr, on_node="nan")[3]
            scale = q_term_scale(sc, X, Z, t)

            def psi(x, z, t=t, sc=sc):
                return oracle.eval_superposition(sc, x, 0.0, z, t).value

            def modulus(x, z):
                return np.abs(psi(x, z))

            with np.errstate(invalid="ignore", divide="ignore"):
                fd_g = [hbar * np.imag(np.conj(jet.value) * fd_first(psi, X, Z, ax)) / dens for ax in "xz"]
                lap = fd_second(modulus, X, Z, "x") + fd_second(modulus, X, Z, "z")
                fd_q = -hbar ** 2 / (2 * m) * lap / np.sqrt(dens)

            with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
                logd = np.hypot(np.abs(jet.d_dx / jet.value), np.abs(jet.d_dz / jet.value))
            floor = 1e-6 * hbar * np.max(logd[mask])
            for i, k in ((0, 0), (2, 1)):
                err["grad_s_jet"] = max(err["grad_s_jet"], _worst(floored_relative_error(gs[i], og[i], floor), mask))
                err["grad_s_fd"] = max(err["grad_s_fd"], _worst(floored_relative_error(gs[i], fd_g[k], floor), mask))
            err["q_jet"] = max(err["q_jet"], _worst(np.abs(q - oq) / scale, mask))
            err["q_fd"] = max(err["q_fd"], _worst(np.abs(q - fd_q) / scale, mask))
    runtime = time.perf_counter() - start
    ok = (err["grad_s_jet"] < tol_jet and err["q_jet"] < tol_jet
          and err["grad_s_fd"] < tol_fd and err["q_fd"] < tol_fd and runtime < max_runtime)
    return CheckResult(2, "oracle equivalence, Q and grad S", ok, {**err, "runtime_s": runtime})


def check_visibility(t=T_FINAL, max_runtime=1.0):
    """3. Central-fringe visibilities of the presets and their ordering."""
    vis, runtime = {}, 0.0
    for name in PRESETS:
        start = time.perf_counter()
        vis[name] = observables.central_fringe_visibility(observables.fringe_profile(make_scenario(name), t))
        runtime = max(runtime, time.perf_counter() - start)
    in_band = {k: lo <= vis[k] <= hi for k, (lo, hi) in VISIBILITY_TARGETS.items()}
    ordered = vis["ewea"] > vis["uwea"] > vis["ewua"]
    ok = all(in_band.values()) and ordered and runtime < max_runtime
    missed = [f"{k} outside [{lo:g}, {hi:g}]" for k, (lo, hi) in VISIBILITY_TARGETS.items() if not in_band[k]]
    return CheckResult(3, "fringe visibilities", ok,
                       {"V_ewea": vis["ewea"], "V_ewua": vis["ewua"], "V_uwea": vis["uwea"],
                        "ordered": ordered, "runtime_s": runtime},
                       "; ".join(missed))


def check_screen_distance(t=T_FINAL):
    """4. Closed-form y motion and the drift speeds.

    ``y`` is checked to be exactly ``alpha * ky * t`` (no integration error)
    and within 1.5e-5 m of 0.195 m, the spread implied by the +-1e4 m/s
    tolerance on ``alpha * ky``.
    """
    sc = make_scenario("ewea")
    tr = integrate_ensemble(sc, [(0.0, 0.0)], 0.0, t, stride=10 ** 9)[0]
    y = tr.y[-1]
    vx = sc.alpha * sc.packet_neg.kx
    vy = sc.vy
    exact = y == vy * t
    ok = exact and abs(y - 0.195) <= 1e4 * t and abs(vx - 150.0) <= 0.01 and abs(vy - 1.3e8) <= 1e4
    return CheckResult(4, "screen distance and drift speeds", ok,
                       {"y_final": y, "y_closed_form_exact": exact, "alpha_kx": vx, "alpha_ky": vy})


def check_continuity(n_points=1000, times=(3e-10, 7.5e-10, 1.5e-9), seed=0, tol=1e-3, max_runtime=5.0):
    """5. Continuity residual at random unmasked points, all presets and ``times``."""
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst, active = 0.0, 0
    for sc in _scenarios(PRESETS):
        for t in times:
            x = np.empty(0)
            z = np.empty(0)
            while len(x) < n_points:
                cx = rng.uniform(-GRID_HALF_WIDTH, GRID_HALF_WIDTH, n_points)
                cz = rng.uniform(-GRID_HALF_WIDTH, GRID_HALF_WIDTH, n_points)
                keep = ~fields.node_mask(sc, cx, cz, t)
                x, z = np.concatenate([x, cx[keep]]), np.concatenate([z, cz[keep]])
            r = observables.continuity_residual(sc, x[:n_points], 0.0, z[:n_points], t)
            worst = max(worst, float(np.max(r)))
            active += int(np.count_nonzero(r > 0))
    runtime = time.perf_counter() - start
    return CheckResult(5, "continuity equation", worst < tol and runtime < max_runtime,
                       {"max_residual": worst, "non_vacuous_points": active, "runtime_s": runtime})


def check_rk4_order(n_traj=10, seed=0, dts=(4e-12, 2e-12, 1e-12), dt_ref=2.5e-13, t=T_FINAL,
                    min_factor=12.0, max_runtime=5.0):
    """6. Endpoint self-convergence of RK4 on Born-sampled EWEA trajectories."""
    start = time.perf_counter()
    sc = make_scenario("ewea")
    inits = pinhole_born_initials(sc, n_traj, seed)

    def endpoints(dt):
        return np.array([(tr.x[-1], tr.z[-1]) for tr in integrate_ensemble(sc, inits, 0.0, t, dt, 10 ** 9)])

    ref = endpoints(dt_ref)
    errs = [float(np.max(np.hypot(*(endpoints(dt) - ref).T))) for dt in dts]
    factors = [errs[i] / errs[i + 1] for i in range(len(errs) - 1)]
    runtime = time.perf_counter() - start
    measured = {f"err_dt{dt:g}": e for dt, e in zip(dts, errs)}
    measured.update({f"factor_{i + 1}": f for i, f in enumerate(factors)})
    measured["runtime_s"] = runtime
    return CheckResult(6, "RK4 fourth-order convergence",
                       min(factors) >= min_factor and runtime < max_runtime, measured)


def pinhole_born_initials(scenario, count, seed):
    """``count`` Born-rule draws at t = 0 that fall inside the pinhole squares.

    The squares are ``center +- dx0/2`` per packet, the region the square
    lattices fill.
    """
    pts = observables.born_sample_initials(scenario, 20 * count, seed).points
    inside = np.zeros(len(pts), dtype=bool)
    for p in (scenario.packet_neg, scenario.packet_pos):
        inside |= ((np.abs(pts[:, 0] - p.center_x) <= p.dx0 / 2)
                   & (np.abs(pts[:, 1] - p.center_z) <= p.dx0 / 2))
    pts = pts[inside]
    if len(pts) < count:
        raise RuntimeError("too few samples inside the pinhole squares")
    return pts[:count]


def check_equivariance(n=20000, seed=0, t=T_FINAL, tol=0.08, max_runtime=60.0):
    """7. Born-sampled EWEA ensemble stays distributed as the intensity.

    Also reports ``iid_noise_l1``: the same distance for ``n`` exact i.i.d.
    draws from the time-``t`` bin masses, i.e. the pure sampling-noise floor.
    """
    start = time.perf_counter()
    sc = make_scenario("ewea")
    inits = observables.born_sample_initials(sc, n, seed).points
    trajs = integrate_ensemble(sc, inits, 0.0, t, stride=10 ** 9)
    dist = observables.endpoint_density_distance(trajs, sc, t)
    runtime = time.perf_counter() - start
    p = observables.bin_probabilities(sc, t)
    counts = np.random.default_rng(seed).multinomial(n, p.ravel())
    iid = float(np.abs(counts / n - p.ravel()).sum())
    masked = sum(tr.status is Status.NODE_MASKED for tr in trajs)
    ok = dist < tol and runtime < max_runtime
    return CheckResult(7, "equivariance", ok,
                       {"l1_distance": dist, "tol": tol, "iid_noise_l1": iid, "n": n,
                        "node_masked": masked, "runtime_s": runtime})


def check_symmetry(grid_n=5, t=T_FINAL, tol=1e-10):
    """8. EWEA mirror symmetry: no crossing, vanishing midplane velocity, even fields."""
    sc = make_scenario("ewea")
    inits = observables.square_grid_initials(sc, grid_n).points
    trajs = integrate_ensemble(sc, inits, 0.0, t)
    crossings = sum(int(np.any(np.sign(tr.x) != np.sign(tr.x[0]))) for tr in trajs)

    zs = np.linspace(-GRID_HALF_WIDTH, GRID_HALF_WIDTH, 41)
    vx_mid = 0.0
    for tt in CHECK_FRAMES:
        vx = fields.velocity(sc, 0.0, 0.0, zs, tt, on_node="nan")[0]
        vx_mid = max(vx_mid, float(np.nanmax(np.abs(vx))))

    X, Z = _grid()
    even_i = even_q = 0.0
    qy_exact = True
    for tt in CHECK_FRAMES:
        inten = fields.intensity(sc, X, 0.0, Z, tt)
        qx, qz, q = fields.quantum_potential(sc, X, 0.0, Z, tt, on_node="nan")
        qy_exact &= bool(np.array_equal(q, qx + qz, equal_nan=True))
        mask = inten > MASK_FRACTION * inten.max()
        scale = q_term_scale(sc, X, Z, tt)
        for flip in (np.fliplr, np.flipud):     # x -> -x, z -> -z
            sym = mask & flip(mask)
            even_i = max(even_i, _worst(relative_error(inten, flip(inten)), sym))
            even_q = max(even_q, _worst(np.abs(q - flip(q)) / np.maximum(scale, flip(scale)), sym))
    ok = crossings == 0 and vx_mid <= 1e-20 and even_i <= tol and even_q <= tol and qy_exact
    return CheckResult(8, "EWEA symmetry and no-crossing", ok,
                       {"crossings": crossings, "n_traj": len(trajs), "max_vx_midplane": vx_mid,
                        "intensity_even_err": even_i, "q_even_err": even_q, "qy_identically_zero": qy_exact})


def check_qualitative(n_born=100000, seed=0):
    """9. EWUA valley asymmetry, UWEA Born fraction and UWEA overlap position."""
    q_left, q_right = observables.first_valley_depths(make_scenario("ewua"), 7.5e-10)
    uwea = make_scenario("uwea")
    pts = observables.born_sample_initials(uwea, n_born, seed).points
    frac_wide = float(np.mean(pts[:, 0] > 0))
    peak = observables.overlap_peak_position(uwea, 3e-10)
    parts = {"ewua_deeper_valley_neg_side": q_left < q_right,
             "uwea_wide_pinhole_fraction_gt_half": frac_wide > 0.5,
             "uwea_overlap_peak_pos_side": peak > 0}
    missed = [k for k, v in parts.items() if not v]
    return CheckResult(9, "qualitative features", all(parts.values()),
                       {"ewua_q_valley_neg": q_left, "ewua_q_valley_pos": q_right,
                        "uwea_wide_fraction": frac_wide, "uwea_overlap_peak_x": peak},
                       ("failed: " + ", ".join(missed)) if missed else "")


ALL_CHECKS = {
    1: check_intensity_oracle,
    2: check_field_oracle,
    3: check_visibility,
    4: check_screen_distance,
    5: check_continuity,
    6: check_rk4_order,
    7: check_equivariance,
    8: check_symmetry,
    9: check_qualitative,
}


def scenario_label(scenario: Scenario) -> str:
    return scenario.kind.value if scenario.kind is not ScenarioKind.CUSTOM else "custom"
