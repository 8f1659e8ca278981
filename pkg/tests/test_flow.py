"""Ascent-flow integration and the collinearity-angle monotonicity checks."""

import math

import numpy as np
import pytest

from sbclab.collinear import moulton_solve
from sbclab.core import (
    Configuration,
    Spectrum,
    gradient,
    moment_of_inertia_s,
    potential,
)
from sbclab.errors import CollisionError, NoConvergence
from sbclab.flow import (
    FlowTrajectory,
    collinearity_angle,
    integrate_flow,
    lyapunov_45_check,
    steer_to_angle,
    tilted_line_seed,
    _flow_rhs,
)

S3 = Spectrum((2.0, 1.0, 1.0))
M3 = np.ones(3)


def _config(q):
    return Configuration(np.asarray(q, dtype=float), np.ones(len(q)))


# ---------------------------------------------------------------------------
# collinearity angle


def test_angle_zero_on_axis():
    cfg = _config([[-1.0, 0, 0], [0.2, 0, 0], [0.8, 0, 0]])
    assert collinearity_angle(cfg) == 0.0


def test_angle_45_for_diagonal_minimizing_pair():
    # pair (1,2) along (1,1,0) gives 45 degrees; the other pairs are steeper
    cfg = _config([[0, 0, 0], [1, 1, 0], [0.1, 3, 0]])
    assert collinearity_angle(cfg) == pytest.approx(45.0, abs=1e-12)


def test_angle_90_when_every_pair_transverse():
    cfg = _config([[0, -1, 0], [0, 0.3, 0], [0, 1, 0]])
    assert collinearity_angle(cfg) == pytest.approx(90.0)


def test_angle_is_min_over_pairs():
    cfg = _config([[0, 0, 0], [1, math.tan(math.radians(10)), 0],
                   [-1, 2, 0]])
    assert collinearity_angle(cfg) == pytest.approx(10.0, abs=1e-9)


def test_angle_planar_config():
    cfg = Configuration(np.array([[0.0, 0.0], [1.0, 1.0]]), np.ones(2))
    assert collinearity_angle(cfg) == pytest.approx(45.0)


def test_angle_rejects_collision_and_d1():
    near = _config([[0, 0, 0], [1e-12, 0, 0], [1, 0, 0]])
    with pytest.raises(CollisionError):
        collinearity_angle(near)
    with pytest.raises(ValueError):
        collinearity_angle(Configuration(np.array([[0.0], [1.0]]), np.ones(2)))


# ---------------------------------------------------------------------------
# seed steering


def test_steer_hits_target_exactly():
    rng = np.random.default_rng(3)
    for target in (5.0, 30.0, 44.9):
        cfg = Configuration(rng.standard_normal((4, 3)), np.ones(4))
        out = steer_to_angle(cfg, target)
        assert collinearity_angle(out) == pytest.approx(target, abs=1e-9)


def test_steer_scales_transverse_axes_only():
    cfg = _config([[0, 0, 0], [1, 1, 0], [0.1, 3, 0]])
    out = steer_to_angle(cfg, 20.0)
    assert np.allclose(out.q[:, 0], cfg.q[:, 0])
    ratio = math.tan(math.radians(20.0)) / math.tan(math.radians(45.0))
    assert np.allclose(out.q[:, 1:], cfg.q[:, 1:] * ratio)


def test_steer_validates_inputs():
    cfg = _config([[0, 0, 0], [1, 1, 0], [0.1, 3, 0]])
    with pytest.raises(ValueError):
        steer_to_angle(cfg, 0.0)
    with pytest.raises(ValueError):
        steer_to_angle(cfg, 90.0)
    axis = _config([[-1, 0, 0], [0, 0, 0], [1, 0, 0]])
    with pytest.raises(ValueError):
        steer_to_angle(axis, 30.0)


# ---------------------------------------------------------------------------
# integration basics


def test_flow_rhs_matches_gradient():
    rng = np.random.default_rng(5)
    for _ in range(10):
        q = rng.standard_normal((4, 3))
        cfg = Configuration(q, np.ones(4))
        qdot, u = _flow_rhs(cfg.q, cfg.masses, S3.array)
        expected = gradient(cfg) / (cfg.masses[:, None] * S3.array[None, :])
        expected += potential(cfg) * cfg.q
        assert u == pytest.approx(potential(cfg), rel=1e-14)
        assert np.allclose(qdot, expected, atol=1e-13)


def test_balanced_point_is_stationary():
    rec = moulton_solve(M3, (1, 2, 3), 1, S3)
    traj = integrate_flow(rec.config, S3, 10.0)
    assert traj.stop_reason == "converged"
    assert np.max(np.abs(traj.states[-1].q - rec.config.q)) < 1e-8


def test_trajectory_invariants_over_t50():
    rng = np.random.default_rng(12)
    seed = tilted_line_seed(35.0, 0.7)
    traj = integrate_flow(seed, S3, 50.0)
    assert isinstance(traj, FlowTrajectory)
    assert np.all(np.diff(traj.times) > 0)
    for state in traj.states:
        assert abs(moment_of_inertia_s(state, S3) - 1.0) < 1e-9
    # retained samples stay clear of the collision guard
    scales = np.array([s.scale for s in traj.states])
    assert np.all(traj.min_sep > 1e-8 * scales)
    # the field ascends the potential
    assert np.all(np.diff(traj.potential) > -1e-9 * traj.potential[:-1])
    # theta and potential columns agree with recomputation from states
    k = len(traj) // 2
    assert traj.theta[k] == pytest.approx(collinearity_angle(traj.states[k]))
    assert traj.potential[k] == pytest.approx(potential(traj.states[k]), rel=1e-13)


def test_axis_line_is_flow_invariant():
    # non-balanced spacings on axis 1: the state moves, but stays on the axis
    q = np.zeros((3, 3))
    q[:, 0] = (-1.1, 0.25, 0.85)
    traj = integrate_flow(Configuration(q, M3), S3, 0.5)
    assert len(traj) > 3
    for state in traj.states:
        assert np.max(np.abs(state.q[:, 1:])) <= 1e-10


def test_reflection_equivariance():
    seed = tilted_line_seed(25.0, 0.9)
    flip = np.array([1.0, 1.0, -1.0])
    mirrored = Configuration(seed.q * flip[None, :], seed.masses)
    a = integrate_flow(seed, S3, 5.0)
    b = integrate_flow(mirrored, S3, 5.0)
    assert len(a) == len(b)
    assert np.allclose(a.times, b.times, rtol=0, atol=1e-12)
    for sa, sb in zip(a.states, b.states):
        assert np.max(np.abs(sa.q * flip[None, :] - sb.q)) < 1e-9


def test_theta_stop_terminates_at_target():
    traj = integrate_flow(tilted_line_seed(20.0, 0.0), S3, 100.0, theta_stop=0.1)
    assert traj.stop_reason == "theta_target"
    assert traj.theta[-1] < 0.1
    assert traj.theta[-2] >= 0.1


def test_collision_stop_keeps_last_safe_state():
    # a pinched pair rams together under the ascent field
    q = np.array([[-0.5, 0.02, 0.0], [-0.44, -0.02, 0.01], [0.9, 0.0, -0.01]])
    traj = integrate_flow(Configuration(q, M3), S3, 50.0)
    assert traj.stop_reason == "collision"
    scales = np.array([s.scale for s in traj.states])
    assert np.all(traj.min_sep > 1e-8 * scales)
    assert np.all(np.isfinite(traj.states[-1].q))


def test_step_budget_exhaustion_raises():
    with pytest.raises(NoConvergence):
        integrate_flow(tilted_line_seed(30.0, 0.0), S3, 1000.0, max_steps=5)


def test_rejects_bad_arguments():
    with pytest.raises(ValueError):
        integrate_flow(tilted_line_seed(30.0, 0.0), S3, 0.0)
    with pytest.raises(ValueError):
        integrate_flow(tilted_line_seed(30.0, 0.0), Spectrum((2.0, 1.0)), 1.0)


# ---------------------------------------------------------------------------
# tilted-line seeds and the 45-degree batch


def test_tilted_line_seed_geometry():
    for theta in (1.0, 30.0, 45.0, 80.0):
        seed = tilted_line_seed(theta, 1.3)
        assert collinearity_angle(seed) == pytest.approx(theta, abs=1e-9)
        # reflection-symmetric line through the origin
        assert np.allclose(seed.q[1], 0.0)
        assert np.allclose(seed.q[0], -seed.q[2])
    with pytest.raises(ValueError):
        tilted_line_seed(0.0)
    with pytest.raises(ValueError):
        tilted_line_seed(90.0)


def test_line_angle_decays_at_predicted_rate():
    # within the symmetric family: d/dt log tan(theta) = -(5/4)(1 - 1/s)/|q1|^3
    seed = tilted_line_seed(30.0, 0.4)
    traj = integrate_flow(seed, S3, 0.02)
    r = np.linalg.norm(traj.states[0].q[0])
    predicted = -(5.0 / 4.0) * (1.0 - 0.5) / r**3
    log_tan = np.log(np.tan(np.radians(traj.theta)))
    measured = (log_tan[-1] - log_tan[0]) / (traj.times[-1] - traj.times[0])
    assert measured == pytest.approx(predicted, rel=5e-2)


def test_45_batch_monotone_to_attractor():
    rng = np.random.default_rng(11)
    seeds = [tilted_line_seed(45.0, 0.0)]
    seeds += [tilted_line_seed(rng.uniform(0.5, 45.0), rng.uniform(0, 2 * math.pi))
              for _ in range(24)]
    report = lyapunov_45_check(seeds, S3, masses=M3)
    assert report.checked == 25
    assert report.all_monotone
    assert report.reached_attractor == 25
    assert report.collisions == 0
    for out in report.outcomes:
        assert out.status == "checked"
        assert out.stop_reason == "theta_target"
        assert out.theta_end < 0.1
        assert out.worst_increase < 1e-9


def test_min_angle_can_rise_when_another_pair_leaves_the_cone():
    # Regression for a measured property of the ascent field: the minimal
    # pair angle is NOT monotone when some other pair starts far outside
    # the 45-degree cone (independently confirmed against scipy's RK45 at
    # tolerance 1e-12).  The checker must flag this rather than hide it.
    base = moulton_solve(M3, (1, 2, 3), 1, S3).config
    q = base.q.copy()
    q[:, 1:] += 0.2 * np.random.default_rng(4).standard_normal((3, 2))
    seed = steer_to_angle(Configuration(q, M3), 20.0)
    traj = integrate_flow(seed, S3, 200.0, theta_stop=0.1)
    rises = np.diff(traj.theta)
    assert rises.max() > 0.1  # macroscopic, far beyond integrator noise
    report = lyapunov_45_check([seed], S3)
    (out,) = report.outcomes
    assert out.status == "checked"
    assert out.monotone is False
    assert not report.all_monotone


def test_check_flags_collinear_and_rejected_seeds():
    axis = _config([[-1, 0, 0], [0, 0, 0], [1, 0, 0]])
    steep = tilted_line_seed(60.0, 0.0)
    good = tilted_line_seed(10.0, 0.0)
    report = lyapunov_45_check([axis, steep, good], S3)
    statuses = [o.status for o in report.outcomes]
    assert statuses == ["already_collinear", "rejected", "checked"]
    assert report.checked == 1
    assert report.reached_attractor == 1


def test_check_validates_masses():
    with pytest.raises(ValueError):
        lyapunov_45_check([tilted_line_seed(10.0, 0.0)], S3, masses=np.ones(3) * 2)
