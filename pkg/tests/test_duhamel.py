"""Fixed-point solves of the forced problem in both representations."""

import math

import numpy as np
import pytest

from fracwave import (
    CauchyProblem,
    DivergenceError,
    EpsilonSchedule,
    MlParams,
    ResolutionError,
    SingularOrderError,
    SizeError,
    SolutionOperatorEvaluator,
    SolverOptions,
    TimeMesh,
    cubic_saturating,
    gronwall_stability_probe,
    mittag_leffler,
    moderateness_scan,
    multiplier_action,
    nonlinearity_from_callable,
    scaled_sine,
    second_derivative_identity_check,
    solve_kernel_form,
    solve_rl_form,
    zero_nonlinearity,
)

ALPHA, C, Q = 1.5, 0.5, 1.0
OP = multiplier_action(np.array([C]))


def _ml(beta, z):
    return complex(mittag_leffler(MlParams(ALPHA, beta), z))


def _problem(mesh, **kw):
    return CauchyProblem(ALPHA, OP, kw.pop("f", zero_nonlinearity()), np.array([Q]), mesh, **kw)


def test_homogeneous_solve_reduces_to_propagator():
    mesh = TimeMesh(1.0, 128)
    report = solve_kernel_form(_problem(mesh))
    ev = SolutionOperatorEvaluator(ALPHA, OP)
    ref = ev.trajectory(mesh.nodes, np.array([Q]))
    # with nothing to iterate on, the fixed point is the bare series
    assert np.max(np.abs(report.trajectory - ref)) == 0.0
    assert report.converged and report.iterations == 1


def test_initial_velocity_closed_form():
    mesh = TimeMesh(1.0, 256)
    u1 = 0.7
    report = solve_kernel_form(_problem(mesh, initial_velocity=np.array([u1])))
    t = mesh.nodes
    exact = np.array([_ml(1.0, C * s**ALPHA) * Q + s * _ml(2.0, C * s**ALPHA) * u1 for s in t])
    assert np.max(np.abs(report.trajectory[:, 0] - exact)) <= 1e-10


def test_constant_forcing_closed_form_both_routes():
    mesh = TimeMesh(1.0, 256)
    P = 0.3
    forcing = np.full((mesh.n_nodes, 1), P)
    p = _problem(mesh, forcing=forcing)
    t = mesh.nodes
    exact = np.array(
        [_ml(1.0, C * s**ALPHA) * Q + P * s**ALPHA * _ml(ALPHA + 1.0, C * s**ALPHA) for s in t]
    )
    rep_k = solve_kernel_form(p)
    rep_rl = solve_rl_form(p)
    assert np.max(np.abs(rep_k.trajectory[:, 0] - exact)) <= 1e-6
    assert np.max(np.abs(rep_rl.trajectory[:, 0] - exact)) <= 1e-6
    assert rep_k.form == "kernel" and rep_rl.form == "rl"


def test_caputo_variant_fallback_at_nonzero_start():
    # F(0) != 0 puts the two derivatives a constant apart; the solver
    # handles that by exact subtraction and flags the reduction
    mesh = TimeMesh(1.0, 128)
    p = _problem(mesh, forcing=np.full((mesh.n_nodes, 1), 0.3))
    rep_rl = solve_rl_form(p)
    rep_cap = solve_rl_form(p, derivative="caputo")
    assert rep_cap.metadata["caputo_fallback_to_rl"] is True
    assert rep_cap.metadata["derivative_variant"] == "rl"
    assert np.array_equal(rep_cap.trajectory, rep_rl.trajectory)


def test_caputo_variant_direct_at_vanishing_start():
    mesh = TimeMesh(1.0, 128)
    ramp = 0.4 * mesh.nodes**2
    p = _problem(mesh, forcing=ramp[:, None])
    rep = solve_rl_form(p, derivative="caputo")
    assert rep.metadata["derivative_variant"] == "caputo"
    assert rep.metadata["caputo_fallback_to_rl"] is False
    assert rep.metadata["initial_forcing_norm"] == 0.0
    assert np.all(np.isfinite(rep.trajectory))


def test_windowed_iteration_matches_single_window():
    mesh = TimeMesh(1.0, 128)
    p = _problem(mesh, f=nonlinearity_from_callable(lambda v: 0.1 * np.sin(v), "0.1*sin(u)"))
    r1 = solve_kernel_form(p)
    r4 = solve_kernel_form(p, SolverOptions(n_windows=4))
    assert r1.converged and r4.converged
    assert np.max(np.abs(r1.trajectory - r4.trajectory)) <= 1e-12


def test_divergence_detection():
    f = nonlinearity_from_callable(lambda v: v**3, "u^3")
    p = CauchyProblem(ALPHA, multiplier_action(np.array([1.0])), f, np.array([3.0]), TimeMesh(2.0, 64))
    with pytest.raises(DivergenceError):
        solve_kernel_form(p)


def test_zero_data_stays_zero():
    mesh = TimeMesh(1.0, 64)
    p = CauchyProblem(ALPHA, OP, zero_nonlinearity(), np.array([0.0]), mesh)
    report = solve_kernel_form(p)
    assert not np.any(report.trajectory)
    assert report.iterations == 1


def test_nonlinearity_contracts():
    with pytest.raises(ValueError):
        nonlinearity_from_callable(lambda v: v + 1.0, "u+1")  # f(0) != 0
    f = scaled_sine(0.1)
    flags = f.hypothesis_flags()
    assert flags["zero_at_origin"] is True
    assert flags["derivative_vanishes_at_zero"] is False
    assert abs(flags["fprime_at_zero"] - 0.1) <= 1e-6
    g = cubic_saturating(0.2)
    # a*u/(1+u^2) has slope a at the origin, and saturates away from it
    gflags = g.hypothesis_flags()
    assert gflags["derivative_vanishes_at_zero"] is False
    assert abs(gflags["fprime_at_zero"] - 0.2) <= 1e-6
    assert gflags["sampled_lipschitz"] <= 0.2 + 1e-6
    assert zero_nonlinearity().is_zero
    assert not f.is_zero


def test_problem_validation():
    mesh = TimeMesh(1.0, 64)
    with pytest.raises(SingularOrderError):
        CauchyProblem(0.9, OP, zero_nonlinearity(), np.array([Q]), mesh)
    with pytest.raises(SizeError):
        CauchyProblem(ALPHA, OP, zero_nonlinearity(), np.array([Q]), mesh,
                      initial_velocity=np.zeros(2))
    with pytest.raises(SizeError):
        CauchyProblem(ALPHA, OP, zero_nonlinearity(), np.array([Q]), mesh,
                      forcing=np.zeros((3, 1)))
    with pytest.raises(ValueError):
        SolverOptions(tol=2.0)
    with pytest.raises(ValueError):
        SolverOptions(divergence_patience=1)


def test_identity_defect_refines():
    P = 0.3
    devs = []
    for n in (128, 256):
        mesh = TimeMesh(1.0, n)
        p = _problem(mesh, forcing=np.full((mesh.n_nodes, 1), P))
        devs.append(second_derivative_identity_check(solve_kernel_form(p), p))
    assert devs[1] < devs[0]


def test_gronwall_probe():
    mesh = TimeMesh(1.0, 128)
    p = _problem(mesh)
    rep = gronwall_stability_probe(p, np.array([0.0]))
    assert rep.perturbation_norm == 0.0
    assert np.all(np.isnan(rep.k_values))
    rep2 = gronwall_stability_probe(p, np.array([0.1]))
    assert np.all(np.isfinite(rep2.k_values))
    # a linear problem responds linearly: K must not move across scales
    spread = np.max(rep2.k_values) - np.min(rep2.k_values)
    assert spread <= 1e-8 * np.max(rep2.k_values)


def test_moderateness_scan_flat_family():
    sched = EpsilonSchedule(alpha=ALPHA, k_min=4, k_max=8)
    build = lambda eps: _problem(TimeMesh(0.5, 32))
    report = moderateness_scan(build, sched)
    assert report.statuses == ["ok"] * 5
    assert abs(report.fitted_n) <= 1e-10
    assert all(abs(v) <= 1e-10 for v in report.exponents.values())
    assert report.all_finite


def test_moderateness_scan_flags_failed_rungs():
    sched = EpsilonSchedule(alpha=ALPHA, k_min=4, k_max=6)

    def build(eps):
        if eps < 2.0**-5:
            raise ResolutionError("kernel too sharp for this grid")
        return _problem(TimeMesh(0.5, 32))

    report = moderateness_scan(build, sched)
    assert report.statuses[:2] == ["ok", "ok"]
    assert report.statuses[2].startswith("failed:")
    assert np.isfinite(report.fitted_n)
