"""Time stepping and Picard iteration.

The exponential-Euler step applies the exact linear propagator, so linear
problems are solved exactly up to roundoff regardless of dt; that gives sharp
reference tests.  A spatially constant state turns the PDE into the scalar
ODE u' = u^p with known blow-up time, which pins the detector."""

import math

import numpy as np
import pytest

from fujitalab.field import BoxGeometry, GridField, lq_norm, sample
from fujitalab.problem import ProblemSpec, ProfileSpec
from fujitalab.semigroup import HeatKernelPlan, apply
from fujitalab.solver import (
    IterationLimitError,
    NonContractionError,
    SolverConfig,
    Verdict,
    forcing_increment,
    picard_solve,
    run,
    run_from_fields,
    step,
    uniqueness_probe,
)

ZERO = ProfileSpec.zero()


def _const_field(value, M=16):
    return GridField(1, 8.0, np.full(M, float(value)))


def test_ode_blowup_time():
    # constant state, alpha=0, w=0, p=2: u(t) = 1/(1-t), T* = 1
    spec = ProblemSpec(1, 2.0, 2.0, 0.0, 0.0, ZERO, ZERO)
    cfg = SolverConfig(dt0=1e-3, t_end=2.0, blowup_threshold=1e8)
    u0 = _const_field(1.0)
    rec = run_from_fields(spec, u0, None, cfg, HeatKernelPlan.for_field(u0))
    assert rec.verdict is Verdict.BLOWUP_DETECTED
    assert rec.blowup_time_estimate == pytest.approx(1.0, abs=0.05)
    # extrapolated T* sits at (or within roundoff of) the last reached time
    assert rec.blowup_time_estimate >= rec.times[-1] - 1e-6


def test_ode_p3_blowup_time():
    # u' = u^3 from u=1 blows up at T* = 1/2
    spec = ProblemSpec(1, 3.0, 2.0, 0.0, 0.0, ZERO, ZERO)
    cfg = SolverConfig(dt0=1e-3, t_end=2.0, blowup_threshold=1e8)
    u0 = _const_field(1.0)
    rec = run_from_fields(spec, u0, None, cfg, HeatKernelPlan.for_field(u0))
    assert rec.verdict is Verdict.BLOWUP_DETECTED
    assert rec.blowup_time_estimate == pytest.approx(0.5, abs=0.03)


def test_linear_flow_is_exact_per_step():
    spec = ProblemSpec(1, 2.0, 2.0, 0.0, 0.0, ZERO, ZERO)
    u0 = sample(ProfileSpec.gaussian(0.5, 1.0, (0.0,)), 1, 16.0, 128)
    plan = HeatKernelPlan.for_field(u0)
    cfg = SolverConfig(dt0=0.25, t_end=3.0, disable_nonlinearity=True)
    rec = run_from_fields(spec, u0, None, cfg, plan)
    assert rec.verdict is Verdict.COMPLETED
    # the recorded q-norm at the end equals the directly propagated one
    direct = apply(plan, u0, 3.0)
    assert rec.q_norms[-1] == pytest.approx(lq_norm(direct, 2.0), rel=1e-12)
    # and a coarser dt gives the same answer: the linear part is exact
    rec2 = run_from_fields(
        spec, u0, None, SolverConfig(dt0=1.0, t_end=3.0, disable_nonlinearity=True), plan
    )
    assert rec2.q_norms[-1] == pytest.approx(rec.q_norms[-1], rel=1e-12)


def test_single_step_linear_matches_apply():
    spec = ProblemSpec(1, 2.0, 2.0, 0.0, 0.0, ZERO, ZERO)
    u0 = sample(ProfileSpec.gaussian(0.5, 1.0, (0.0,)), 1, 16.0, 128)
    plan = HeatKernelPlan.for_field(u0)
    out = step(spec, u0, 0.0, 0.125, plan, None, disable_nonlinearity=True)
    ref = apply(plan, u0, 0.125)
    assert np.allclose(out.values, ref.values, atol=1e-14)


def test_forcing_increment_constant_w_exact_weights():
    # with the heat flow frozen the increment must be w times the exact
    # integral of tau^rho over the step
    w = _const_field(1.0)
    for rho in (0.0, -0.5, 0.7):
        for t_n, dt in ((0.0, 0.1), (0.35, 0.1), (7.0, 0.01)):
            inc = forcing_increment(None, w, t_n, dt, rho)
            t1 = t_n + dt
            exact = (t1 ** (rho + 1) - t_n ** (rho + 1)) / (rho + 1)
            assert inc.values[0] == pytest.approx(exact, rel=1e-12)
    with pytest.raises(ValueError):
        forcing_increment(None, w, 0.0, -0.1, 0.0)
    with pytest.raises(ValueError):
        forcing_increment(None, w, 0.0, 0.1, -1.0)


def test_forcing_increment_constant_w_through_semigroup():
    # the semigroup fixes constants, so the exact weights survive a real plan
    w = _const_field(2.0, M=32)
    plan = HeatKernelPlan.for_field(w)
    inc = forcing_increment(plan, w, 0.2, 0.05, -0.5)
    exact = 2.0 * (0.25**0.5 - 0.2**0.5) / 0.5
    assert np.allclose(inc.values, exact, rtol=1e-12)


def test_forced_linear_run_matches_closed_form():
    # pure heat + constant-in-space forcing, rho = 0: u(t) = u0 + t * w0
    spec = ProblemSpec(1, 2.0, 2.0, 0.0, 0.0, ZERO, ZERO)
    u0 = _const_field(0.3, M=32)
    w = _const_field(0.1, M=32)
    cfg = SolverConfig(dt0=0.05, t_end=2.0, disable_nonlinearity=True)
    rec = run_from_fields(spec, u0, w, cfg, HeatKernelPlan.for_field(u0))
    assert rec.sup_norms[-1] == pytest.approx(0.3 + 2.0 * 0.1, rel=1e-12)


def test_run_builds_geometry_and_metadata():
    spec = ProblemSpec(
        1, 2.0, 2.0, 0.0, 0.0, ProfileSpec.gaussian(0.2, 1.0, (0.0,)), ZERO
    )
    rec = run(spec, SolverConfig(dt0=0.1, t_end=0.5), BoxGeometry(12.0, 64))
    assert rec.verdict is Verdict.COMPLETED
    assert rec.metadata["half_width"] == 12.0
    assert rec.metadata["points_per_axis"] == 64
    assert rec.metadata["spec_hash"] == spec.spec_hash()
    assert rec.times[0] == 0.0 and rec.times[-1] == pytest.approx(0.5)
    assert len(rec.times) == len(rec.q_norms) == len(rec.sup_norms)
    # dt_history is aligned with times: entry k is the step that reached times[k]
    assert len(rec.dt_history) == len(rec.times)
    assert rec.dt_history[0] == 0.0


def test_adaptive_steps_shrink_toward_blowup():
    spec = ProblemSpec(1, 2.0, 2.0, 0.0, 0.0, ZERO, ZERO)
    cfg = SolverConfig(dt0=0.01, t_end=2.0, blowup_threshold=1e8)
    u0 = _const_field(1.0)
    rec = run_from_fields(spec, u0, None, cfg, HeatKernelPlan.for_field(u0))
    assert rec.verdict is Verdict.BLOWUP_DETECTED
    assert rec.dt_history[-1] < 0.01 / 64  # refined hard near the singularity
    # sup norms reached the threshold
    assert rec.sup_norms[-1] >= 1e8


def test_picard_linear_agrees_with_stepper():
    spec = ProblemSpec(1, 2.0, 2.0, 0.0, 0.0, ZERO, ZERO)
    u0 = sample(ProfileSpec.gaussian(0.5, 1.0, (0.0,)), 1, 16.0, 128)
    w = sample(ProfileSpec.gaussian(0.3, 2.0, (0.0,)), 1, 16.0, 128)
    plan = HeatKernelPlan.for_field(u0)
    cfg = SolverConfig(dt0=0.0125, t_end=0.1, picard_nodes=8,
                       disable_nonlinearity=True)
    pic = picard_solve(spec, u0, w, 0.1, cfg, plan)
    rec = run_from_fields(spec, u0, w, cfg, plan)
    # both routes are exact on the linear problem: agreement to roundoff
    stepper_final_sup = rec.sup_norms[-1]
    assert lq_norm(pic.terminal, math.inf) == pytest.approx(
        stepper_final_sup, rel=1e-12
    )
    assert pic.iterations < cfg.picard_max_iters


def test_picard_contracts_on_small_data():
    spec = ProblemSpec(1, 2.0, 2.0, 1.0, 0.0,
                       ProfileSpec.gaussian(0.05, 1.0, (0.0,)), ZERO)
    u0 = sample(spec.u0, 1, 16.0, 64)
    pic = picard_solve(spec, u0, None, 0.1, SolverConfig(picard_nodes=16))
    assert pic.contraction_estimate < 0.5
    assert pic.differences[-1] < 1e-10
    # successive differences decay monotonically once contraction kicks in
    assert all(b <= a for a, b in zip(pic.differences, pic.differences[1:]))


def test_picard_rejects_large_data():
    # far outside the contraction ball the sweep map expands and says so
    spec = ProblemSpec(1, 2.0, 2.0, 0.0, 0.0,
                       ProfileSpec.gaussian(50.0, 1.0, (0.0,)), ZERO)
    u0 = sample(spec.u0, 1, 16.0, 64)
    with pytest.raises((NonContractionError, IterationLimitError)):
        picard_solve(spec, u0, None, 1.0, SolverConfig(picard_nodes=16))


def test_picard_requires_lwp_hypotheses():
    # alpha in (0,1) is outside the fixed-point argument
    spec = ProblemSpec(1, 2.0, 2.0, 0.5, 0.0,
                       ProfileSpec.gaussian(0.05, 1.0, (0.0,)), ZERO)
    u0 = sample(spec.u0, 1, 16.0, 64)
    with pytest.raises(ValueError):
        picard_solve(spec, u0, None, 0.1)


def test_uniqueness_probe_refinement_ratio():
    spec = ProblemSpec(1, 2.0, 2.0, 1.0, 0.0,
                       ProfileSpec.gaussian(0.05, 1.0, (0.0,)), ZERO)
    rep = uniqueness_probe(spec, T=0.1)
    assert rep.passed
    assert len(rep.ratios) == 2
    assert all(r >= 1.8 for r in rep.ratios)
    # discrepancies actually decrease through the levels
    d = [lvl["discrepancy"] for lvl in rep.details["levels"]]
    assert d[0] > d[1] > d[2]
