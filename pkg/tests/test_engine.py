import math
import warnings

import numpy as np
import pytest

from event_eso import (
    BelowRStarWarning,
    DisturbanceSpec,
    InputKind,
    InvalidArgument,
    LinearDesign,
    NoiseConfig,
    NumericOverflow,
    PlantConfig,
    SimConfig,
    compare_observers,
    run_ensemble,
    scaled_errors,
    simulate_path,
    simulate_path_reference,
    sweep_r,
)
from event_eso.engine import fit_loglog_slopes

QUIET = NoiseConfig(amplitude=0.0, alpha1=2.0, alpha2=2.0)


def lin(r, a=(3.0, 3.0, 1.0)):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BelowRStarWarning)
        return LinearDesign(a, r=r)


def zero_plant(n=2):
    return PlantConfig(n, (0.0,) * n)


def noiseless_sec4():
    """Deterministic sub-case: bounded noise amplitude and OU coefficient set to zero."""
    b = (2.0, 2.0, 1.5, 1.5, 1.5, 0.0, 2.5, 2.5, 0.0)
    return PlantConfig(2, (1.0, -1.0), DisturbanceSpec.section_iv(b), InputKind.COS, 2.5)


class TestGrid:
    def test_default_step(self, sec4_linear):
        h, steps = SimConfig(t_end=20.0).grid(sec4_linear)
        assert h <= sec4_linear.dwell / 20
        assert steps * h == pytest.approx(20.0, rel=1e-14)

    def test_step_too_coarse(self, sec4_linear):
        with pytest.raises(InvalidArgument, match="dwell/10"):
            SimConfig(h=sec4_linear.dwell / 5).grid(sec4_linear)

    def test_combined_grid(self, sec4_linear, sec4_nonlinear):
        h, _ = SimConfig().grid(sec4_linear, sec4_nonlinear)
        assert h <= sec4_nonlinear.dwell / 20

    @pytest.mark.parametrize("kw", [dict(t_end=0.0), dict(h=-1.0), dict(paths=0), dict(record_stride=0), dict(t_transient=30.0)])
    def test_invalid(self, kw):
        with pytest.raises(InvalidArgument):
            SimConfig(**kw)


class TestSimulatePath:
    @pytest.mark.parametrize("kind", ["linear", "nonlinear"])
    def test_zero_configuration(self, kind, sec4_linear, sec4_nonlinear):
        d = sec4_linear if kind == "linear" else sec4_nonlinear
        tr = simulate_path(zero_plant(), QUIET, d, SimConfig(t_end=0.5))
        assert np.all(tr.errors == 0.0)
        assert np.all(tr.eta == 0.0)
        assert tr.trigger_count == 1
        assert np.all(tr.tail_sup == 0.0)

    @pytest.mark.parametrize("kind", ["linear", "nonlinear"])
    def test_kernel_matches_reference(self, kind, sec4_plant, sec4_noise, sec4_linear, sec4_nonlinear):
        d = sec4_linear if kind == "linear" else sec4_nonlinear
        sim = SimConfig(t_end=0.3, t_transient=0.1, master_seed=4)
        k = simulate_path(sec4_plant, sec4_noise, d, sim, path_index=2, backend="kernel")
        p = simulate_path_reference(sec4_plant, sec4_noise, d, sim, path_index=2)
        np.testing.assert_array_equal(k.trigger_times, p.trigger_times)
        np.testing.assert_array_equal(k.times, p.times)
        scale = np.abs(p.xhat).max()
        np.testing.assert_allclose(k.xhat, p.xhat, rtol=0, atol=1e-13 * scale)
        np.testing.assert_allclose(k.x, p.x, rtol=0, atol=1e-13)
        np.testing.assert_allclose(k.tail_mse, p.tail_mse, rtol=1e-10)
        np.testing.assert_array_equal(k.inter_event[1:], p.inter_event[1:])

    def test_custom_hooks_use_reference(self, sec4_linear):
        hooked = PlantConfig(
            2, (0.5, 1.0), DisturbanceSpec.custom(lambda t, x, v1, v2: 3.7),
            InputKind.CUSTOM, input_hook=lambda t: math.cos(2.5 * t),
        )
        builtin = PlantConfig(2, (0.5, 1.0), DisturbanceSpec.constant(3.7), InputKind.COS, 2.5)
        sim = SimConfig(t_end=0.1)
        a = simulate_path(hooked, QUIET, sec4_linear, sim)
        b = simulate_path(builtin, QUIET, sec4_linear, sim)
        assert a.trigger_count > 1
        np.testing.assert_array_equal(a.trigger_times, b.trigger_times)
        np.testing.assert_allclose(a.xhat, b.xhat, rtol=1e-12, atol=1e-12)
        with pytest.raises(InvalidArgument):
            simulate_path(hooked, QUIET, sec4_linear, sim, backend="kernel")

    def test_trajectory_layout(self, sec4_plant, sec4_noise, sec4_linear):
        tr = simulate_path(sec4_plant, sec4_noise, sec4_linear, SimConfig(t_end=0.5))
        m = tr.times.size
        assert tr.x.shape == (m, 2) and tr.x_ext.shape == (m,) and tr.xhat.shape == (m, 3) and tr.eta.shape == (m, 3)
        assert tr.times[0] == 0.0 and tr.times[-1] == pytest.approx(0.5)
        assert tr.trigger_times[0] == 0.0 and tr.trigger_held[0] == 1.0
        assert math.isnan(tr.inter_event[0])

    def test_triggers_on_grid_and_dwell(self, sec4_plant, sec4_noise, sec4_nonlinear):
        tr = simulate_path(sec4_plant, sec4_noise, sec4_nonlinear, SimConfig(t_end=1.0))
        k = tr.trigger_times / tr.h
        np.testing.assert_allclose(k, np.round(k), atol=1e-6)
        assert np.all(tr.inter_event[1:] >= tr.dwell)
        np.testing.assert_allclose(tr.inter_event[1:], np.diff(tr.trigger_times), atol=1e-12)

    def test_eta_transform(self, sec4_plant, sec4_noise, sec4_linear):
        tr = simulate_path(sec4_plant, sec4_noise, sec4_linear, SimConfig(t_end=0.2))
        r = sec4_linear.r
        full = np.column_stack([tr.x, tr.x_ext])
        for i in range(3):
            np.testing.assert_array_equal(tr.eta[:, i], r ** (2 - i) * (full[:, i] - tr.xhat[:, i]))
        np.testing.assert_array_equal(scaled_errors(tr.x, tr.x_ext, tr.xhat, r), tr.eta)

    def test_xhat_init(self, sec4_linear):
        tr = simulate_path(zero_plant(), QUIET, sec4_linear, SimConfig(t_end=0.01), xhat_init=(0.0, 0.0, 0.1))
        np.testing.assert_array_equal(tr.xhat[0], [0.0, 0.0, 0.1])
        with pytest.raises(InvalidArgument):
            simulate_path(zero_plant(), QUIET, sec4_linear, SimConfig(t_end=0.01), xhat_init=(0.0, 0.0))

    def test_order_mismatch(self, sec4_linear):
        with pytest.raises(InvalidArgument):
            simulate_path(zero_plant(3), QUIET, sec4_linear, SimConfig(t_end=0.01))

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_overflow_reports_time_and_path(self):
        unstable = PlantConfig(1, (1.0,), DisturbanceSpec.custom(lambda t, x, v1, v2: 1e200 * x[0] ** 3))
        d = lin(2.0, a=(2.0, 1.0))
        with pytest.raises(NumericOverflow) as info:
            simulate_path(unstable, QUIET, d, SimConfig(t_end=1.0), path_index=3)
        assert info.value.path_index == 3 and info.value.time is not None
        assert "path=3" in str(info.value)

    def test_sanity_flag(self):
        growing = PlantConfig(1, (1.0,), DisturbanceSpec.constant(50.0), sanity_bound=10.0)
        tr = simulate_path(growing, QUIET, lin(2.0, a=(2.0, 1.0)), SimConfig(t_end=1.0))
        assert tr.bound_exceeded

    @pytest.mark.parametrize("r", [15.0, 30.0, 60.0])
    def test_constant_disturbance_estimate(self, r):
        c = 3.7
        plant = PlantConfig(2, (0.0, 0.0), DisturbanceSpec.constant(c))
        tr = simulate_path(plant, QUIET, lin(r), SimConfig(t_end=4.0, t_transient=2.0))
        assert tr.tail_sup[2] <= c / r

    def test_constant_disturbance_improves_with_r(self):
        plant = PlantConfig(2, (0.0, 0.0), DisturbanceSpec.constant(3.7))
        sups = [simulate_path(plant, QUIET, lin(r), SimConfig(t_end=4.0, t_transient=2.0)).tail_sup[2] for r in (15.0, 30.0, 60.0)]
        assert sups[0] > sups[1] > sups[2]

    @pytest.mark.parametrize("kind", ["linear", "nonlinear"])
    def test_plant_euler_first_order(self, kind, sec4_linear, sec4_nonlinear):
        d = sec4_linear if kind == "linear" else sec4_nonlinear
        plant, sim = noiseless_sec4(), SimConfig(t_end=1.0)
        h0 = d.dwell / 10
        xs = [simulate_path(plant, QUIET, d, sim, h=h0 / 2**k).x[-1] for k in range(3)]
        ratio = np.linalg.norm(xs[0] - xs[1]) / np.linalg.norm(xs[1] - xs[2])
        assert 1.9 <= ratio <= 2.1


class TestEnsemble:
    def test_degenerate_pair(self, sec4_plant, sec4_noise, sec4_linear):
        sim = SimConfig(t_end=0.2)
        ens = run_ensemble(sec4_plant, sec4_noise, sec4_linear, sim, path_indices=[0, 0], keep_trajectories=True)
        tr = ens.trajectories[0]
        np.testing.assert_array_equal(ens.mse, tr.errors**2)
        np.testing.assert_array_equal(ens.ci_halfwidth, 0.0)

    def test_zero_noise_ci(self, sec4_linear):
        plant = noiseless_sec4()
        ens = run_ensemble(plant, QUIET, sec4_linear, SimConfig(t_end=0.2), paths=3)
        np.testing.assert_array_equal(ens.ci_halfwidth, 0.0)
        assert np.all(ens.mse >= 0)

    def test_ci_formula(self, sec4_plant, sec4_noise, sec4_linear):
        ens = run_ensemble(sec4_plant, sec4_noise, sec4_linear, SimConfig(t_end=0.2), paths=4, keep_trajectories=True)
        sq = np.stack([t.errors**2 for t in ens.trajectories])
        np.testing.assert_allclose(ens.mse, sq.mean(axis=0))
        np.testing.assert_allclose(ens.ci_halfwidth, 1.96 * sq.std(axis=0, ddof=1) / 2.0)

    def test_statistics(self, sec4_plant, sec4_noise, sec4_nonlinear):
        ens = run_ensemble(sec4_plant, sec4_noise, sec4_nonlinear, SimConfig(t_end=0.5), paths=3)
        assert ens.path_indices == (0, 1, 2)
        assert np.all(ens.trigger_counts >= 1)
        assert ens.min_inter_event >= ens.dwell
        assert ens.inter_event_edges[0] == ens.dwell
        assert ens.inter_event_counts.sum() == ens.trigger_counts.sum() - 3

    def test_worker_independence(self, sec4_plant, sec4_noise, sec4_linear):
        sim = SimConfig(t_end=0.3, master_seed=8)
        one = run_ensemble(sec4_plant, sec4_noise, sec4_linear, sim, paths=4, workers=1)
        many = run_ensemble(sec4_plant, sec4_noise, sec4_linear, sim, paths=4, workers=4)
        np.testing.assert_array_equal(one.mse, many.mse)
        np.testing.assert_array_equal(one.sup_err, many.sup_err)
        np.testing.assert_array_equal(one.trigger_counts, many.trigger_counts)

    def test_too_few_paths(self, sec4_plant, sec4_noise, sec4_linear):
        with pytest.raises(InvalidArgument):
            run_ensemble(sec4_plant, sec4_noise, sec4_linear, SimConfig(t_end=0.1), paths=1)


class TestSweep:
    def test_zero_config_slopes_undefined(self, sec4_linear):
        sw = sweep_r(zero_plant(), QUIET, sec4_linear, SimConfig(t_end=0.1), [8.0, 12.0, 16.0], paths=2)
        assert np.all(sw.tail_mse == 0.0)
        assert np.all(np.isnan(sw.slopes)) and not sw.slope_defined.any()
        np.testing.assert_array_equal(sw.predicted_exponents, [5, 3, 1])
        assert sw.min_inter_event_ok

    def test_needs_three(self, sec4_linear):
        with pytest.raises(InvalidArgument):
            sweep_r(zero_plant(), QUIET, sec4_linear, SimConfig(t_end=0.1), [8.0, 12.0], paths=2)

    def test_ascending(self, sec4_linear):
        with pytest.raises(InvalidArgument):
            sweep_r(zero_plant(), QUIET, sec4_linear, SimConfig(t_end=0.1), [8.0, 16.0, 12.0], paths=2)

    def test_slope_fit(self):
        r = np.array([8.0, 12.0, 16.0, 24.0])
        mse = np.column_stack([3.0 * r**-5, 0.5 * r**-1, np.zeros(4)])
        slopes, ok = fit_loglog_slopes(r, mse)
        np.testing.assert_allclose(slopes[:2], [-5.0, -1.0])
        assert math.isnan(slopes[2]) and list(ok) == [True, True, False]


class TestCompare:
    def test_identical_designs(self, sec4_plant, sec4_noise, sec4_linear):
        rep = compare_observers(sec4_plant, sec4_noise, sec4_linear, sec4_linear, SimConfig(t_end=0.3), paths=3)
        np.testing.assert_array_equal(rep.triggers_a, rep.triggers_b)
        np.testing.assert_array_equal(rep.sup_err_a, rep.sup_err_b)
        assert rep.fraction_ties == 1.0 and rep.fraction_b_better == 0.0

    def test_zero_configuration_ties(self, sec4_linear, sec4_nonlinear):
        rep = compare_observers(zero_plant(), QUIET, sec4_linear, sec4_nonlinear, SimConfig(t_end=0.2), paths=2)
        assert np.all(rep.sup_err_a == 0.0) and np.all(rep.sup_err_b == 0.0)
        assert rep.fraction_ties == 1.0

    def test_common_step(self, sec4_plant, sec4_noise, sec4_linear, sec4_nonlinear):
        rep = compare_observers(sec4_plant, sec4_noise, sec4_linear, sec4_nonlinear, SimConfig(t_end=0.3), paths=2)
        assert rep.h == SimConfig(t_end=0.3).grid(sec4_linear, sec4_nonlinear)[0]
        assert np.all(rep.triggers_b > rep.triggers_a)
        assert rep.min_inter_event_a >= rep.dwell_a and rep.min_inter_event_b >= rep.dwell_b

    def test_mismatch(self, sec4_linear, sec4_nonlinear):
        with pytest.raises(InvalidArgument):
            compare_observers(zero_plant(), QUIET, lin(12.0), sec4_nonlinear, SimConfig(t_end=0.1), paths=2)
        with pytest.raises(InvalidArgument):
            compare_observers(zero_plant(), QUIET, lin(15.0, a=(2.0, 1.0)), sec4_nonlinear, SimConfig(t_end=0.1), paths=2)
