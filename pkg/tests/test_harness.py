"""Run driver, reference handling and error metrics."""
import os

import numpy as np
import numpy.testing as npt
import pytest

from solverlab.cases import CASES, CaseSpec, get_case, momentum_plateaus
from solverlab.errors import RiemannError, UsageError
from solverlab.grid import BoundaryCondition, GridSpec
from solverlab.harness import (
    SolverRun,
    build_model,
    convergence_order,
    entropy_budget,
    exact_pure_shock_average,
    l1_error,
    level_crossing,
    order_study,
    overshoot_metric,
    reference_fine_grid,
    restrict_field,
    run_case,
    transition_width,
)
from solverlab.models import BurgersModel, IdealGasModel, IsothermalModel
from solverlab.riemann import GasState, IsoState, iso_star


class TestBuildModel:
    def test_kinds(self):
        assert isinstance(build_model("burgers"), BurgersModel)
        assert isinstance(build_model("isothermal", c_sound=0.5),
                          IsothermalModel)
        gas = build_model("gas")
        assert isinstance(gas, IdealGasModel) and gas.gamma == 1.4
        assert build_model("gas", gamma=1.6).gamma == 1.6

    def test_isothermal_needs_a_sound_speed(self):
        with pytest.raises(UsageError, match="sound speed"):
            build_model("isothermal")

    def test_unknown_kind(self):
        with pytest.raises(UsageError, match="unknown model"):
            build_model("plasma")


class TestMetrics:
    def test_l1_error_oracle(self):
        assert l1_error(np.array([1.0, 2.0]), np.array([0.0, 0.0]), 0.5) == 1.5
        stacked = l1_error(np.array([[1.0, 2.0], [0.0, 1.0]]),
                           np.zeros((2, 2)), 0.5)
        npt.assert_allclose(stacked, [1.5, 0.5])
        with pytest.raises(UsageError, match="shapes"):
            l1_error(np.zeros(3), np.zeros(4), 0.1)

    def test_convergence_order_recovers_the_exponent(self):
        res = [50, 100, 200, 400]
        errs = [(1.0 / n) ** 2 for n in res]
        npt.assert_allclose(convergence_order(res, errs), 2.0, rtol=1e-12)

    def test_convergence_order_edge_cases(self):
        assert convergence_order([50, 100, 200], [1e-3, 1e-4, 0.0]) is None
        with pytest.raises(UsageError, match="at least 3"):
            convergence_order([50, 100], [1.0, 0.5])
        with pytest.raises(UsageError, match="non-negative"):
            convergence_order([50, 100, 200], [1.0, -0.5, 0.2])

    def test_overshoot_metric(self):
        q = np.array([1.0, 2.0, 3.0])
        assert overshoot_metric(q, 1.0, 3.0) == 0.0
        assert overshoot_metric(q, 1.5, 3.0) == 0.5
        npt.assert_allclose(overshoot_metric(np.array([0.5, 3.2]), 1.0, 3.0),
                            0.5 + 0.2)
        # intermediate plateaus widen the admissible band
        assert overshoot_metric(q, 1.5, 3.0, intermediates=(0.9,)) == 0.0

    def test_transition_width(self):
        v = np.array([1.0, 1.2, 2.5, 3.8, 4.0])
        assert transition_width(v, 1.0, 4.0) == 3
        assert transition_width(v, 4.0, 1.0) == 3  # order-insensitive
        assert transition_width(np.array([1.0, 4.0]), 1.0, 4.0) == 0

    def test_level_crossing(self):
        x = np.array([0.0, 1.0, 2.0, 3.0])
        v = np.array([4.0, 3.0, 1.0, 0.5])
        npt.assert_allclose(level_crossing(x, v, 2.0), 1.5)
        assert level_crossing(x, v, 10.0) is None

    def test_entropy_budget(self):
        model = BurgersModel()
        U = np.full((1, 8), 0.7)
        assert entropy_budget(U, U, 0.01, 0.1, model) == 0.0
        # dissipative steps lose entropy on a periodic shock profile
        from solverlab.baselines import lxf_step
        x = np.linspace(0.0, 1.0, 32, endpoint=False)
        U = np.sin(2 * np.pi * x)[None] + 1.2
        per = BoundaryCondition("periodic", "periodic")
        after = lxf_step(U, 0.4 * (1.0 / 32) / 4.4, 1.0 / 32, -2.2,
                         BurgersModel(), per)
        assert entropy_budget(U, after, 1.0, 1.0, model) <= 1e-14


class TestExactShockAverage:
    def test_scalar_oracle(self):
        grid = GridSpec(0.0, 1.0, 4)
        # shock of speed 2 sits at x = 0.375 at t: cell 1 averages 25/75
        out = exact_pure_shock_average(3.0, 1.0, 2.0, 0.125, 0.125, grid)
        npt.assert_allclose(out[0], [3.0, 0.5 * 3.0 + 0.5 * 1.0, 1.0, 1.0],
                            atol=1e-13)

    def test_rejects_non_jump_data(self):
        grid = GridSpec(0.0, 1.0, 4)
        with pytest.raises(RiemannError, match="jump conditions"):
            exact_pure_shock_average(3.0, 1.0, 0.7, 0.0, 0.1, grid)

    def test_iso_and_gas_states(self):
        grid = GridSpec(-1.0, 1.0, 10)
        left = IsoState(1.0, 0.1 + 0.5 * np.sqrt(20.0))
        right = IsoState(20.0, 0.1 + (left.u - 0.1) / 20.0)
        out = exact_pure_shock_average(left, right, 0.1, 0.0, 0.0, grid,
                                       c=0.5)
        assert out.shape == (2, 10)
        npt.assert_allclose(out[0, 0], 1.0, atol=1e-13)
        npt.assert_allclose(out[0, -1], 20.0, atol=1e-12)
        with pytest.raises(UsageError, match="gamma"):
            exact_pure_shock_average(GasState(1.0, 0.0, 1.0),
                                     GasState(1.0, 0.0, 1.0), 0.0,
                                     0.0, 0.0, grid)


class TestRestrict:
    def test_divisible_ratio(self):
        npt.assert_allclose(restrict_field(np.array([1.0, 2.0, 3.0, 4.0]), 2),
                            [[1.5, 3.5]])

    def test_general_ratio_preserves_block_integrals(self):
        out = restrict_field(np.array([1.0, 2.0, 3.0]), 2)
        npt.assert_allclose(out, [[4.0 / 3.0, 8.0 / 3.0]])

    def test_total_mass_is_preserved(self):
        rng = np.random.default_rng(7)
        fine = rng.uniform(0.5, 2.0, size=(2, 1000))
        out = restrict_field(fine, 137)
        npt.assert_allclose(out.mean(axis=1), fine.mean(axis=1), rtol=1e-13)

    def test_guards(self):
        with pytest.raises(UsageError, match="restrict"):
            restrict_field(np.ones(10), 20)
        with pytest.raises(UsageError, match="restrict"):
            restrict_field(np.ones(10), 0)


class TestRunCase:
    def test_burgers_pure_shock_is_exact(self):
        res = run_case("burgers-pure-shock")
        assert res.ok
        assert res.error["u"] <= 1e-10
        assert res.t == get_case("burgers-pure-shock").t_end

    def test_snapshots_and_diagnostics(self):
        res = run_case("burgers-pure-shock", tend=0.05, snapshots=(0.02,))
        assert set(res.snapshots) == {0.02, 0.05}
        d = res.diagnostics
        assert d["t"].size == d["dt"].size == d["accepted"].size
        assert d["t"].size > 0
        npt.assert_allclose(d["t"][-1], 0.05, rtol=1e-12)
        # final mesh offset stays a fraction of a cell
        assert abs(res.offset) < 1.0 / res.cells

    def test_positivity_abort_is_reported_not_raised(self):
        bad = CaseSpec(
            name="bad", model="gas", summary="negative pressure seed",
            x_min=0.0, x_max=1.0, t_end=1.0,
            bc=BoundaryCondition("transmissive", "transmissive"),
            cells=16, cfl=0.4, scheme="rec", mesh="alternate",
            reference="none", gamma=1.4,
            init=lambda grid: np.stack([np.ones(grid.n_cells),
                                        np.zeros(grid.n_cells),
                                        np.full(grid.n_cells, -1.0)]))
        with np.errstate(invalid="ignore"):  # sound speed of bad data
            res = run_case(bad)
        assert not res.ok
        assert res.failed["step"] == 0
        assert res.error is None

    def test_unguarded_baseline_abort_is_caught_by_the_harness(self):
        # the staggered stepper itself never checks positivity; the run
        # loop must still turn the blow-up into a reported failure
        res = run_case("wall-reflect", scheme="nt", cells=100, cfl=0.9,
                       tend=0.5, with_errors=False)
        assert not res.ok
        assert res.failed["step"] >= 1
        assert "internal energy" in res.failed["message"]

    def test_unknown_names_raise_usage_errors(self):
        with pytest.raises(UsageError, match="unknown case"):
            run_case("warp-drive")
        with pytest.raises(UsageError, match="unknown scheme"):
            run_case("burgers-pure-shock", "spectral")
        with pytest.raises(UsageError, match="does not support"):
            run_case("gas-toro", "rec-full", 100, 0.4)
        with pytest.raises(UsageError, match="cfl"):
            run_case("gas-toro", "godunov", 100, 0.7, with_errors=False)
        with pytest.raises(UsageError, match="safety"):
            run_case("burgers-pure-shock", safety=0.5)


class TestSolverRun:
    def test_stationary_and_fixed_mesh_speeds_are_zero(self):
        assert SolverRun("compression").mesh_speed() == 0.0
        assert SolverRun("gas-toro", "godunov", 100, 0.4).mesh_speed() == 0.0

    def test_alternating_mesh_flips_sign(self):
        run = SolverRun("iso-sms-pure", cells=50)
        v0 = run.mesh_speed()
        assert v0 > 0.0
        run.step()
        assert run.mesh_speed() == pytest.approx(-v0, rel=0.2)

    def test_landing_on_target_time(self):
        run = SolverRun("iso-sms-pure", cells=50)
        run.run_until(0.01)
        assert run.clock.t == 0.01
        assert abs(run.mesh.net_offset) < run.grid.dx

    def test_cannot_run_backward(self):
        run = SolverRun("iso-sms-pure", cells=50)
        run.run_until(0.01)
        with pytest.raises(UsageError, match="backward"):
            run.run_until(0.005)


class TestReferenceCache:
    def test_roundtrip_and_corruption_recovery(self, tmp_path):
        ref = reference_fine_grid("gas-toro", coarse_cells=100,
                                  fine_cells=600, cache_dir=tmp_path)
        assert ref.shape == (3, 100)
        path = tmp_path / "gas-toro-nt600-t0.035.csv"
        assert path.exists()
        stamp = os.stat(path).st_mtime_ns
        again = reference_fine_grid("gas-toro", coarse_cells=100,
                                    fine_cells=600, cache_dir=tmp_path)
        npt.assert_array_equal(ref, again)
        assert os.stat(path).st_mtime_ns == stamp  # served from disk
        path.write_text("rho,momentum,energy\n1,2\n")
        rebuilt = reference_fine_grid("gas-toro", coarse_cells=100,
                                      fine_cells=600, cache_dir=tmp_path)
        npt.assert_allclose(rebuilt, ref, rtol=1e-12)

    def test_cases_without_fine_reference_are_rejected(self, tmp_path):
        with pytest.raises(UsageError, match="fine-grid"):
            reference_fine_grid("gas-sms", cache_dir=tmp_path)


class TestOrderStudy:
    def test_slope_and_rows(self):
        rows, slope = order_study("compression", "godunov",
                                  (40, 80, 160), 0.4)
        assert [r["cells"] for r in rows] == [40, 80, 160]
        assert all(set(r["errors"]) == {"u"} for r in rows)
        assert 0.5 < slope < 1.5

    def test_guards(self):
        with pytest.raises(UsageError, match="at least 3"):
            order_study("compression", "godunov", (40, 80))
        with pytest.raises(UsageError, match="no reference"):
            order_study("gas-sms", "rec", (40, 80, 160))


class TestCaseRegistry:
    def test_expected_case_names(self):
        assert set(CASES) == {
            "burgers-pure-shock", "compression", "iso-sms-pure",
            "iso-sms-riemann", "iso-shock-rarefaction", "gas-toro",
            "blast", "shock-sine", "gas-sms", "wall-symmetric",
            "wall-reflect"}

    def test_initial_fields_have_the_right_shape(self):
        comps = {"burgers": 1, "isothermal": 2, "gas": 3}
        for case in CASES.values():
            grid = case.grid(None)
            U = case.init(grid)
            assert U.shape == (comps[case.model], grid.n_cells), case.name

    def test_momentum_plateaus(self):
        case = get_case("iso-sms-riemann")
        palette = momentum_plateaus(case)
        star = iso_star(IsoState(*case.left), IsoState(*case.right),
                        case.c_sound)
        npt.assert_allclose(palette, (2.6361, star.q, 1.2361), rtol=1e-12)
        assert momentum_plateaus(get_case("compression")) is None
        gas = momentum_plateaus(get_case("gas-toro"))
        assert len(gas) == 4

    def test_get_case_rejects_unknown_names(self):
        with pytest.raises(UsageError, match="unknown case"):
            get_case("nope")
