"""Isothermal reconstruction scheme: detection, candidates, acceptance,
fluxes, exact shock transport and conservation."""
import numpy as np
import numpy.testing as npt
import pytest

from solverlab.baselines import lxf_step, nt_step
from solverlab.errors import PositivityError
from solverlab.grid import (GridSpec, PiecewiseProfile, init_cell_averages,
                            mesh_speed_for_step)
from solverlab.isothermal import (
    accept_iso,
    candidates_iso,
    detect_wave_iso,
    distances_iso,
    iso_interface_flux,
    iso_step,
)
from solverlab.models import IsothermalModel
from solverlab.riemann import IsoState, iso_shock_speed, iso_star, rh_residual

C = 0.5
# family-1 shock of speed 0.1 running into rho = 1
UL = 0.1 + C * np.sqrt(20.0)
UR = 0.1 + (UL - 0.1) / 20.0


def shock_field(grid, x0=0.0):
    rho = init_cell_averages(PiecewiseProfile.step(x0, 1.0, 20.0), grid)
    q = init_cell_averages(PiecewiseProfile.step(x0, UL, 20.0 * UR), grid)
    return np.stack([rho, q])


class TestDetect:
    def test_compressive_pairs(self):
        lo, hi = IsoState(1.0, 2.0), IsoState(4.0, 0.0)
        assert detect_wave_iso(lo, lo, hi) == 1  # density rises rightward
        assert detect_wave_iso(hi, hi, IsoState(1.0, -2.0)) == 2

    def test_density_tie_goes_to_family_two(self):
        a, b = IsoState(3.0, 1.0), IsoState(3.0, -1.0)
        assert detect_wave_iso(a, a, b) == 2

    def test_expansive_pair_has_no_shock(self):
        a, b = IsoState(1.0, -1.0), IsoState(1.0, 1.0)
        assert detect_wave_iso(a, a, b) == 0
        assert detect_wave_iso(a, a, a) == 0


class TestCandidates:
    left = IsoState(1.0, 2.6361)
    right = IsoState(20.0, 1.2361 / 20.0)

    def test_family_one_keeps_the_left_state(self):
        bar_l, bar_r, sigma = candidates_iso(self.left, self.right, C, 1)
        assert bar_l == self.left
        star = iso_star(self.left, self.right, C)
        npt.assert_allclose((bar_r.rho, bar_r.u), (star.rho, star.u))
        # the pair is an exact jump of the returned speed
        resid = rh_residual(bar_l, bar_r, sigma, c=C)
        npt.assert_allclose(resid, 0.0, atol=1e-9)

    def test_family_two_keeps_the_right_state(self):
        bar_l, bar_r, sigma = candidates_iso(self.left, self.right, C, 2)
        assert bar_r == self.right
        resid = rh_residual(bar_l, bar_r, sigma, c=C)
        npt.assert_allclose(resid, 0.0, atol=1e-9)
        # 2-wave outruns the 1-wave
        _, _, sigma1 = candidates_iso(self.left, self.right, C, 1)
        assert sigma > sigma1

    def test_bad_family(self):
        with pytest.raises(ValueError):
            candidates_iso(self.left, self.right, C, 0)


class TestDistances:
    def test_mixture_identity(self):
        bar_l = IsoState(1.0, 2.3)
        bar_r = IsoState(20.0, 4.2 / 20.0)
        mid = IsoState(0.3 * 1.0 + 0.7 * 20.0,
                       (0.3 * 2.3 + 0.7 * 4.2) / (0.3 + 0.7 * 20.0))
        d_rho, d_q = distances_iso(bar_l, bar_r, mid, 1.0)
        npt.assert_allclose((d_rho, d_q), (0.3, 0.3), rtol=1e-12)

    def test_equal_bar_component_is_flagged(self):
        bar_l = IsoState(1.0, 0.3)
        bar_r = IsoState(4.0, 0.3 / 4.0)  # same momentum on both sides
        mid = IsoState(2.8, 0.3 / 2.8)
        d_rho, d_q = distances_iso(bar_l, bar_r, mid, 1.0)
        npt.assert_allclose(d_rho, 0.4)
        assert np.isinf(d_q)


class TestAccept:
    def test_half_only_constrains_density(self):
        assert accept_iso("half", 0.5, 7.0, 1.0)
        assert accept_iso("half", 0.5, np.inf, 1.0)
        assert not accept_iso("half", 0.0, 0.5, 1.0)
        assert not accept_iso("half", 1.0, 0.5, 1.0)

    def test_full_constrains_both(self):
        assert accept_iso("full", 0.5, 0.7, 1.0)
        assert not accept_iso("full", 0.5, 1.2, 1.0)
        assert not accept_iso("full", 0.5, np.inf, 1.0)

    def test_bad_variant(self):
        with pytest.raises(ValueError):
            accept_iso("both", 0.5, 0.5, 1.0)


class TestInterfaceFlux:
    bar_l = IsoState(1.0, UL)
    bar_r = IsoState(20.0, UR)

    def test_before_any_crossing_only_the_near_state_feeds(self):
        # left-moving mesh: near = right bar state
        out = iso_interface_flux(self.bar_l, self.bar_r, 0.1, 0.5 - 1e-3,
                                 0.5, -3.0, 1e-4, 1.0, C)
        near = self.bar_r
        g = np.array([near.q - (-3.0) * near.rho,
                      near.q ** 2 / near.rho + C * C * near.rho
                      - (-3.0) * near.q])
        npt.assert_allclose(out, g, rtol=1e-14)

    def test_component_crossings_average_independently(self):
        sigma, v, dt, dx = 0.1, -3.0, 0.2, 1.0
        d_rho, d_q = 0.9, 0.7
        out = iso_interface_flux(self.bar_l, self.bar_r, sigma, d_rho, d_q,
                                 v, dt, dx, C)
        rel = sigma - v
        g = lambda s: np.array([s.q - v * s.rho,
                                s.q ** 2 / s.rho + C * C * s.rho - v * s.q])
        gn, gf = g(self.bar_r), g(self.bar_l)
        w_rho = (dx - d_rho) / rel
        w_q = (dx - d_q) / rel
        npt.assert_allclose(out[0], (w_rho * gn[0] + (dt - w_rho) * gf[0]) / dt)
        npt.assert_allclose(out[1], (w_q * gn[1] + (dt - w_q) * gf[1]) / dt)

    def test_out_of_range_momentum_extrapolates(self):
        # momentum placed past the interface: weight goes negative
        sigma, v, dt, dx = 0.1, -3.0, 0.2, 1.0
        out = iso_interface_flux(self.bar_l, self.bar_r, sigma, 0.5, 1.2,
                                 v, dt, dx, C)
        w_q = (dx - 1.2) / (sigma - v)
        assert w_q < 0.0
        g = lambda s: np.array([s.q - v * s.rho,
                                s.q ** 2 / s.rho + C * C * s.rho - v * s.q])
        expect = (w_q * g(self.bar_r)[1] + (dt - w_q) * g(self.bar_l)[1]) / dt
        npt.assert_allclose(out[1], expect, rtol=1e-14)

    def test_invalid_momentum_position_keeps_the_near_state(self):
        out = iso_interface_flux(self.bar_l, self.bar_r, 0.1, 0.5, np.inf,
                                 -3.0, 0.2, 1.0, C)
        near = self.bar_r
        npt.assert_allclose(
            out[1],
            near.q ** 2 / near.rho + C * C * near.rho - (-3.0) * near.q)


class TestIsoStep:
    def test_pure_shock_is_transported_exactly_by_both_variants(self):
        grid = GridSpec(-1.0, 1.0, 50)
        dx = grid.dx
        v_abs = abs(UL) + C
        dt = 0.45 * dx / (2.0 * v_abs)
        for variant in ("half", "full"):
            U = shock_field(grid)
            for k in range(50):
                v = mesh_speed_for_step(k, v_abs)
                U = iso_step(U, dt, dx, v, C, variant=variant)
            exact = shock_field(grid, x0=0.1 * 50 * dt)
            npt.assert_allclose(U, exact, rtol=0, atol=1e-10)

    def test_periodic_conservation_with_active_reconstruction(self):
        grid = GridSpec(0.0, 1.0, 64)
        x = grid.centers()
        rho = 2.0 + 0.5 * np.sin(2 * np.pi * x)
        u = 0.5 * np.cos(2 * np.pi * x)
        U = np.stack([rho, rho * u])
        sums0 = U.sum(axis=1)
        from solverlab.grid import BoundaryCondition
        per = BoundaryCondition("periodic", "periodic")
        v_abs = float(np.max(np.abs(u))) + C
        dt = 0.45 * grid.dx / (2.0 * v_abs)
        stats: dict = {}
        total_accepted = 0
        for k in range(200):
            v = mesh_speed_for_step(k, v_abs)
            U = iso_step(U, dt, grid.dx, v, C, bc=per, stats=stats)
            total_accepted += stats["accepted"]
        assert total_accepted > 0  # the data does trigger reconstructions
        npt.assert_allclose(U.sum(axis=1), sums0, rtol=1e-12, atol=1e-12)

    def test_nt_coupling_matches_nt_while_nothing_is_accepted(self):
        # exactly constant density pins every in-cell position to the cell
        # edge, so the first step is guaranteed rejection everywhere; later
        # steps are compared only while the acceptance count stays zero
        grid = GridSpec(0.0, 1.0, 32)
        x = grid.centers()
        rho = np.full_like(x, 1.5)
        u = 0.2 + 0.1 * np.sin(2 * np.pi * x)
        U = np.stack([rho, rho * u])
        from solverlab.grid import BoundaryCondition
        per = BoundaryCondition("periodic", "periodic")
        model = IsothermalModel(C)
        v_abs = float(np.max(np.abs(u))) + C
        dt = 0.4 * grid.dx / (2.0 * v_abs)
        a, b = U.copy(), U.copy()
        stats: dict = {}
        clean = 0
        for k in range(8):
            v = mesh_speed_for_step(k, v_abs)
            a = iso_step(a, dt, grid.dx, v, C, coupling="nt", bc=per,
                         stats=stats)
            b = nt_step(b, dt, grid.dx, v, model, per)
            if stats["accepted"]:
                break
            npt.assert_array_equal(a, b)
            clean += 1
        assert clean >= 1

    def test_lxf_coupling_matches_lxf_when_nothing_is_accepted(self):
        grid = GridSpec(0.0, 1.0, 32)
        x = grid.centers()
        rho = np.full_like(x, 1.5)
        u = 0.2 + 0.1 * np.sin(2 * np.pi * x)
        U = np.stack([rho, rho * u])
        from solverlab.grid import BoundaryCondition
        per = BoundaryCondition("periodic", "periodic")
        v_abs = float(np.max(np.abs(u))) + C
        dt = 0.4 * grid.dx / (2.0 * v_abs)
        v = mesh_speed_for_step(0, v_abs)
        a = iso_step(U, dt, grid.dx, v, C, bc=per)
        b = lxf_step(U, dt, grid.dx, v, IsothermalModel(C), per)
        npt.assert_array_equal(a, b)

    def test_variants_diverge_on_momentum_out_of_range_data(self):
        grid = GridSpec(-0.5, 1.5, 100)
        rho = init_cell_averages(PiecewiseProfile.step(0.0, 1.0, 20.0), grid)
        q = init_cell_averages(
            PiecewiseProfile.step(0.0, 2.6361, 1.2361), grid)
        U0 = np.stack([rho, q])
        v_abs = float(np.max(np.abs(q / rho))) + C
        dt = 0.45 * grid.dx / (2.0 * v_abs)
        runs = {}
        for variant in ("half", "full"):
            U = U0.copy()
            for k in range(40):
                v = mesh_speed_for_step(k, v_abs)
                U = iso_step(U, dt, grid.dx, v, C, variant=variant)
            runs[variant] = U
        assert np.max(np.abs(runs["half"] - runs["full"])) > 1e-8

    def test_accepted_count_is_reported(self):
        grid = GridSpec(-1.0, 1.0, 50)
        v_abs = abs(UL) + C
        dt = 0.45 * grid.dx / (2.0 * v_abs)
        stats: dict = {}
        uniform = np.stack([np.full(50, 2.0), np.full(50, 0.4)])
        iso_step(uniform, dt, grid.dx, mesh_speed_for_step(0, v_abs), C,
                 stats=stats)
        assert stats["accepted"] == 0
        U = shock_field(grid)
        U = iso_step(U, dt, grid.dx, mesh_speed_for_step(0, v_abs), C)
        iso_step(U, dt, grid.dx, mesh_speed_for_step(1, v_abs), C,
                 stats=stats)
        assert stats["accepted"] >= 1

    def test_guards(self):
        U = np.ones((2, 8))
        with pytest.raises(ValueError, match="variant"):
            iso_step(U, 1e-3, 0.1, -1.0, C, variant="quarter")
        with pytest.raises(ValueError, match="coupling"):
            iso_step(U, 1e-3, 0.1, -1.0, C, coupling="central")
        with pytest.raises(ValueError, match="shape"):
            iso_step(np.ones((3, 8)), 1e-3, 0.1, -1.0, C)
        with pytest.raises(ValueError, match="CFL"):
            iso_step(U, 1.0, 0.1, -1.0, C)

    def test_positivity_violation_raises(self):
        U = np.ones((2, 8))
        U[0, 3] = np.nan
        with pytest.raises(PositivityError):
            iso_step(U, 1e-3, 0.1, -1.0, C)
