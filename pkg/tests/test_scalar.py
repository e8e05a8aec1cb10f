"""Scalar in-cell shock reconstruction: decisions, fluxes, exactness."""
import numpy as np
import numpy.testing as npt
import pytest

from solverlab.grid import (GridSpec, PiecewiseProfile, init_cell_averages,
                            mesh_speed_for_step)
from solverlab.models import BURGERS, ConvexFlux
from solverlab.scalar import (
    TRANSMISSIVE,
    crossing_weight,
    exact_compression,
    godunov_scalar_flux,
    interface_gap_rel,
    pick_owner_side,
    reconstruct_scalar,
    scalar_interface_flux,
    scalar_step,
)


class TestReconstruct:
    def test_centered_jump(self):
        dec = reconstruct_scalar(3.0, 2.0, 1.0, dx=1.0)
        assert dec.accepted
        npt.assert_allclose(dec.shock_pos, 0.5)
        assert (dec.u_left, dec.u_right) == (3.0, 1.0)
        npt.assert_allclose(dec.shock_speed, 2.0)  # (4.5 - 0.5) / 2

    def test_position_tracks_the_average(self):
        dec = reconstruct_scalar(3.0, 2.5, 1.0, dx=1.0)
        npt.assert_allclose(dec.shock_pos, 0.75)
        # conservation of the cell average by construction
        npt.assert_allclose(dec.shock_pos * 3.0 + 0.25 * 1.0, 2.5)

    def test_rejects_rarefaction_ordering(self):
        dec = reconstruct_scalar(1.0, 2.0, 3.0, dx=1.0)
        assert not dec.accepted
        assert dec.u_left == dec.u_right == 2.0
        assert dec.shock_speed == 2.0  # characteristic speed f'(2)

    def test_rejects_flat_data(self):
        assert not reconstruct_scalar(2.0, 2.0, 2.0, dx=1.0).accepted

    def test_rejects_positions_on_the_boundary(self):
        # average equal to a neighbor puts the jump on an interface
        assert not reconstruct_scalar(3.0, 3.0, 1.0, dx=1.0).accepted
        assert not reconstruct_scalar(3.0, 1.0, 1.0, dx=1.0).accepted

    def test_rejects_average_outside_the_bracket(self):
        assert not reconstruct_scalar(3.0, 4.0, 1.0, dx=1.0).accepted


class TestCrossingWeight:
    def test_interior_crossing(self):
        assert crossing_weight(0.5, 2.0, 1.0) == 0.25

    def test_late_crossing_is_capped(self):
        assert crossing_weight(0.5, 2.0, 0.1) == 0.1

    def test_receding_jump_never_crosses(self):
        assert crossing_weight(0.5, -1.0, 0.1) == 0.1
        assert crossing_weight(0.5, 0.0, 0.1) == 0.1

    def test_negative_gap_extrapolates(self):
        # affine continuation: a jump past the interface owes time back
        assert crossing_weight(-0.5, 2.0, 1.0) == -0.25


class TestGapRel:
    def test_right_side(self):
        gap, rel = interface_gap_rel(0.3, 2.0, -3.0, 1.0, "right")
        npt.assert_allclose((gap, rel), (0.7, 5.0))

    def test_left_side(self):
        gap, rel = interface_gap_rel(0.3, 2.0, 3.0, 1.0, "left")
        npt.assert_allclose((gap, rel), (0.3, 1.0))

    def test_bad_side(self):
        with pytest.raises(ValueError):
            interface_gap_rel(0.3, 2.0, 0.0, 1.0, "up")


class TestOwnerSide:
    def test_mesh_motion_decides(self):
        assert pick_owner_side(-1.0, -5.0, 5.0) == "right"
        assert pick_owner_side(1.0, -5.0, 5.0) == "left"

    def test_stationary_mesh_needs_one_signed_speeds(self):
        assert pick_owner_side(0.0, 0.5, 2.0) == "right"
        assert pick_owner_side(0.0, -2.0, -0.5) == "left"
        with pytest.raises(ValueError):
            pick_owner_side(0.0, -1.0, 1.0)


class TestInterfaceFlux:
    def test_rejected_cell_upwinds_in_the_mesh_frame(self):
        dec = reconstruct_scalar(1.0, 2.0, 3.0, dx=1.0)
        # f(2) - v * 2 = 2 + 6
        npt.assert_allclose(scalar_interface_flux(dec, -3.0, 0.1, 1.0), 8.0)

    def test_near_state_before_the_crossing(self):
        dec = reconstruct_scalar(3.0, 2.0, 1.0, dx=1.0)
        # left-moving mesh: near state is the right value, crossing at
        # gap/rel = 0.5/5 = 0.1 > dt, so the near flux f(1) - v*1 holds
        npt.assert_allclose(scalar_interface_flux(dec, -3.0, 0.05, 1.0), 3.5)

    def test_time_average_after_the_crossing(self):
        dec = reconstruct_scalar(3.0, 2.0, 1.0, dx=1.0)
        # w = 0.1 of near flux 3.5, remaining 0.1 of far flux 13.5
        npt.assert_allclose(scalar_interface_flux(dec, -3.0, 0.2, 1.0), 8.5)


class TestGodunovFlux:
    def test_shock_takes_the_larger_flux(self):
        assert godunov_scalar_flux(3.0, 1.0) == 4.5

    def test_transonic_rarefaction_takes_the_sonic_flux(self):
        assert godunov_scalar_flux(-1.0, 1.0) == 0.0

    def test_one_sided_rarefactions_upwind(self):
        assert godunov_scalar_flux(1.0, 3.0) == 0.5
        assert godunov_scalar_flux(-3.0, -1.0) == 0.5

    def test_equal_states(self):
        assert godunov_scalar_flux(2.0, 2.0) == 2.0

    def test_unknown_sonic_point_is_located_numerically(self):
        flux = ConvexFlux(lambda u: 0.5 * u * u, lambda u: u, sonic=None)
        npt.assert_allclose(godunov_scalar_flux(-1.0, 1.0, flux), 0.0,
                            atol=1e-12)


class TestScalarStep:
    def test_cfl_guard(self):
        u = np.array([3.0, 3.0, 1.0, 1.0])
        with pytest.raises(ValueError, match="CFL"):
            scalar_step(u, dt=1.0, dx=0.1, v_mesh=-3.0)

    def test_reconstruction_off_matches_mesh_frame_upwind(self):
        from solverlab.baselines import lxf_step
        from solverlab.models import BurgersModel
        rng = np.random.default_rng(3)
        u = rng.uniform(1.0, 3.0, size=32)
        dt, dx, v = 0.01, 0.1, -3.5
        a = scalar_step(u, dt, dx, v, allow_reconstruction=False)
        b = lxf_step(u[None], dt, dx, v, BurgersModel(), TRANSMISSIVE)[0]
        npt.assert_array_equal(a, b)

    def test_pure_shock_is_transported_exactly(self):
        """A lone entropy shock on an interface stays sharp for 50 steps."""
        grid = GridSpec(-1.0, 1.0, 50)
        dx = grid.dx
        u = init_cell_averages(PiecewiseProfile.step(0.0, 3.0, 1.0), grid)
        v_abs = 3.0
        dt = 0.4 * dx / (v_abs + 3.0)
        offset = 0.0
        for k in range(50):
            v = mesh_speed_for_step(k, v_abs)
            u = scalar_step(u, dt, dx, v)
            offset += v * dt
        assert offset == 0.0  # even number of equal steps
        exact = init_cell_averages(
            PiecewiseProfile.step(2.0 * 50 * dt, 3.0, 1.0), grid)
        npt.assert_allclose(u, exact, rtol=0, atol=1e-12)


class TestExactCompression:
    def test_initial_ramp(self):
        npt.assert_allclose(exact_compression(0.0, np.array([-4.0, -2.0, 0.0])),
                            [3.0, 2.0, 1.0])

    def test_ramp_steepens(self):
        # at t = 1/2 the ramp spans [-1.5, -0.5]
        npt.assert_allclose(exact_compression(0.5, np.array([-1.0])), [2.0])
        npt.assert_allclose(exact_compression(0.5, np.array([-1.75, -0.25])),
                            [3.0, 1.0])

    def test_shock_forms_at_the_origin(self):
        npt.assert_allclose(exact_compression(1.0, np.array([-1e-9, 1e-9])),
                            [3.0, 1.0])

    def test_shock_travels_at_speed_two(self):
        npt.assert_allclose(exact_compression(1.5, np.array([0.99, 1.01])),
                            [3.0, 1.0])

    def test_scalar_input_gives_float(self):
        out = exact_compression(0.0, -5.0)
        assert isinstance(out, float) and out == 3.0
