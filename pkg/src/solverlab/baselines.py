"""Baseline schemes the reconstruction solver is measured against.

All steps operate on conserved fields of shape (n_comp, n). Three run on
the same alternating mesh as the reconstruction schemes: the mesh-frame
upwind flux (staggered Lax-Friedrichs), and a predictor-corrector central
flux with minmod slopes whose interface values are evaluated where the
moving interface sits at the half step. Three run on a fixed mesh:
Rusanov, exact-Riemann Godunov, and a MUSCL-Hancock second-order scheme.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import BoundaryCondition, fill_ghosts
from .riemann import gas_star_arrays, iso_star_arrays, sample_gas_arrays, \
    sample_iso_arrays
from .scalar import TRANSMISSIVE, pick_owner_side


def minmod(a, b):
    """Zero across sign changes, else the argument closer to zero."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.where(a * b <= 0.0, 0.0, np.where(np.abs(a) < np.abs(b), a, b))


def _slopes(a):
    """Minmod slopes per cell along the last axis; end columns get zero."""
    s = np.zeros_like(a)
    s[..., 1:-1] = minmod(a[..., 1:-1] - a[..., :-2], a[..., 2:] - a[..., 1:-1])
    return s


def _check_cfl(dt, dx, speed):
    if dt * speed > dx * (1.0 + 1e-9):
        raise ValueError(f"time step {dt:.6g} violates the CFL bound "
                         f"{dx / speed:.6g}")


def nt_interface_fluxes(ext, dt, dx, v_mesh, flux_fn):
    """Second-order central flux through each moving interface.

    Cell profiles are linear with minmod slopes, advanced to the half step
    with minmod flux slopes, and evaluated at the point the interface has
    reached by then. Each interface stays inside a single owner cell for
    the whole step: the left cell when the mesh moves left, the right one
    otherwise.

    ext carries two ghost cells per side; the result has one flux per
    interface of the n interior cells.
    """
    n = ext.shape[-1] - 4
    fs = _slopes(flux_fn(ext))
    s = _slopes(ext)
    upred = ext - (dt / (2.0 * dx)) * fs
    if v_mesh <= 0.0:
        # Interface j+1/2 sweeps into cell j; sample where it sits at t+dt/2.
        owner = slice(1, n + 2)
        pos = 0.5 + v_mesh * dt / (2.0 * dx)
    else:
        owner = slice(2, n + 3)
        pos = -0.5 + v_mesh * dt / (2.0 * dx)
    ut = upred[..., owner] + s[..., owner] * pos
    return flux_fn(ut) - v_mesh * ut


def nt_step(U, dt, dx, v_mesh, model, bc: BoundaryCondition = TRANSMISSIVE):
    """Predictor-corrector central scheme on the alternating mesh."""
    U = np.asarray(U, dtype=float)
    _check_cfl(dt, dx, abs(v_mesh) + model.max_abs_speed(U))
    ext = fill_ghosts(U, bc, 2, model.negate_rows)
    F = nt_interface_fluxes(ext, dt, dx, v_mesh, model.flux)
    return U - (dt / dx) * (F[..., 1:] - F[..., :-1])


def lxf_step(U, dt, dx, v_mesh, model, bc: BoundaryCondition = TRANSMISSIVE):
    """Mesh-frame upwind flux: each interface takes its single owner cell.

    On the alternating mesh this is the staggered Lax-Friedrichs scheme,
    and it is exactly what the reconstruction schemes fall back to in
    cells that reject the shock fit.
    """
    U = np.asarray(U, dtype=float)
    _check_cfl(dt, dx, abs(v_mesh) + model.max_abs_speed(U))
    side = pick_owner_side(v_mesh, *model.speed_range(U))
    ext = fill_ghosts(U, bc, 1, model.negate_rows)
    own = ext[..., :-1] if side == "right" else ext[..., 1:]
    F = model.flux(own) - v_mesh * own
    return U - (dt / dx) * (F[..., 1:] - F[..., :-1])


def rusanov_flux(UL, UR, model):
    """Central flux with local maximal-speed dissipation."""
    a = np.maximum(model.local_max_speeds(UL), model.local_max_speeds(UR))
    return 0.5 * (model.flux(UL) + model.flux(UR)) - 0.5 * a * (UR - UL)


def rusanov_step(U, dt, dx, model, bc: BoundaryCondition = TRANSMISSIVE):
    U = np.asarray(U, dtype=float)
    _check_cfl(dt, dx, model.max_abs_speed(U))
    ext = fill_ghosts(U, bc, 1, model.negate_rows)
    F = rusanov_flux(ext[..., :-1], ext[..., 1:], model)
    return U - (dt / dx) * (F[..., 1:] - F[..., :-1])


def _godunov_scalar_fluxes(u_l, u_r, flux):
    f_l = flux.f(u_l)
    f_r = flux.f(u_r)
    shock = u_l > u_r
    sonic = flux.sonic
    if sonic is None:
        f_sonic = np.zeros_like(f_l)
        trans = ~shock & (flux.f_prime(u_l) < 0.0) & (flux.f_prime(u_r) > 0.0)
        if np.any(trans):
            from scipy.optimize import brentq
            for i in np.flatnonzero(trans):
                s = brentq(flux.f_prime, u_l.flat[i], u_r.flat[i])
                f_sonic.flat[i] = flux.f(s)
    else:
        f_sonic = flux.f(sonic)
    raref = np.where(flux.f_prime(u_l) >= 0.0, f_l,
                     np.where(flux.f_prime(u_r) <= 0.0, f_r, f_sonic))
    return np.where(shock, np.maximum(f_l, f_r), raref)


def godunov_step(U, dt, dx, model, bc: BoundaryCondition = TRANSMISSIVE):
    """First-order upwind scheme with the exact Riemann interface state.

    The wave fan of an interface must stay clear of its neighbors, which
    halves the usable CFL range.
    """
    U = np.asarray(U, dtype=float)
    if dt * model.max_abs_speed(U) > 0.5 * dx * (1.0 + 1e-9):
        raise ValueError("the exact-Riemann scheme needs dt within half the "
                         "CFL bound")
    ext = fill_ghosts(U, bc, 1, model.negate_rows)
    L, R = ext[..., :-1], ext[..., 1:]
    if model.name == "burgers":
        F = _godunov_scalar_fluxes(L, R, model.convex_flux)
    elif model.name == "isothermal":
        rho_s, u_s = iso_star_arrays(L[0], L[1] / L[0], R[0], R[1] / R[0],
                                     model.c)
        rho0, u0 = sample_iso_arrays(L[0], L[1] / L[0], R[0], R[1] / R[0],
                                     rho_s, u_s, model.c, 0.0)
        F = model.flux(np.stack([rho0, rho0 * u0]))
    else:
        gamma = model.gamma
        p_l = model.pressure(L)
        p_r = model.pressure(R)
        star = gas_star_arrays(L[0], L[1] / L[0], p_l,
                               R[0], R[1] / R[0], p_r, gamma)
        rho0, u0, p0 = sample_gas_arrays(L[0], L[1] / L[0], p_l,
                                         R[0], R[1] / R[0], p_r,
                                         star, gamma, 0.0)
        F = model.flux(model.conserved(rho0, u0, p0))
    return U - (dt / dx) * (F[..., 1:] - F[..., :-1])


def _to_prim(model, U):
    if model.name == "burgers":
        return U
    if model.name == "isothermal":
        return np.stack([U[0], U[1] / U[0]])
    return np.stack([U[0], U[1] / U[0], model.pressure(U)])


def _from_prim(model, W):
    if model.name == "burgers":
        return W
    if model.name == "isothermal":
        return np.stack([W[0], W[0] * W[1]])
    return model.conserved(W[0], W[1], W[2])


def muscl_step(U, dt, dx, model, bc: BoundaryCondition = TRANSMISSIVE):
    """MUSCL-Hancock: minmod primitive slopes, half-step edge predictor,
    Rusanov interface fluxes."""
    U = np.asarray(U, dtype=float)
    _check_cfl(dt, dx, model.max_abs_speed(U))
    n = U.shape[-1]
    ext = fill_ghosts(U, bc, 2, model.negate_rows)
    W = _to_prim(model, ext)
    s = _slopes(W)
    UL = _from_prim(model, W - 0.5 * s)
    UR = _from_prim(model, W + 0.5 * s)
    corr = (dt / (2.0 * dx)) * (model.flux(UL) - model.flux(UR))
    UL = UL + corr
    UR = UR + corr
    F = rusanov_flux(UR[..., 1:n + 2], UL[..., 2:n + 3], model)
    return U - (dt / dx) * (F[..., 1:] - F[..., :-1])


@dataclass(frozen=True)
class SchemeInfo:
    """Registry entry: mesh kind, CFL ceiling and supported models."""

    name: str
    moving_mesh: bool
    max_cfl: float
    models: tuple[str, ...]
    summary: str


_ALL = ("burgers", "isothermal", "gas")

SCHEMES = {
    "rec": SchemeInfo("rec", True, 1.0, _ALL,
                      "in-cell shock reconstruction, upwind fallback"),
    "rec-full": SchemeInfo("rec-full", True, 1.0, ("isothermal",),
                           "reconstruction requiring every component "
                           "position in range"),
    "rec+nt": SchemeInfo("rec+nt", True, 1.0, ("isothermal", "gas"),
                         "reconstruction with the central second-order "
                         "fallback"),
    "rec-full+nt": SchemeInfo("rec-full+nt", True, 1.0, ("isothermal",),
                              "full-variant reconstruction with the "
                              "central fallback"),
    "lxf": SchemeInfo("lxf", True, 1.0, _ALL,
                      "staggered Lax-Friedrichs (mesh-frame upwind)"),
    "nt": SchemeInfo("nt", True, 1.0, _ALL,
                     "second-order central scheme on the alternating mesh"),
    "rusanov": SchemeInfo("rusanov", False, 1.0, _ALL,
                          "local Lax-Friedrichs flux on a fixed mesh"),
    "godunov": SchemeInfo("godunov", False, 0.5, _ALL,
                          "exact-Riemann upwind scheme on a fixed mesh"),
    "muscl": SchemeInfo("muscl", False, 1.0, _ALL,
                        "MUSCL-Hancock second order on a fixed mesh"),
}
