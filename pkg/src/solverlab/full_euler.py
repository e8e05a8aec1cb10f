"""Shock reconstruction for the full ideal-gas Euler system.

The neighbor Riemann problem offers three candidate waves per cell: the
two shock families, rebuilt against the adjacent star state, and the
contact between the star states. Selection requires the physical jump
ordering of the family and a clear separation of the candidate's density
jump from the competing ones, scaled by the run's CFL number. An accepted
cell places each conserved component at its own conservative position;
density and energy must land strictly inside the cell and the rebuilt
profile must keep the velocity monotone between the neighbors and the
internal energy positive on every subinterval. Momentum gets no
positional constraint, so mass and energy stay exactly conservative while
momentum rides their reconstruction.
"""
from __future__ import annotations

import numpy as np

from .errors import PositivityError
from .grid import BoundaryCondition, fill_ghosts
from .models import IdealGasModel
from .riemann import gas_star_arrays
from .scalar import TRANSMISSIVE, crossing_weight, interface_gap_rel, pick_owner_side

SELECTIONS = ("one-shot", "two-shot")
COUPLINGS = ("lxf", "nt")

NONE, SHOCK1, CONTACT, SHOCK3 = 0, 1, 2, 3


def _conserved(rho, u, p, gamma):
    return np.stack([rho, rho * u, p / (gamma - 1.0) + 0.5 * rho * u * u])


def select_wave_full(prev, nxt, star, gamma, c_cfl):
    """Pick at most one candidate wave per cell triplet.

    prev and nxt are conserved states (3, m); star is the tuple
    (p*, u*, rho*_left, rho*_right) of the neighbor Riemann problems.
    A shock family needs the matching non-strict ordering of velocity,
    density and pressure across the neighbors, and every candidate needs
    its density jump to dominate the remaining ones by the factor c_cfl.
    Returns the family code per cell (0 none, 1, 2 contact, 3).
    """
    p_star, u_star, rho_sl, rho_sr = star
    rho_p, u_p = prev[0], prev[1] / prev[0]
    rho_n, u_n = nxt[0], nxt[1] / nxt[0]
    p_p = (gamma - 1.0) * (prev[2] - 0.5 * prev[1] ** 2 / prev[0])
    p_n = (gamma - 1.0) * (nxt[2] - 0.5 * nxt[1] ** 2 / nxt[0])

    jump_l = np.abs(rho_p - rho_sl)
    jump_c = np.abs(rho_sl - rho_sr)
    jump_r = np.abs(rho_sr - rho_n)

    compress = u_p >= u_n
    is1 = (compress & (rho_p <= rho_n) & (p_p <= p_n)
           & (jump_l > c_cfl * np.maximum(jump_c, jump_r)))
    is3 = (compress & (rho_p >= rho_n) & (p_p >= p_n)
           & (jump_r > c_cfl * np.maximum(jump_c, jump_l)))
    isc = jump_c > c_cfl * np.maximum(jump_l, jump_r)
    fam = np.where(is1, SHOCK1,
                   np.where(is3, SHOCK3,
                            np.where(isc, CONTACT, NONE)))
    return fam.astype(np.int8)


def _bars_and_sigma(fam, prev, nxt, star, gamma):
    """Bar states (conserved) and wave speed for each selected family.

    Shock speeds come from mass conservation across the bar pair; the
    contact moves with the star velocity. Cells with family 0 get
    placeholder values that the caller masks out.
    """
    p_star, u_star, rho_sl, rho_sr = star
    star_l = _conserved(rho_sl, u_star, p_star, gamma)
    star_r = _conserved(rho_sr, u_star, p_star, gamma)

    bar_l = np.where(fam == SHOCK1, prev,
                     np.where(fam == SHOCK3, star_r, star_l))
    bar_r = np.where(fam == SHOCK1, star_l,
                     np.where(fam == SHOCK3, nxt, star_r))
    drho = bar_r[0] - bar_l[0]
    safe = np.where(drho != 0.0, drho, 1.0)
    sigma_shock = (bar_r[1] - bar_l[1]) / safe
    sigma = np.where(fam == CONTACT, u_star, sigma_shock)
    return bar_l, bar_r, sigma


def distances_full(bar_l, bar_r, mid, dx):
    """Conservative positions of the three component jumps; a component
    with equal bar states has nothing to place and comes back infinite."""
    denom = bar_r - bar_l
    good = denom != 0.0
    return np.where(good, dx * (bar_r - mid) / np.where(good, denom, 1.0),
                    np.inf)


def accept_full(prev, mid, nxt, bar_l, bar_r, d, dx):
    """Acceptance mask for gas reconstructions.

    Density and energy positions must be strictly interior. The density
    cell averages must be monotone through the triplet, the triplet of
    the neighbor velocities around the cell average of the reconstructed
    velocity must be monotone as well, and the profile assembled from the
    per-component positions must have positive density and internal
    energy on every subinterval. The reconstructed velocity is the bar
    velocities split at the momentum position, falling back to the
    density position when the momentum one is unusable.
    """
    in_range = ((d[0] > 0.0) & (d[0] < dx)
                & (d[2] > 0.0) & (d[2] < dx))

    mono_rho = (mid[0] - prev[0]) * (nxt[0] - mid[0]) >= 0.0

    u_p = prev[1] / prev[0]
    u_n = nxt[1] / nxt[0]
    ub_l = bar_l[1] / bar_l[0]
    ub_r = bar_r[1] / bar_r[0]
    b_q = np.where((d[1] > 0.0) & (d[1] < dx), d[1], d[0])
    b_safe = np.clip(np.where(np.isfinite(b_q), b_q, 0.0), 0.0, dx)
    u_rec = (b_safe * ub_l + (dx - b_safe) * ub_r) / dx
    # a flat segment (contact velocity) is monotone; rounding noise in the
    # product test must not reject it
    du1 = u_rec - u_p
    du2 = u_n - u_rec
    u_tol = 1e-11 * np.maximum(1.0, np.maximum(np.abs(u_p), np.abs(u_n)))
    mono_u = (du1 * du2 >= 0.0) | (np.abs(du1) <= u_tol) \
        | (np.abs(du2) <= u_tol)
    breaks = np.sort(np.stack([d[0], b_q, d[2]]), axis=0)
    edges = np.concatenate([np.zeros((1,) + breaks.shape[1:]),
                            np.clip(breaks, 0.0, dx),
                            np.full((1,) + breaks.shape[1:], dx)])
    mids = 0.5 * (edges[:-1] + edges[1:])
    b_comp = np.stack([d[0], b_q, d[2]])
    rho_s = np.where(mids < b_comp[0], bar_l[0], bar_r[0])
    q_s = np.where(mids < b_comp[1], bar_l[1], bar_r[1])
    e_s = np.where(mids < b_comp[2], bar_l[2], bar_r[2])
    pos = np.all((rho_s > 0.0) & (e_s - 0.5 * q_s * q_s / rho_s > 0.0), axis=0)

    return in_range & mono_rho & mono_u & pos


def full_step(field, dt, dx, v_mesh, gamma, *, c_cfl, coupling: str = "lxf",
              selection: str = "one-shot", bc: BoundaryCondition = TRANSMISSIVE,
              stats: dict | None = None):
    """One conservative update of the ideal-gas system on the moving mesh.

    selection "one-shot" runs the family choice once per cell; "two-shot"
    tries the contact candidate everywhere first and retries the shock
    families in cells where only the position range test failed. Coupling
    and flux overwrite mirror the isothermal step. Positivity violations
    raise, never clamp.
    """
    if selection not in SELECTIONS:
        raise ValueError(f"selection must be one of {SELECTIONS}, got {selection!r}")
    if coupling not in COUPLINGS:
        raise ValueError(f"coupling must be one of {COUPLINGS}, got {coupling!r}")
    U = np.asarray(field, dtype=float)
    if U.ndim != 2 or U.shape[0] != 3:
        raise ValueError("gas state must have shape (3, n)")
    n = U.shape[1]
    model = IdealGasModel(gamma)
    model.check_positive(U)
    v_waves = model.max_abs_speed(U)
    if dt * (abs(v_mesh) + v_waves) > dx * (1.0 + 1e-9):
        raise ValueError(
            f"time step {dt:.6g} violates the CFL bound "
            f"{dx / (abs(v_mesh) + v_waves):.6g}")
    side = pick_owner_side(v_mesh, *model.speed_range(U))

    ext = fill_ghosts(U, bc, 2, negate_rows=(1,))
    if coupling == "nt":
        from .baselines import nt_interface_fluxes
        F = nt_interface_fluxes(ext, dt, dx, v_mesh, model.flux)
    else:
        own = ext[:, 1:n + 2] if side == "right" else ext[:, 2:n + 3]
        F = model.flux(own) - v_mesh * own

    if side == "right":
        prev, mid, nxt = ext[:, :n + 1], ext[:, 1:n + 2], ext[:, 2:n + 3]
    else:
        prev, mid, nxt = ext[:, 1:n + 2], ext[:, 2:n + 3], ext[:, 3:]

    # Uniform triplets carry no wave; skipping them keeps the star solves
    # confined to the few active cells.
    active = np.any(prev != nxt, axis=0)
    idx = np.nonzero(active)[0]
    n_accepted = 0
    if idx.size:
        p3, m3, n3 = prev[:, idx], mid[:, idx], nxt[:, idx]
        pr_p = (gamma - 1.0) * (p3[2] - 0.5 * p3[1] ** 2 / p3[0])
        pr_n = (gamma - 1.0) * (n3[2] - 0.5 * n3[1] ** 2 / n3[0])
        star = gas_star_arrays(p3[0], p3[1] / p3[0], pr_p,
                               n3[0], n3[1] / n3[0], pr_n, gamma, tol=1e-14)

        if selection == "one-shot":
            fam = select_wave_full(p3, n3, star, gamma, c_cfl)
            bar_l, bar_r, sigma = _bars_and_sigma(fam, p3, n3, star, gamma)
            d = distances_full(bar_l, bar_r, m3, dx)
            acc = (fam != NONE) & accept_full(p3, m3, n3, bar_l, bar_r, d, dx)
        else:
            fam = np.full(idx.size, CONTACT, dtype=np.int8)
            bar_l, bar_r, sigma = _bars_and_sigma(fam, p3, n3, star, gamma)
            d = distances_full(bar_l, bar_r, m3, dx)
            range_ok = ((d[0] > 0.0) & (d[0] < dx)
                        & (d[2] > 0.0) & (d[2] < dx))
            acc = range_ok & accept_full(p3, m3, n3, bar_l, bar_r, d, dx)
            retry = ~range_ok
            if np.any(retry):
                fam2 = select_wave_full(p3, n3, star, gamma, c_cfl)
                fam2 = np.where(fam2 == CONTACT, NONE, fam2).astype(np.int8)
                fam2 = np.where(retry, fam2, NONE).astype(np.int8)
                bl2, br2, sg2 = _bars_and_sigma(fam2, p3, n3, star, gamma)
                d2 = distances_full(bl2, br2, m3, dx)
                acc2 = (fam2 != NONE) & accept_full(p3, m3, n3, bl2, br2, d2, dx)
                bar_l = np.where(acc2, bl2, bar_l)
                bar_r = np.where(acc2, br2, bar_r)
                sigma = np.where(acc2, sg2, sigma)
                d = np.where(acc2, d2, d)
                acc = acc | acc2

        sub = np.nonzero(acc)[0]
        n_accepted = int(sub.size)
        if sub.size:
            cols = idx[sub]
            bl, br, sg = bar_l[:, sub], bar_r[:, sub], sigma[sub]
            if side == "right":
                near, far = br, bl
            else:
                near, far = bl, br
            g_near = model.flux(near) - v_mesh * near
            g_far = model.flux(far) - v_mesh * far
            for k in range(3):
                # A component with equal bar states has no jump to place:
                # its coupling flux (the owner average) is left in place.
                ok = np.isfinite(d[k, sub])
                gap, rel = interface_gap_rel(d[k, sub][ok], sg[ok],
                                             v_mesh, dx, side)
                w = crossing_weight(gap, rel, dt)
                F[k, cols[ok]] = (w * g_near[k][ok]
                                  + (dt - w) * g_far[k][ok]) / dt
    if stats is not None:
        stats["accepted"] = n_accepted

    out = U - (dt / dx) * (F[:, 1:] - F[:, :-1])
    model.check_positive(out)
    return out
