"""Exact Riemann solvers for the isothermal and ideal-gas systems.

Star states are found by Newton iteration on the wave-curve equations with
a maintained sign-change bracket, so every solve either converges to the
requested residual or raises. Samplers evaluate the self-similar solution
at x/t and are vectorized for use in Godunov fluxes and reference
profiles.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RiemannError, VacuumError

_MAX_ITER = 100


@dataclass(frozen=True)
class IsoState:
    """Primitive isothermal state."""

    rho: float
    u: float

    @property
    def q(self) -> float:
        return self.rho * self.u


@dataclass(frozen=True)
class IsoStar:
    """Intermediate state between the two isothermal waves."""

    rho: float
    u: float

    @property
    def q(self) -> float:
        return self.rho * self.u


@dataclass(frozen=True)
class GasState:
    """Primitive ideal-gas state."""

    rho: float
    u: float
    p: float


@dataclass(frozen=True)
class GasStar:
    """Star region of the ideal-gas Riemann problem.

    Pressure and velocity are shared; density jumps across the contact.
    """

    p: float
    u: float
    rho_left: float
    rho_right: float


def _iso_wave(rho_star, rho0, c):
    """Velocity drop along one isothermal wave curve.

    Shock branch for compression (rho_star > rho0), logarithmic
    rarefaction branch otherwise. Increasing in rho_star, C1 at rho0.
    """
    ratio = rho_star / rho0
    shock = c * (np.sqrt(ratio) - np.sqrt(1.0 / ratio))
    raref = c * np.log(ratio)
    return np.where(ratio > 1.0, shock, raref)


def _iso_wave_deriv(rho_star, rho0, c):
    ratio = rho_star / rho0
    shock = c / (2.0 * rho_star) * (np.sqrt(ratio) + np.sqrt(1.0 / ratio))
    raref = c / rho_star
    return np.where(ratio > 1.0, shock, raref)


def iso_star_arrays(rho_l, u_l, rho_r, u_r, c, tol=1e-13):
    """Star states of isothermal Riemann problems, elementwise.

    Solves W1(rho*, left) + W2(rho*, right) = u_l - u_r by bracketed
    Newton from the two-rarefaction estimate. The isothermal system never
    reaches vacuum for finite data, so a root always exists.
    """
    rho_l = np.asarray(rho_l, dtype=float)
    u_l = np.asarray(u_l, dtype=float)
    rho_r = np.asarray(rho_r, dtype=float)
    u_r = np.asarray(u_r, dtype=float)
    if np.any(rho_l <= 0.0) or np.any(rho_r <= 0.0) or not (
            np.all(np.isfinite(rho_l)) and np.all(np.isfinite(rho_r))
            and np.all(np.isfinite(u_l)) and np.all(np.isfinite(u_r))):
        raise RiemannError("isothermal Riemann data must have finite states "
                           "and positive densities")
    du = u_l - u_r

    # Two-rarefaction guess, exact when both waves expand. For collisions it
    # overshoots exponentially in du, so cap it with the strong-two-shock
    # estimate, which is polynomial and tight for violent data.
    rho = np.sqrt(rho_l * rho_r) * np.exp(du / (2.0 * c))
    inv_roots = 1.0 / np.sqrt(rho_l) + 1.0 / np.sqrt(rho_r)
    two_shock = (np.maximum(du, 0.0) / (c * inv_roots)) ** 2 \
        + np.maximum(rho_l, rho_r)
    rho = np.where(du > 0.0, np.minimum(rho, two_shock), rho)

    lo = np.full_like(rho, 1e-300)
    hi = np.maximum(rho, np.maximum(rho_l, rho_r)) * 2.0
    phi_hi = _iso_wave(hi, rho_l, c) + _iso_wave(hi, rho_r, c) - du
    while np.any(phi_hi < 0.0):
        hi = np.where(phi_hi < 0.0, hi * 4.0, hi)
        phi_hi = _iso_wave(hi, rho_l, c) + _iso_wave(hi, rho_r, c) - du
    rho = np.clip(rho, lo, hi)

    # The residual is in velocity units; its attainable size scales with the
    # data, and a bracket of adjacent floats cannot improve further.
    scale = np.maximum(1.0, np.maximum(np.abs(du),
                                       c * np.abs(np.log(rho_l / rho_r))))
    eps = np.finfo(float).eps
    for _ in range(_MAX_ITER):
        phi = _iso_wave(rho, rho_l, c) + _iso_wave(rho, rho_r, c) - du
        done = (np.abs(phi) <= tol * scale) | (hi - lo <= 4.0 * eps * rho)
        if np.all(done):
            break
        lo = np.where(phi < 0.0, rho, lo)
        hi = np.where(phi > 0.0, rho, hi)
        dphi = _iso_wave_deriv(rho, rho_l, c) + _iso_wave_deriv(rho, rho_r, c)
        cand = rho - phi / dphi
        rho = np.where((cand > lo) & (cand < hi), cand, 0.5 * (lo + hi))
    else:
        worst = float(np.max(np.abs(phi)))
        raise RiemannError(
            f"isothermal star iteration stalled, residual {worst:.3e}")
    u_star = 0.5 * (u_l + u_r) + 0.5 * (_iso_wave(rho, rho_r, c)
                                        - _iso_wave(rho, rho_l, c))
    return rho, u_star


def iso_star(left: IsoState, right: IsoState, c: float) -> IsoStar:
    rho, u = iso_star_arrays(left.rho, left.u, right.rho, right.u, c)
    return IsoStar(float(rho), float(u))


def iso_shock_speed(family: int, ahead: IsoState, rho_star: float, c: float) -> float:
    """Speed of an isothermal shock from the state ahead of it.

    Family 1 runs into the left (pre-shock) state, family 2 into the
    right; both follow from mass conservation across the jump.
    """
    root = c * np.sqrt(rho_star / ahead.rho)
    if family == 1:
        return float(ahead.u - root)
    if family == 2:
        return float(ahead.u + root)
    raise ValueError(f"family must be 1 or 2, got {family!r}")


def sample_iso_arrays(rho_l, u_l, rho_r, u_r, rho_s, u_s, c, xi):
    """Self-similar isothermal solution at xi = x/t, elementwise.

    States and xi broadcast against each other, so this serves both a
    single problem probed at many points and many interface problems
    probed at one point.
    """
    xi = np.asarray(xi, dtype=float)
    # 1-wave side. Fan formulas are evaluated everywhere, so clip their
    # arguments; out-of-fan values are discarded by the selectors.
    s1 = u_l - c * np.sqrt(rho_s / rho_l)
    u_fan1 = xi + c
    rho_fan1 = rho_l * np.exp(np.clip((u_l - u_fan1) / c, -700.0, 700.0))
    raref1_rho = np.where(xi < u_l - c, rho_l,
                          np.where(xi > u_s - c, rho_s, rho_fan1))
    raref1_u = np.where(xi < u_l - c, u_l,
                        np.where(xi > u_s - c, u_s, u_fan1))
    shock1 = rho_s > rho_l
    left_rho = np.where(shock1, np.where(xi < s1, rho_l, rho_s), raref1_rho)
    left_u = np.where(shock1, np.where(xi < s1, u_l, u_s), raref1_u)

    # 2-wave side, mirrored.
    s2 = u_r + c * np.sqrt(rho_s / rho_r)
    u_fan2 = xi - c
    rho_fan2 = rho_r * np.exp(np.clip((u_fan2 - u_r) / c, -700.0, 700.0))
    raref2_rho = np.where(xi > u_r + c, rho_r,
                          np.where(xi < u_s + c, rho_s, rho_fan2))
    raref2_u = np.where(xi > u_r + c, u_r,
                        np.where(xi < u_s + c, u_s, u_fan2))
    shock2 = rho_s > rho_r
    right_rho = np.where(shock2, np.where(xi > s2, rho_r, rho_s), raref2_rho)
    right_u = np.where(shock2, np.where(xi > s2, u_r, u_s), raref2_u)

    on_left = xi < u_s
    return np.where(on_left, left_rho, right_rho), \
        np.where(on_left, left_u, right_u)


def sample_iso(left: IsoState, right: IsoState, star: IsoStar, c: float, xi):
    """Evaluate the self-similar isothermal solution at xi = x/t."""
    rho, u = sample_iso_arrays(left.rho, left.u, right.rho, right.u,
                               star.rho, star.u, c, xi)
    if np.ndim(rho) == 0:
        return float(rho), float(u)
    return rho, u


def _gas_pressure_fn(p, rho_k, p_k, c_k, gamma):
    """Toro's pressure function for one side and its derivative."""
    a_k = 2.0 / ((gamma + 1.0) * rho_k)
    b_k = (gamma - 1.0) / (gamma + 1.0) * p_k
    shock = p > p_k
    root = np.sqrt(a_k / (p + b_k))
    f_shock = (p - p_k) * root
    df_shock = root * (1.0 - 0.5 * (p - p_k) / (p + b_k))
    z = (gamma - 1.0) / (2.0 * gamma)
    ratio = np.maximum(p, 0.0) / p_k
    f_rare = 2.0 * c_k / (gamma - 1.0) * (ratio ** z - 1.0)
    df_rare = ratio ** (-(gamma + 1.0) / (2.0 * gamma)) / (rho_k * c_k)
    return np.where(shock, f_shock, f_rare), np.where(shock, df_shock, df_rare)


def gas_star_arrays(rho_l, u_l, p_l, rho_r, u_r, p_r, gamma, tol=1e-13):
    """Star pressure, velocity and side densities, elementwise.

    Bracketed Newton on f_L(p) + f_R(p) + (u_r - u_l) = 0 from the
    two-rarefaction estimate. Raises VacuumError when the data pull apart
    faster than the rarefactions can fill.
    """
    rho_l = np.asarray(rho_l, dtype=float)
    u_l = np.asarray(u_l, dtype=float)
    p_l = np.asarray(p_l, dtype=float)
    rho_r = np.asarray(rho_r, dtype=float)
    u_r = np.asarray(u_r, dtype=float)
    p_r = np.asarray(p_r, dtype=float)
    if np.any(rho_l <= 0.0) or np.any(rho_r <= 0.0) or np.any(p_l <= 0.0) \
            or np.any(p_r <= 0.0):
        raise RiemannError("gas Riemann data must have positive density "
                           "and pressure")
    c_l = np.sqrt(gamma * p_l / rho_l)
    c_r = np.sqrt(gamma * p_r / rho_r)
    du = u_r - u_l
    gap = 2.0 / (gamma - 1.0) * (c_l + c_r) - du
    if np.any(gap <= 0.0):
        raise VacuumError("Riemann data admit a vacuum region")

    z = (gamma - 1.0) / (2.0 * gamma)
    p = ((c_l + c_r - 0.5 * (gamma - 1.0) * du)
         / (c_l / p_l ** z + c_r / p_r ** z)) ** (1.0 / z)
    p = np.maximum(p, 1e-14 * np.minimum(p_l, p_r))
    lo = np.full_like(p, 1e-300)
    hi = np.maximum(p, np.maximum(p_l, p_r)) * 2.0
    f_hi = (_gas_pressure_fn(hi, rho_l, p_l, c_l, gamma)[0]
            + _gas_pressure_fn(hi, rho_r, p_r, c_r, gamma)[0] + du)
    while np.any(f_hi < 0.0):
        hi = np.where(f_hi < 0.0, hi * 4.0, hi)
        f_hi = (_gas_pressure_fn(hi, rho_l, p_l, c_l, gamma)[0]
                + _gas_pressure_fn(hi, rho_r, p_r, c_r, gamma)[0] + du)
    p = np.clip(p, lo, hi)

    scale = np.maximum(1.0, np.maximum(np.abs(u_l) + c_l, np.abs(u_r) + c_r))
    for _ in range(_MAX_ITER):
        fl, dfl = _gas_pressure_fn(p, rho_l, p_l, c_l, gamma)
        fr, dfr = _gas_pressure_fn(p, rho_r, p_r, c_r, gamma)
        f = fl + fr + du
        if np.all(np.abs(f) <= tol * scale):
            break
        lo = np.where(f < 0.0, p, lo)
        hi = np.where(f > 0.0, p, hi)
        cand = p - f / (dfl + dfr)
        p = np.where((cand > lo) & (cand < hi), cand, 0.5 * (lo + hi))
    else:
        worst = float(np.max(np.abs(f)))
        raise RiemannError(f"gas star iteration stalled, residual {worst:.3e}")

    u_star = 0.5 * (u_l + u_r) + 0.5 * (fr - fl)
    beta = (gamma - 1.0) / (gamma + 1.0)
    rl = p / p_l
    rho_l_star = np.where(rl > 1.0,
                          rho_l * (rl + beta) / (beta * rl + 1.0),
                          rho_l * rl ** (1.0 / gamma))
    rr = p / p_r
    rho_r_star = np.where(rr > 1.0,
                          rho_r * (rr + beta) / (beta * rr + 1.0),
                          rho_r * rr ** (1.0 / gamma))
    return p, u_star, rho_l_star, rho_r_star


def gas_star(left: GasState, right: GasState, gamma: float) -> GasStar:
    p, u, rls, rrs = gas_star_arrays(left.rho, left.u, left.p,
                                     right.rho, right.u, right.p, gamma)
    return GasStar(float(p), float(u), float(rls), float(rrs))


def sample_gas_arrays(rho_l, u_l, p_l, rho_r, u_r, p_r, star, gamma, xi):
    """Self-similar ideal-gas solution at xi = x/t, elementwise.

    star is the (p, u, rho_left, rho_right) tuple as produced by
    gas_star_arrays. States and xi broadcast against each other.
    """
    p_s, u_s, rho_sl, rho_sr = star
    xi = np.asarray(xi, dtype=float)
    c_l = np.sqrt(gamma * p_l / rho_l)
    c_r = np.sqrt(gamma * p_r / rho_r)
    g1 = (gamma - 1.0) / 2.0
    g2 = 2.0 / (gamma + 1.0)
    zs = (gamma + 1.0) / (2.0 * gamma)
    zr = (gamma - 1.0) / (2.0 * gamma)

    # Left of the contact: shock or rarefaction against the left state.
    sl = u_l - c_l * np.sqrt(zs * p_s / p_l + zr)
    cs_l = c_l * (p_s / p_l) ** zr
    c_fan = np.maximum(g2 * (c_l + g1 * (u_l - xi)), 1e-300)
    u_fan = g2 * (c_l + g1 * u_l + xi)
    rho_fan = rho_l * (c_fan / c_l) ** (2.0 / (gamma - 1.0))
    p_fan = p_l * (c_fan / c_l) ** (2.0 * gamma / (gamma - 1.0))
    in_l = xi < u_l - c_l
    out_l = xi > u_s - cs_l
    raref = (np.where(in_l, rho_l, np.where(out_l, rho_sl, rho_fan)),
             np.where(in_l, u_l, np.where(out_l, u_s, u_fan)),
             np.where(in_l, p_l, np.where(out_l, p_s, p_fan)))
    shock = (np.where(xi < sl, rho_l, rho_sl),
             np.where(xi < sl, u_l, u_s),
             np.where(xi < sl, p_l, p_s))
    is_shock = p_s > p_l
    left = [np.where(is_shock, s, r) for s, r in zip(shock, raref)]

    # Right of the contact, mirrored.
    sr = u_r + c_r * np.sqrt(zs * p_s / p_r + zr)
    cs_r = c_r * (p_s / p_r) ** zr
    c_fan = np.maximum(g2 * (c_r - g1 * (u_r - xi)), 1e-300)
    u_fan = g2 * (-c_r + g1 * u_r + xi)
    rho_fan = rho_r * (c_fan / c_r) ** (2.0 / (gamma - 1.0))
    p_fan = p_r * (c_fan / c_r) ** (2.0 * gamma / (gamma - 1.0))
    in_r = xi > u_r + c_r
    out_r = xi < u_s + cs_r
    raref = (np.where(in_r, rho_r, np.where(out_r, rho_sr, rho_fan)),
             np.where(in_r, u_r, np.where(out_r, u_s, u_fan)),
             np.where(in_r, p_r, np.where(out_r, p_s, p_fan)))
    shock = (np.where(xi > sr, rho_r, rho_sr),
             np.where(xi > sr, u_r, u_s),
             np.where(xi > sr, p_r, p_s))
    is_shock = p_s > p_r
    right = [np.where(is_shock, s, r) for s, r in zip(shock, raref)]

    on_left = xi < u_s
    return tuple(np.where(on_left, l, r) for l, r in zip(left, right))


def sample_gas(left: GasState, right: GasState, star: GasStar, gamma: float, xi):
    """Evaluate the self-similar ideal-gas solution at xi = x/t."""
    rho, u, p = sample_gas_arrays(
        left.rho, left.u, left.p, right.rho, right.u, right.p,
        (star.p, star.u, star.rho_left, star.rho_right), gamma, xi)
    if np.ndim(rho) == 0:
        return float(rho), float(u), float(p)
    return rho, u, p


def rh_residual(upstream, downstream, sigma, *, c=None, gamma=None):
    """Jump-condition residuals |sigma [U] - [F]| across a discontinuity.

    Dispatches on the state type: IsoState pairs need c, GasState pairs
    need gamma. Returns one residual per conservation law.
    """
    if isinstance(upstream, IsoState):
        if c is None:
            raise ValueError("isothermal residuals need the sound speed c")
        dr = downstream.rho - upstream.rho
        dq = downstream.q - upstream.q
        f2 = lambda s: s.rho * s.u * s.u + c * c * s.rho
        return np.array([abs(sigma * dr - dq),
                         abs(sigma * dq - (f2(downstream) - f2(upstream)))])
    if isinstance(upstream, GasState):
        if gamma is None:
            raise ValueError("gas residuals need gamma")
        energy = lambda s: s.p / (gamma - 1.0) + 0.5 * s.rho * s.u * s.u
        dr = downstream.rho - upstream.rho
        dq = downstream.rho * downstream.u - upstream.rho * upstream.u
        de = energy(downstream) - energy(upstream)
        f2 = lambda s: s.rho * s.u * s.u + s.p
        f3 = lambda s: s.u * (energy(s) + s.p)
        return np.array([abs(sigma * dr - dq),
                         abs(sigma * dq - (f2(downstream) - f2(upstream))),
                         abs(sigma * de - (f3(downstream) - f3(upstream)))])
    raise TypeError(f"unsupported state type {type(upstream).__name__}")
