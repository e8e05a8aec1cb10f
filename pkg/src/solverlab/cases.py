"""Named benchmark registry.

Each entry freezes one experiment: model, initial data, domain, boundary
handling, default resolution / CFL / scheme, and the kind of reference
profile errors are measured against. Initial fields are exact cell
averages of the underlying data, so changing the resolution rediscretizes
the same problem instead of sampling it differently.

Reference kinds:

* ``exact-shock``       piecewise-constant exact solution built from
                        jump-condition-verified discontinuities
* ``exact-compression`` closed-form solution of the steepening-ramp case
* ``fine-nt``           fine-grid staggered-central run, conservatively
                        restricted (see ``harness.reference_fine_grid``)
* ``none``              no reference; runs report diagnostics only
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import RiemannError, UsageError
from .grid import (BoundaryCondition, GridSpec, PiecewiseProfile,
                   average_profile, init_cell_averages)
from .riemann import (GasState, IsoState, gas_star, iso_shock_speed,
                      iso_star, rh_residual)
from .scalar import exact_compression

REFERENCE_KINDS = ("exact-shock", "exact-compression", "fine-nt", "none")

_TRANSMISSIVE = BoundaryCondition.from_name("transmissive")
_REFLECTIVE = BoundaryCondition.from_name("reflective")
_WALL_RIGHT = BoundaryCondition.from_name("reflective-wall-right")

# Slow isothermal shock used by several cases: speed 0.1, density 1 -> 20,
# c = 0.5. Velocities follow from the jump conditions.
ISO_C = 0.5
ISO_SHOCK_SPEED = 0.1
_ISO_UL = 0.1 + 0.5 * math.sqrt(20.0)
_ISO_UR = 0.1 + 0.5 / math.sqrt(20.0)


@dataclass(frozen=True)
class CaseSpec:
    """One registry entry.

    ``init(grid)`` returns the initial cell averages with one row per
    conserved component. ``exact(t, grid)``, when present, evaluates the
    reference solution as cell averages on an arbitrary grid (the driver
    passes the offset grid of a moving-mesh run, so comparisons never
    smear through interpolation).
    """

    name: str
    model: str                     # burgers | isothermal | gas
    summary: str
    x_min: float
    x_max: float
    t_end: float
    bc: BoundaryCondition
    cells: int
    cfl: float
    scheme: str
    mesh: str                      # alternate | stationary
    reference: str
    init: Callable[[GridSpec], np.ndarray]
    exact: Callable[[float, GridSpec], np.ndarray] | None = None
    gamma: float | None = None
    c_sound: float | None = None
    snapshots: tuple[float, ...] = ()
    left: tuple | None = None      # primitive states of the initial jump
    right: tuple | None = None
    x0: float | None = None

    def grid(self, cells: int | None = None) -> GridSpec:
        return GridSpec(self.x_min, self.x_max, int(cells or self.cells))


def _stack_init(profiles) -> Callable[[GridSpec], np.ndarray]:
    def init(grid: GridSpec) -> np.ndarray:
        return np.stack([init_cell_averages(p, grid) for p in profiles])
    return init


def _gas_conserved(state: tuple[float, float, float],
                   gamma: float) -> tuple[float, float, float]:
    rho, u, p = state
    return rho, rho * u, p / (gamma - 1.0) + 0.5 * rho * u * u


def _burgers_shock_exact(u_left: float, u_right: float, sigma: float,
                         x0: float) -> Callable[[float, GridSpec], np.ndarray]:
    flux = lambda u: 0.5 * u * u
    resid = abs(sigma * (u_right - u_left) - (flux(u_right) - flux(u_left)))
    if resid > 1e-10:
        raise RiemannError(f"jump conditions violated, residual {resid:.3e}")

    def exact(t: float, grid: GridSpec) -> np.ndarray:
        prof = PiecewiseProfile.step(x0 + sigma * t, u_left, u_right)
        return init_cell_averages(prof, grid)[None, :]

    return exact


def _iso_pure_shock_exact(left: IsoState, right: IsoState, sigma: float,
                          c: float, x0: float
                          ) -> Callable[[float, GridSpec], np.ndarray]:
    """Single isothermal shock translating at speed sigma. Verified against
    the jump conditions once, at registry build time."""
    resid = float(np.max(rh_residual(left, right, sigma, c=c)))
    if resid > 1e-10:
        raise RiemannError(f"jump conditions violated, residual {resid:.3e}")

    def exact(t: float, grid: GridSpec) -> np.ndarray:
        pos = x0 + sigma * t
        rows = [PiecewiseProfile.step(pos, left.rho, right.rho),
                PiecewiseProfile.step(pos, left.q, right.q)]
        return np.stack([init_cell_averages(p, grid) for p in rows])

    return exact


def _compression_init(grid: GridSpec) -> np.ndarray:
    vals = average_profile(lambda x: exact_compression(0.0, x),
                           grid, (-3.0, -1.0))
    return vals[None, :]


def _compression_exact(t: float, grid: GridSpec) -> np.ndarray:
    if t < 1.0:
        breaks = (-3.0 + 3.0 * t, -1.0 + t)
    else:
        breaks = (2.0 * (t - 1.0),)
    vals = average_profile(lambda x: exact_compression(t, x), grid, breaks)
    return vals[None, :]


class _IsoRiemannExact:
    """Exact cell averages for isothermal Riemann data whose solution is
    piecewise constant (every wave a shock). Lazily solves the star state
    and verifies each jump before first use."""

    def __init__(self, left: IsoState, right: IsoState, c: float, x0: float):
        self.left, self.right, self.c, self.x0 = left, right, c, x0
        self._waves = None

    def _solve(self):
        if self._waves is None:
            star = iso_star(self.left, self.right, self.c)
            if star.rho < self.left.rho or star.rho < self.right.rho:
                raise RiemannError(
                    "exact-shock reference needs an all-shock solution")
            mid = IsoState(star.rho, star.u)
            s1 = iso_shock_speed(1, self.left, star.rho, self.c)
            s2 = iso_shock_speed(2, self.right, star.rho, self.c)
            for ahead, behind, s in ((self.left, mid, s1),
                                     (self.right, mid, s2)):
                worst = float(np.max(rh_residual(ahead, behind, s, c=self.c)))
                if worst > 1e-10:
                    raise RiemannError(
                        f"jump conditions violated, residual {worst:.3e}")
            self._waves = (mid, s1, s2)
        return self._waves

    def __call__(self, t: float, grid: GridSpec) -> np.ndarray:
        mid, s1, s2 = self._solve()
        b1, b2 = self.x0 + s1 * t, self.x0 + s2 * t
        l, r = self.left, self.right
        if b2 - b1 > 0.0:
            rows = [PiecewiseProfile((b1, b2), (l.rho, mid.rho, r.rho)),
                    PiecewiseProfile((b1, b2), (l.q, mid.q, r.q))]
        else:
            rows = [PiecewiseProfile.step(self.x0, l.rho, r.rho),
                    PiecewiseProfile.step(self.x0, l.q, r.q)]
        return np.stack([init_cell_averages(p, grid) for p in rows])


class _GasTwoShockExact:
    """Exact cell averages for ideal-gas Riemann data whose acoustic waves
    are both shocks (collision problems). The contact sits between them;
    waves outside the grid are harmless, which also covers mirror-image
    wall problems where only one shock is inside the domain."""

    def __init__(self, left: tuple, right: tuple, gamma: float, x0: float):
        self.left, self.right, self.gamma, self.x0 = left, right, gamma, x0
        self._waves = None

    def _solve(self):
        if self._waves is None:
            gamma = self.gamma
            sl = GasState(*self.left)
            sr = GasState(*self.right)
            star = gas_star(sl, sr, gamma)
            if star.p < max(sl.p, sr.p) * (1.0 - 1e-12):
                raise RiemannError(
                    "exact-shock reference needs an all-shock solution")
            behind_l = GasState(star.rho_left, star.u, star.p)
            behind_r = GasState(star.rho_right, star.u, star.p)
            # Shock speeds from mass conservation across each front.
            s1 = ((sl.rho * sl.u - behind_l.rho * behind_l.u)
                  / (sl.rho - behind_l.rho))
            s3 = ((sr.rho * sr.u - behind_r.rho * behind_r.u)
                  / (sr.rho - behind_r.rho))
            for ahead, behind, s in ((sl, behind_l, s1), (sr, behind_r, s3)):
                worst = float(np.max(rh_residual(ahead, behind, s,
                                                 gamma=gamma)))
                if worst > 1e-10 * max(1.0, ahead.p, behind.p):
                    raise RiemannError(
                        f"jump conditions violated, residual {worst:.3e}")
            self._waves = (behind_l, behind_r, s1, s3)
        return self._waves

    def __call__(self, t: float, grid: GridSpec) -> np.ndarray:
        behind_l, behind_r, s1, s3 = self._solve()
        gamma = self.gamma
        sl = GasState(*self.left)
        sr = GasState(*self.right)
        states = [sl, behind_l, behind_r, sr]
        breaks = [self.x0 + s1 * t, self.x0 + behind_l.u * t,
                  self.x0 + s3 * t]
        # Drop degenerate intervals (t = 0, or an invisible contact).
        keep_states = [states[0]]
        keep_breaks: list[float] = []
        for b, st in zip(breaks, states[1:]):
            if keep_breaks and not b > keep_breaks[-1]:
                keep_states[-1] = st
            else:
                keep_breaks.append(b)
                keep_states.append(st)
        cons = [_gas_conserved((s.rho, s.u, s.p), gamma) for s in keep_states]
        rows = []
        for comp in range(3):
            vals = tuple(c[comp] for c in cons)
            if keep_breaks:
                rows.append(PiecewiseProfile(tuple(keep_breaks), vals))
            else:
                rows.append(PiecewiseProfile.constant(vals[0]))
        return np.stack([init_cell_averages(p, grid) for p in rows])


def _shock_sine_init(grid: GridSpec) -> np.ndarray:
    gamma = 1.4
    rho_l, u_l, p_l = 3.897143, 2.629369, 10.33333
    rho = average_profile(
        lambda x: np.where(x < -4.0, rho_l, 1.0 + 0.2 * np.sin(5.0 * x)),
        grid, (-4.0,))
    q = init_cell_averages(PiecewiseProfile.step(-4.0, rho_l * u_l, 0.0), grid)
    e_l = p_l / (gamma - 1.0) + 0.5 * rho_l * u_l * u_l
    e_r = 1.0 / (gamma - 1.0)
    en = init_cell_averages(PiecewiseProfile.step(-4.0, e_l, e_r), grid)
    return np.stack([rho, q, en])


def _riemann_init(x0: float, left_rows, right_rows):
    profiles = [PiecewiseProfile.step(x0, l, r)
                for l, r in zip(left_rows, right_rows)]
    return _stack_init(profiles)


def _iso_riemann_init(x0: float, left: IsoState, right: IsoState):
    return _riemann_init(x0, (left.rho, left.q), (right.rho, right.q))


def _gas_riemann_init(x0: float, left: tuple, right: tuple, gamma: float):
    return _riemann_init(x0, _gas_conserved(left, gamma),
                         _gas_conserved(right, gamma))


def _blast_init(grid: GridSpec) -> np.ndarray:
    gamma = 1.4
    e = tuple(p / (gamma - 1.0) for p in (1000.0, 0.01, 100.0))
    rows = [PiecewiseProfile.constant(1.0),
            PiecewiseProfile.constant(0.0),
            PiecewiseProfile((0.1, 0.9), e)]
    return np.stack([init_cell_averages(p, grid) for p in rows])


def _build_registry() -> dict[str, CaseSpec]:
    cases = []

    # -- scalar ----------------------------------------------------------
    cases.append(CaseSpec(
        name="burgers-pure-shock",
        model="burgers",
        summary="single Burgers shock 3 -> 1 starting on a cell interface",
        x_min=-1.0, x_max=3.0, t_end=0.5,
        bc=_TRANSMISSIVE, cells=100, cfl=0.4,
        scheme="rec", mesh="stationary", reference="exact-shock",
        init=_riemann_init(0.2, (3.0,), (1.0,)),
        exact=_burgers_shock_exact(3.0, 1.0, 2.0, 0.2),
        left=(3.0,), right=(1.0,), x0=0.2,
    ))

    cases.append(CaseSpec(
        name="compression",
        model="burgers",
        summary="linear ramp 3 -> 1 steepening into a shock at t = 1",
        x_min=-4.0, x_max=2.0, t_end=2.0,
        bc=_TRANSMISSIVE, cells=100, cfl=0.4,
        scheme="rec", mesh="stationary", reference="exact-compression",
        init=_compression_init,
        exact=_compression_exact,
        snapshots=(1.0,),
    ))

    # -- isothermal ------------------------------------------------------
    iso_l = IsoState(1.0, _ISO_UL)
    iso_r = IsoState(20.0, _ISO_UR)
    cases.append(CaseSpec(
        name="iso-sms-pure",
        model="isothermal",
        summary="slow isothermal shock (speed 0.1, density 1 -> 20) built "
                "from the jump conditions",
        x_min=-1.0, x_max=1.0, t_end=1.0,
        bc=_TRANSMISSIVE, cells=200, cfl=0.45,
        scheme="rec", mesh="alternate", reference="exact-shock",
        c_sound=ISO_C,
        init=_iso_riemann_init(0.0, iso_l, iso_r),
        exact=_iso_pure_shock_exact(iso_l, iso_r, ISO_SHOCK_SPEED, ISO_C, 0.0),
        left=(iso_l.rho, iso_l.u), right=(iso_r.rho, iso_r.u), x0=0.0,
    ))

    smsr_l = IsoState(1.0, 2.6361)
    smsr_r = IsoState(20.0, 1.2361 / 20.0)
    cases.append(CaseSpec(
        name="iso-sms-riemann",
        model="isothermal",
        summary="isothermal Riemann data breaking into two shocks, one of "
                "them slow",
        x_min=-0.5, x_max=1.5, t_end=2.0,
        bc=_TRANSMISSIVE, cells=200, cfl=0.45,
        scheme="rec", mesh="alternate", reference="exact-shock",
        c_sound=ISO_C,
        init=_iso_riemann_init(0.0, smsr_l, smsr_r),
        exact=_IsoRiemannExact(smsr_l, smsr_r, ISO_C, 0.0),
        left=(smsr_l.rho, smsr_l.u), right=(smsr_r.rho, smsr_r.u), x0=0.0,
    ))

    isr_l = IsoState(1.0, 0.5)
    isr_r = IsoState(4.0, 0.1)
    cases.append(CaseSpec(
        name="iso-shock-rarefaction",
        model="isothermal",
        summary="mixed-wave isothermal Riemann problem (shock plus "
                "rarefaction) for flux-coupling comparisons",
        x_min=-1.0, x_max=1.0, t_end=1.0,
        bc=_TRANSMISSIVE, cells=100, cfl=0.1,
        scheme="rec+nt", mesh="alternate", reference="none",
        c_sound=ISO_C,
        init=_iso_riemann_init(0.0, isr_l, isr_r),
        left=(isr_l.rho, isr_l.u), right=(isr_r.rho, isr_r.u), x0=0.0,
    ))

    # -- ideal gas -------------------------------------------------------
    toro_l = (5.99924, 19.5975, 460.894)
    toro_r = (5.99242, -6.19633, 46.0950)
    cases.append(CaseSpec(
        name="gas-toro",
        model="gas",
        summary="colliding-flow shock tube with two strong shocks and a "
                "contact",
        x_min=0.0, x_max=1.0, t_end=0.035,
        bc=_TRANSMISSIVE, cells=400, cfl=0.4,
        scheme="rec+nt", mesh="alternate", reference="fine-nt",
        gamma=1.4,
        init=_gas_riemann_init(0.5, toro_l, toro_r, 1.4),
        left=toro_l, right=toro_r, x0=0.5,
    ))

    cases.append(CaseSpec(
        name="blast",
        model="gas",
        summary="two interacting blast waves between reflecting walls",
        x_min=0.0, x_max=1.0, t_end=0.038,
        bc=_REFLECTIVE, cells=400, cfl=0.45,
        scheme="rec+nt", mesh="alternate", reference="fine-nt",
        gamma=1.4,
        init=_blast_init,
        snapshots=(0.026,),
    ))

    cases.append(CaseSpec(
        name="shock-sine",
        model="gas",
        summary="shock running into a sinusoidal density field "
                "(entropy-wave interaction)",
        x_min=-5.0, x_max=5.0, t_end=1.8,
        bc=_TRANSMISSIVE, cells=400, cfl=0.45,
        scheme="rec+nt", mesh="alternate", reference="fine-nt",
        gamma=1.4,
        init=_shock_sine_init,
        left=(3.897143, 2.629369, 10.33333), x0=-4.0,
    ))

    sms_l = (3.86, -0.81, 10.33)
    sms_r = (1.05, -3.44, 1.05)
    cases.append(CaseSpec(
        name="gas-sms",
        model="gas",
        summary="slowly-moving gas shock with a following rarefaction and "
                "contact",
        x_min=-1.0, x_max=1.0, t_end=0.3,
        bc=_TRANSMISSIVE, cells=800, cfl=0.3,
        scheme="rec+nt", mesh="alternate", reference="none",
        gamma=1.4,
        init=_gas_riemann_init(0.0, sms_l, sms_r, 1.4),
        left=sms_l, right=sms_r, x0=0.0,
    ))

    wall_l = (1.0, 4.0, 1.0)
    wall_r = (1.0, -4.0, 1.0)
    cases.append(CaseSpec(
        name="wall-symmetric",
        model="gas",
        summary="head-on collision of two identical streams (stationary "
                "contact at the midpoint)",
        x_min=-0.5, x_max=0.5, t_end=0.1,
        bc=_TRANSMISSIVE, cells=200, cfl=0.4,
        scheme="rec", mesh="alternate", reference="exact-shock",
        gamma=5.0 / 3.0,
        init=_gas_riemann_init(0.0, wall_l, wall_r, 5.0 / 3.0),
        exact=_GasTwoShockExact(wall_l, wall_r, 5.0 / 3.0, 0.0),
        left=wall_l, right=wall_r, x0=0.0,
    ))

    refl = (1.0, 1.0, 0.001)
    mirror = (1.0, -1.0, 0.001)
    cases.append(CaseSpec(
        name="wall-reflect",
        model="gas",
        summary="cold supersonic stream reflecting off the right wall",
        x_min=0.0, x_max=1.0, t_end=1.6,
        bc=_WALL_RIGHT, cells=1000, cfl=0.45,
        scheme="rec", mesh="alternate", reference="exact-shock",
        gamma=5.0 / 3.0,
        init=_gas_riemann_init(1.0, refl, refl, 5.0 / 3.0),
        # Solution equals the mirror-image Riemann problem centred on the
        # wall; only its left-moving shock lies inside the domain.
        exact=_GasTwoShockExact(refl, mirror, 5.0 / 3.0, 1.0),
        left=refl, right=mirror, x0=1.0,
    ))

    return {c.name: c for c in cases}


CASES: dict[str, CaseSpec] = _build_registry()


def get_case(name: str) -> CaseSpec:
    try:
        return CASES[name]
    except KeyError:
        known = ", ".join(sorted(CASES))
        raise UsageError(f"unknown case {name!r}; known cases: {known}")


def momentum_plateaus(case: CaseSpec) -> tuple[float, ...] | None:
    """Momentum values of the constant states (including star states) of a
    case's Riemann solution; None when the case is not a Riemann problem."""
    if case.left is None or case.right is None:
        return None
    if case.model == "burgers":
        return (case.left[0], case.right[0])
    if case.model == "isothermal":
        l = IsoState(*case.left)
        r = IsoState(*case.right)
        star = iso_star(l, r, case.c_sound)
        return (l.q, star.q, r.q)
    if case.model == "gas":
        l = GasState(*case.left)
        r = GasState(*case.right)
        star = gas_star(l, r, case.gamma)
        return (l.rho * l.u, star.rho_left * star.u,
                star.rho_right * star.u, r.rho * r.u)
    return None
