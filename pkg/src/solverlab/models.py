"""Flux models: Burgers' scalar flux, isothermal Euler, ideal-gas Euler.

Fields are numpy arrays of shape (n_components, n_cells); the scalar model
uses a single row. All models expose the same small interface (flux, wave
speeds, primitive decompositions, entropy pair) so baseline schemes and the
harness can treat them uniformly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import PositivityError


@dataclass(frozen=True)
class ConvexFlux:
    """A strictly convex scalar flux with its derivative.

    ``sonic`` is the argmin of f (where f' vanishes), if known; the scalar
    Godunov flux locates it numerically otherwise.
    """

    f: Callable
    f_prime: Callable
    sonic: float | None = None


def burgers_flux(u):
    """Burgers' flux u^2/2 (derivative u)."""
    return 0.5 * np.asarray(u) ** 2 if np.ndim(u) else 0.5 * u * u


def burgers_flux_prime(u):
    return u


BURGERS = ConvexFlux(burgers_flux, burgers_flux_prime, sonic=0.0)


class BurgersModel:
    name = "burgers"
    n_comp = 1
    negate_rows: tuple[int, ...] = ()
    var_names = ("u",)

    def __init__(self, flux: ConvexFlux = BURGERS):
        self.convex_flux = flux

    def flux(self, U: np.ndarray) -> np.ndarray:
        return self.convex_flux.f(U)

    def max_abs_speed(self, U: np.ndarray) -> float:
        return float(np.max(np.abs(self.convex_flux.f_prime(U))))

    def speed_range(self, U: np.ndarray) -> tuple[float, float]:
        s = self.convex_flux.f_prime(U)
        return float(np.min(s)), float(np.max(s))

    def local_max_speeds(self, U: np.ndarray) -> np.ndarray:
        return np.abs(self.convex_flux.f_prime(U))

    def check_positive(self, U: np.ndarray, step_index: int | None = None) -> None:
        return None

    def primitives(self, U: np.ndarray) -> dict[str, np.ndarray]:
        return {"u": U[0]}

    def entropy(self, U: np.ndarray) -> np.ndarray:
        """Square entropy S = u^2/2 (flux u^3/3 for Burgers)."""
        return 0.5 * U[0] ** 2

    def entropy_flux(self, U: np.ndarray) -> np.ndarray:
        return U[0] ** 3 / 3.0


class IsothermalModel:
    """Isothermal Euler: conserved (rho, q), pressure p = c^2 rho."""

    name = "isothermal"
    n_comp = 2
    negate_rows = (1,)
    var_names = ("rho", "momentum")

    def __init__(self, c: float):
        if c <= 0.0:
            raise ValueError(f"sound speed must be positive, got {c}")
        self.c = float(c)

    def flux(self, U: np.ndarray) -> np.ndarray:
        rho, q = U[0], U[1]
        return np.stack([q, q * q / rho + self.c ** 2 * rho])

    def velocity(self, U: np.ndarray) -> np.ndarray:
        return U[1] / U[0]

    def max_abs_speed(self, U: np.ndarray) -> float:
        return float(np.max(np.abs(U[1] / U[0])) + self.c)

    def speed_range(self, U: np.ndarray) -> tuple[float, float]:
        u = U[1] / U[0]
        return float(np.min(u) - self.c), float(np.max(u) + self.c)

    def local_max_speeds(self, U: np.ndarray) -> np.ndarray:
        return np.abs(U[1] / U[0]) + self.c

    def check_positive(self, U: np.ndarray, step_index: int | None = None) -> None:
        if np.min(U[0]) <= 0.0 or not np.all(np.isfinite(U)):
            cell = int(np.argmin(U[0]))
            raise PositivityError(
                f"non-positive density {U[0, cell]:.6g} in cell {cell}",
                step_index=step_index, cell=cell, value=float(U[0, cell]))

    def primitives(self, U: np.ndarray) -> dict[str, np.ndarray]:
        return {"rho": U[0], "momentum": U[1], "velocity": U[1] / U[0]}

    def conserved(self, rho: np.ndarray, u: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        return np.stack([rho, rho * np.asarray(u, dtype=float)])

    def entropy(self, U: np.ndarray) -> np.ndarray:
        """Physical entropy S = q^2/(2 rho) + c^2 rho log(rho)
        (flux u (S + c^2 rho))."""
        rho, q = U[0], U[1]
        return 0.5 * q * q / rho + self.c ** 2 * rho * np.log(rho)

    def entropy_flux(self, U: np.ndarray) -> np.ndarray:
        return (U[1] / U[0]) * (self.entropy(U) + self.c ** 2 * U[0])


class IdealGasModel:
    """Full Euler with ideal-gas law p = (gamma - 1) rho e."""

    name = "gas"
    n_comp = 3
    negate_rows = (1,)
    var_names = ("rho", "momentum", "energy")

    def __init__(self, gamma: float):
        if gamma <= 1.0:
            raise ValueError(f"gamma must exceed 1, got {gamma}")
        self.gamma = float(gamma)

    def pressure(self, U: np.ndarray) -> np.ndarray:
        rho, q, E = U[0], U[1], U[2]
        return (self.gamma - 1.0) * (E - 0.5 * q * q / rho)

    def internal_energy(self, U: np.ndarray) -> np.ndarray:
        rho, q, E = U[0], U[1], U[2]
        return E / rho - 0.5 * (q / rho) ** 2

    def sound_speed(self, U: np.ndarray) -> np.ndarray:
        return np.sqrt(self.gamma * self.pressure(U) / U[0])

    def flux(self, U: np.ndarray) -> np.ndarray:
        rho, q, E = U[0], U[1], U[2]
        u = q / rho
        p = self.pressure(U)
        return np.stack([q, q * u + p, u * (E + p)])

    def velocity(self, U: np.ndarray) -> np.ndarray:
        return U[1] / U[0]

    def max_abs_speed(self, U: np.ndarray) -> float:
        return float(np.max(np.abs(U[1] / U[0]) + self.sound_speed(U)))

    def speed_range(self, U: np.ndarray) -> tuple[float, float]:
        u = U[1] / U[0]
        c = self.sound_speed(U)
        return float(np.min(u - c)), float(np.max(u + c))

    def local_max_speeds(self, U: np.ndarray) -> np.ndarray:
        return np.abs(U[1] / U[0]) + self.sound_speed(U)

    def check_positive(self, U: np.ndarray, step_index: int | None = None) -> None:
        bad_rho = np.min(U[0]) <= 0.0
        e = self.internal_energy(U) if not bad_rho else None
        if bad_rho or np.min(e) <= 0.0 or not np.all(np.isfinite(U)):
            cell = int(np.argmin(U[0] if bad_rho else e))
            what = "density" if bad_rho else "internal energy"
            val = float(U[0, cell] if bad_rho else e[cell])
            raise PositivityError(
                f"non-positive {what} {val:.6g} in cell {cell}",
                step_index=step_index, cell=cell, value=val)

    def primitives(self, U: np.ndarray) -> dict[str, np.ndarray]:
        p = self.pressure(U)
        return {"rho": U[0], "momentum": U[1], "energy": U[2],
                "velocity": U[1] / U[0], "pressure": p,
                "internal_energy": self.internal_energy(U)}

    def conserved(self, rho, u, p) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        u = np.asarray(u, dtype=float)
        p = np.asarray(p, dtype=float)
        E = p / (self.gamma - 1.0) + 0.5 * rho * u * u
        return np.stack([rho, rho * u, E])

    def entropy(self, U: np.ndarray) -> np.ndarray:
        """Physical entropy S = -rho log(p rho^-gamma)/(gamma-1) (flux u S)."""
        p = self.pressure(U)
        return -U[0] * np.log(p * U[0] ** -self.gamma) / (self.gamma - 1.0)

    def entropy_flux(self, U: np.ndarray) -> np.ndarray:
        return (U[1] / U[0]) * self.entropy(U)
