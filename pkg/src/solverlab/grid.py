"""Uniform reference grid, alternating mesh bookkeeping, ghosts and averaging.

The moving mesh is represented as the fixed reference grid plus a scalar
``net_offset``: every interface moves by ``v_mesh * dt`` during a step, the
sign of ``v_mesh`` alternates with the step parity, and the field is remapped
back onto the reference grid only when an output is requested while the
offset is nonzero.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import StaticFieldError

_GL_NODES, _GL_WEIGHTS = leggauss(5)

_BC_KINDS = ("transmissive", "periodic", "reflective")


@dataclass(frozen=True)
class GridSpec:
    """Uniform cell-centered grid on [x_min, x_max] with n_cells cells."""

    x_min: float
    x_max: float
    n_cells: int

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ValueError(f"empty domain: [{self.x_min}, {self.x_max}]")
        if self.n_cells < 1:
            raise ValueError(f"n_cells must be positive, got {self.n_cells}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    def interfaces(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_cells + 1)

    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx


@dataclass(frozen=True)
class BoundaryCondition:
    """Per-side boundary kind; periodic must be used on both sides."""

    left: str = "transmissive"
    right: str = "transmissive"

    def __post_init__(self):
        for side in (self.left, self.right):
            if side not in _BC_KINDS:
                raise ValueError(f"unknown boundary kind {side!r}")
        if ("periodic" in (self.left, self.right)) and self.left != self.right:
            raise ValueError("periodic boundaries must be two-sided")

    @property
    def is_periodic(self) -> bool:
        return self.left == "periodic"

    @classmethod
    def from_name(cls, name: str) -> "BoundaryCondition":
        """Accepted names: transmissive, periodic, reflective,
        reflective-wall-left, reflective-wall-right."""
        table = {
            "transmissive": cls("transmissive", "transmissive"),
            "periodic": cls("periodic", "periodic"),
            "reflective": cls("reflective", "reflective"),
            "reflective-wall-left": cls("reflective", "transmissive"),
            "reflective-wall-right": cls("transmissive", "reflective"),
        }
        if name not in table:
            raise ValueError(f"unknown boundary condition {name!r}")
        return table[name]


@dataclass
class MeshMotion:
    """Running record of the alternating mesh: speed, parity, accumulated offset."""

    v_mesh: float = 0.0
    parity: int = 0
    net_offset: float = 0.0

    def advance(self, v_mesh: float, dt: float) -> None:
        self.v_mesh = v_mesh
        self.net_offset += v_mesh * dt
        self.parity ^= 1


@dataclass
class SimClock:
    t: float = 0.0
    step_index: int = 0
    dt: float = 0.0

    def advance(self, dt: float) -> None:
        self.dt = dt
        self.t += dt
        self.step_index += 1


def mesh_speed_for_step(step_index: int, v_waves: float, safety: float = 1.0,
                        *, stationary: bool = False,
                        one_signed: bool = False) -> float:
    """Signed mesh speed for one step of the alternating moving mesh.

    Magnitude is ``safety * v_waves`` (safety >= 1 keeps every wave slower
    than the mesh); the sign is + on even steps and - on odd ones so that a
    pair of steps cancels. With ``stationary=True`` and a one-signed wave
    field the mesh may legally stand still and 0 is returned.
    """
    if safety < 1.0:
        raise ValueError(f"safety must be >= 1, got {safety}")
    if v_waves < 0.0:
        raise ValueError(f"v_waves must be >= 0, got {v_waves}")
    if stationary and one_signed:
        return 0.0
    sign = 1.0 if step_index % 2 == 0 else -1.0
    return sign * safety * v_waves


def stable_dt(v_mesh: float, v_waves: float, dx: float, cfl: float) -> float:
    """Largest stable step: cfl * dx / (|v_mesh| + v_waves).

    Raises StaticFieldError when nothing moves (the caller falls back to the
    remaining-time gap).
    """
    if not 0.0 < cfl <= 1.0:
        raise ValueError(f"cfl must lie in (0, 1], got {cfl}")
    if dx <= 0.0:
        raise ValueError(f"dx must be positive, got {dx}")
    denom = abs(v_mesh) + v_waves
    if denom <= 0.0:
        raise StaticFieldError("no wave and no mesh motion: dt is unconstrained")
    return cfl * dx / denom


def fill_ghosts(field: np.ndarray, bc: BoundaryCondition, width: int,
                negate_rows: Sequence[int] = ()) -> np.ndarray:
    """Extend the last axis by ``width`` ghost cells on each side.

    Periodic wraps, transmissive copies the edge cell, reflective mirrors the
    wall-adjacent cells and negates the rows listed in ``negate_rows``
    (momentum/velocity components).
    """
    if width < 1:
        raise ValueError(f"ghost width must be >= 1, got {width}")
    n = field.shape[-1]
    if n < width:
        raise ValueError(f"need at least {width} cells, got {n}")

    def side_block(kind: str, left: bool) -> np.ndarray:
        if kind == "periodic":
            return field[..., -width:] if left else field[..., :width]
        if kind == "transmissive":
            edge = field[..., :1] if left else field[..., -1:]
            return np.repeat(edge, width, axis=-1)
        block = field[..., width - 1::-1] if left else field[..., :-width - 1:-1]
        block = block.copy()
        if negate_rows and field.ndim < 2:
            raise ValueError("negate_rows requires a component axis")
        for row in negate_rows:
            block[row] = -block[row]
        return block

    return np.concatenate(
        [side_block(bc.left, True), field, side_block(bc.right, False)], axis=-1)


def remap_to_reference(field: np.ndarray, net_offset: float, dx: float,
                       bc: BoundaryCondition,
                       negate_rows: Sequence[int] = ()) -> np.ndarray:
    """Conservatively redistribute a field living on cells shifted by
    ``net_offset`` back onto the reference cells (|net_offset| < dx).

    Each reference cell takes length-proportional contributions from the two
    shifted cells overlapping it; with periodic boundaries the total of every
    conserved quantity is preserved exactly.
    """
    if not abs(net_offset) < dx:
        raise ValueError(f"|net_offset| = {abs(net_offset)} must be < dx = {dx}")
    if net_offset == 0.0:
        return field.copy()
    ext = fill_ghosts(field, bc, 1, negate_rows)
    off = net_offset
    if off > 0.0:
        return (off * ext[..., :-2] + (dx - off) * ext[..., 1:-1]) / dx
    a = -off
    return ((dx - a) * ext[..., 1:-1] + a * ext[..., 2:]) / dx


@dataclass(frozen=True)
class PiecewiseProfile:
    """Piecewise initial profile: ``pieces[i]`` applies on
    (breaks[i-1], breaks[i]); each piece is a constant or a callable of x."""

    breaks: tuple[float, ...]
    pieces: tuple

    def __post_init__(self):
        if len(self.pieces) != len(self.breaks) + 1:
            raise ValueError("need len(pieces) == len(breaks) + 1")
        if any(b2 <= b1 for b1, b2 in zip(self.breaks, self.breaks[1:])):
            raise ValueError("breaks must be strictly increasing")

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        idx = np.searchsorted(self.breaks, x, side="right")
        for i, piece in enumerate(self.pieces):
            sel = idx == i
            if not np.any(sel):
                continue
            out[sel] = piece(x[sel]) if callable(piece) else piece
        return out

    @classmethod
    def constant(cls, value: float) -> "PiecewiseProfile":
        return cls((), (value,))

    @classmethod
    def step(cls, x0: float, left: float, right: float) -> "PiecewiseProfile":
        return cls((x0,), (left, right))


def average_profile(fn: Callable[[np.ndarray], np.ndarray], grid: GridSpec,
                    breaks: Sequence[float] = ()) -> np.ndarray:
    """Cell averages of ``fn`` by 5-point Gauss-Legendre quadrature.

    Cells containing a breakpoint are split there so piecewise-smooth data
    (jumps, kinks) is averaged exactly up to quadrature order.
    """
    edges = grid.interfaces()
    cuts = [float(b) for b in sorted(set(breaks))
            if grid.x_min < b < grid.x_max]
    out = np.zeros(grid.n_cells)
    for j in range(grid.n_cells):
        lo, hi = edges[j], edges[j + 1]
        pts = [lo] + [b for b in cuts if lo < b < hi] + [hi]
        total = 0.0
        for a, b in zip(pts, pts[1:]):
            if b <= a:
                continue
            half = 0.5 * (b - a)
            xq = 0.5 * (a + b) + half * _GL_NODES
            total += half * float(np.dot(_GL_WEIGHTS, np.asarray(fn(xq), dtype=float)))
        out[j] = total / (hi - lo)
    return out


def init_cell_averages(profile, grid: GridSpec) -> np.ndarray:
    """Initial cell averages for a PiecewiseProfile, a plain callable, or a
    constant. Piecewise-constant profiles are averaged exactly."""
    if isinstance(profile, PiecewiseProfile):
        return average_profile(profile, grid, profile.breaks)
    if callable(profile):
        return average_profile(profile, grid)
    return np.full(grid.n_cells, float(profile))
