"""Run driver, reference generation, and error metrics.

``SolverRun`` owns one simulation: state array, clock, moving-mesh
bookkeeping, per-step diagnostics, and exact landing on requested output
times. ``run_case`` wraps a full run of a registry case into a
``RunResult`` with optional errors against the case's reference;
``reference_fine_grid`` provides the cached fine-grid fallback reference.
"""
from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .baselines import (SCHEMES, godunov_step, lxf_step, muscl_step, nt_step,
                        rusanov_step)
from .cases import CaseSpec, get_case
from .errors import (PositivityError, RiemannError, SolverError,
                     StaticFieldError, UsageError)
from .full_euler import full_step
from .grid import (GridSpec, MeshMotion, PiecewiseProfile, SimClock,
                   init_cell_averages, mesh_speed_for_step,
                   remap_to_reference, stable_dt)
from .isothermal import iso_step
from .models import BurgersModel, IdealGasModel, IsothermalModel
from .riemann import GasState, IsoState, rh_residual
from .scalar import scalar_step

DEFAULT_GAMMA = 1.4
DEFAULT_FINE_CELLS = 30000
DEFAULT_FINE_CFL = 0.48
_LANDING_RTOL = 1e-12
_RH_TOL = 1e-10

_REC_SCHEMES = ("rec", "rec-full", "rec+nt", "rec-full+nt")


def build_model(kind: str, *, gamma: float | None = None,
                c_sound: float | None = None):
    if kind == "burgers":
        return BurgersModel()
    if kind == "isothermal":
        if c_sound is None:
            raise UsageError("isothermal runs need a sound speed (--c-sound)")
        return IsothermalModel(c_sound)
    if kind == "gas":
        return IdealGasModel(DEFAULT_GAMMA if gamma is None else gamma)
    raise UsageError(f"unknown model kind {kind!r}")


class SolverRun:
    """Drives one scheme on one case.

    The mesh alternates direction every step with magnitude
    ``safety * (fastest wave speed)``; fixed-grid schemes simply get
    v_mesh = 0. Step sizes follow ``stable_dt`` and the final step before
    an output time is shortened to land on it exactly. After a shortened
    step the alternation is re-anchored so the accumulated mesh offset
    keeps shrinking back toward zero; it therefore never reaches one cell
    and the field can always be remapped onto the reference grid.
    """

    def __init__(self, case: CaseSpec | str, scheme: str | None = None,
                 cells: int | None = None, cfl: float | None = None, *,
                 tend: float | None = None, gamma: float | None = None,
                 c_sound: float | None = None, safety: float = 1.0,
                 selection: str = "one-shot", coupling: str | None = None,
                 record: bool = True):
        if isinstance(case, str):
            case = get_case(case)
        scheme_id = scheme or case.scheme
        info = SCHEMES.get(scheme_id)
        if info is None:
            known = ", ".join(sorted(SCHEMES))
            raise UsageError(f"unknown scheme {scheme_id!r}; known: {known}")
        if case.model not in info.models:
            raise UsageError(
                f"scheme {scheme_id!r} does not support {case.model} runs")
        self.case = case
        self.info = info
        self.scheme = scheme_id
        self.cfl = case.cfl if cfl is None else float(cfl)
        if not 0.0 < self.cfl <= info.max_cfl:
            raise UsageError(f"cfl must lie in (0, {info.max_cfl}] "
                             f"for scheme {scheme_id!r}, got {self.cfl}")
        if selection not in ("one-shot", "two-shot"):
            raise UsageError(f"unknown selection mode {selection!r}")
        if coupling not in (None, "lxf", "nt"):
            raise UsageError(f"unknown coupling {coupling!r}")
        if safety < 1.0:
            raise UsageError(f"mesh safety factor must be >= 1, got {safety}")
        self.selection = selection
        self.coupling = coupling
        self.safety = float(safety)
        self.gamma = case.gamma if gamma is None else float(gamma)
        self.c_sound = case.c_sound if c_sound is None else float(c_sound)
        self.model = build_model(case.model, gamma=self.gamma,
                                 c_sound=self.c_sound)
        self.grid = case.grid(cells)
        self.bc = case.bc
        self.t_end = case.t_end if tend is None else float(tend)
        self.U = np.array(case.init(self.grid), dtype=float, copy=True)
        if self.U.shape != (self.model.n_comp, self.grid.n_cells):
            raise UsageError(f"initial field shape {self.U.shape} does not "
                             f"match {self.model.n_comp} components on "
                             f"{self.grid.n_cells} cells")
        self.clock = SimClock()
        self.mesh = MeshMotion()
        self.record = record
        self._parity = 0
        self._stationary = case.mesh == "stationary"
        self._stepper = self._build_stepper()
        self._diag: dict[str, list] = {
            "t": [], "dt": [], "v_mesh": [], "offset": [], "accepted": [],
            "sums": [], "min": [], "max": [], "min_e": []}

    # -- stepping ---------------------------------------------------------

    def _build_stepper(self):
        info, model, case = self.info, self.model, self.case
        dx, bc = self.grid.dx, self.bc
        name = info.name
        if name in _REC_SCHEMES:
            coupling = self.coupling or ("nt" if name.endswith("+nt")
                                         else "lxf")
            if case.model == "burgers":
                flux = model.convex_flux

                def stepper(U, dt, v, stats):
                    return scalar_step(U[0], dt, dx, v, flux=flux,
                                       bc=bc)[None, :]
            elif case.model == "isothermal":
                variant = "full" if name.startswith("rec-full") else "half"
                c = model.c

                def stepper(U, dt, v, stats):
                    return iso_step(U, dt, dx, v, c, variant=variant,
                                    coupling=coupling, bc=bc, stats=stats)
            else:
                gamma, cfl, selection = model.gamma, self.cfl, self.selection

                def stepper(U, dt, v, stats):
                    return full_step(U, dt, dx, v, gamma, c_cfl=cfl,
                                     coupling=coupling, selection=selection,
                                     bc=bc, stats=stats)
        elif name == "lxf":
            def stepper(U, dt, v, stats):
                return lxf_step(U, dt, dx, v, model, bc=bc)
        elif name == "nt":
            def stepper(U, dt, v, stats):
                return nt_step(U, dt, dx, v, model, bc=bc)
        elif name == "rusanov":
            def stepper(U, dt, v, stats):
                return rusanov_step(U, dt, dx, model, bc=bc)
        elif name == "godunov":
            def stepper(U, dt, v, stats):
                return godunov_step(U, dt, dx, model, bc=bc)
        elif name == "muscl":
            def stepper(U, dt, v, stats):
                return muscl_step(U, dt, dx, model, bc=bc)
        else:
            raise UsageError(f"scheme {name!r} has no driver binding")
        return stepper

    def mesh_speed(self) -> float:
        """Mesh velocity the next step will use."""
        if not self.info.moving_mesh:
            return 0.0
        lo, hi = self.model.speed_range(self.U)
        return mesh_speed_for_step(
            self._parity, self.model.max_abs_speed(self.U), self.safety,
            stationary=self._stationary,
            one_signed=lo >= 0.0 or hi <= 0.0)

    def step(self, max_dt: float | None = None) -> float:
        """Advance one step; returns the dt taken.

        ``max_dt`` caps the step (used to land on output times). A static
        field has no stable-dt limit, so the cap becomes the step then.
        """
        v = self.mesh_speed()
        capped = False
        try:
            dt = stable_dt(v, self.model.max_abs_speed(self.U),
                           self.grid.dx, self.cfl)
        except StaticFieldError:
            if max_dt is None:
                raise
            dt, capped = max_dt, True
        if max_dt is not None and dt >= max_dt * (1.0 - _LANDING_RTOL):
            dt, capped = max_dt, True
        stats: dict = {}
        try:
            self.U = self._stepper(self.U, dt, v, stats)
            # baseline steppers have no internal guard: a state that went
            # negative would otherwise NaN silently on the next speed query
            self.model.check_positive(self.U, self.clock.step_index)
        except PositivityError as err:
            if err.step_index is None:
                err.step_index = self.clock.step_index
            raise
        self._parity ^= 1
        if capped:
            # re-anchor the alternation so the offset decays toward zero
            self._parity = 1 if self.mesh.net_offset + v * dt > 0.0 else 0
        self.mesh.advance(v, dt)
        self.clock.advance(dt)
        if self.record:
            self._record_step(dt, v, stats)
        return dt

    def run_steps(self, n: int) -> None:
        for _ in range(int(n)):
            self.step()

    def run_until(self, t_end: float | None = None,
                  snapshots: Sequence[float] = ()) -> dict[float, dict]:
        """Advance to ``t_end``, landing exactly on each snapshot time on
        the way; returns {time: snapshot} including the final time."""
        t_final = self.t_end if t_end is None else float(t_end)
        if t_final < self.clock.t - _LANDING_RTOL * max(1.0, abs(t_final)):
            raise UsageError(f"cannot run backward to t = {t_final} "
                             f"from t = {self.clock.t}")
        inner = sorted({float(s) for s in snapshots
                        if self.clock.t < float(s) < t_final})
        out: dict[float, dict] = {}
        for target in inner + [t_final]:
            self._advance_to(target)
            out[target] = self.snapshot()
        return out

    def _advance_to(self, target: float) -> None:
        eps = _LANDING_RTOL * max(1.0, abs(target))
        while self.clock.t < target - eps:
            gap = target - self.clock.t
            if self.step(max_dt=gap) == gap:
                self.clock.t = target          # clear landing roundoff
        self.clock.t = target

    # -- output -----------------------------------------------------------

    def snapshot(self) -> dict:
        off = self.mesh.net_offset
        field_ref = remap_to_reference(self.U, off, self.grid.dx, self.bc,
                                       self.model.negate_rows)
        centers = self.grid.centers()
        return {"t": self.clock.t, "x": centers, "field": field_ref,
                "x_mesh": centers + off, "field_mesh": self.U.copy(),
                "offset": off}

    def _record_step(self, dt: float, v: float, stats: dict) -> None:
        d = self._diag
        d["t"].append(self.clock.t)
        d["dt"].append(dt)
        d["v_mesh"].append(v)
        d["offset"].append(self.mesh.net_offset)
        d["accepted"].append(stats.get("accepted", 0))
        d["sums"].append(self.U.sum(axis=1) * self.grid.dx)
        d["min"].append(self.U.min(axis=1))
        d["max"].append(self.U.max(axis=1))
        if self.case.model == "gas":
            d["min_e"].append(float(np.min(
                self.model.internal_energy(self.U))))

    def diagnostics(self) -> dict[str, np.ndarray]:
        out = {k: np.asarray(v) for k, v in self._diag.items() if v}
        for key in ("t", "dt", "v_mesh", "offset", "accepted"):
            out.setdefault(key, np.zeros(0))
        return out


@dataclass
class RunResult:
    case: CaseSpec
    scheme: str
    cells: int
    cfl: float
    t: float
    x: np.ndarray
    field: np.ndarray
    x_mesh: np.ndarray
    field_mesh: np.ndarray
    offset: float
    diagnostics: dict[str, np.ndarray]
    snapshots: dict[float, dict]
    model: object = None
    error: dict[str, float] | None = None
    failed: dict | None = None
    walltime: float = 0.0

    @property
    def ok(self) -> bool:
        return self.failed is None


def run_case(case: CaseSpec | str, scheme: str | None = None,
             cells: int | None = None, cfl: float | None = None, *,
             tend: float | None = None, gamma: float | None = None,
             c_sound: float | None = None, safety: float = 1.0,
             selection: str = "one-shot", coupling: str | None = None,
             snapshots: Sequence[float] | None = None, record: bool = True,
             with_errors: bool = True,
             fine_cells: int = DEFAULT_FINE_CELLS,
             fine_cfl: float = DEFAULT_FINE_CFL,
             cache_dir=None) -> RunResult:
    """Run a registry case (or ad-hoc CaseSpec) to its end time.

    A mid-run positivity failure is reported as a failed result carrying
    the offending step instead of propagating, so sweeps can continue.
    """
    if isinstance(case, str):
        case = get_case(case)
    run = SolverRun(case, scheme, cells, cfl, tend=tend, gamma=gamma,
                    c_sound=c_sound, safety=safety, selection=selection,
                    coupling=coupling, record=record)
    wanted = case.snapshots if snapshots is None else tuple(snapshots)
    t0 = time.perf_counter()
    failed = None
    snaps: dict[float, dict] = {}
    try:
        snaps = run.run_until(run.t_end, snapshots=wanted)
        final = snaps[run.t_end]
    except PositivityError as err:
        failed = {"step": err.step_index, "cell": err.cell,
                  "value": err.value, "message": str(err)}
        centers = run.grid.centers() + run.mesh.net_offset
        final = {"t": run.clock.t, "x": centers, "field": run.U.copy(),
                 "x_mesh": centers, "field_mesh": run.U.copy(),
                 "offset": run.mesh.net_offset}
    walltime = time.perf_counter() - t0
    error = None
    if failed is None and with_errors and case.reference != "none":
        error = _reference_error(case, run, final, fine_cells, fine_cfl,
                                 cache_dir)
    return RunResult(case=case, scheme=run.scheme, cells=run.grid.n_cells,
                     cfl=run.cfl, t=final["t"], x=final["x"],
                     field=final["field"], x_mesh=final["x_mesh"],
                     field_mesh=final["field_mesh"], offset=final["offset"],
                     diagnostics=run.diagnostics(), snapshots=snaps,
                     model=run.model, error=error, failed=failed,
                     walltime=walltime)


def _reference_error(case: CaseSpec, run: SolverRun, snap: dict,
                     fine_cells: int, fine_cfl: float,
                     cache_dir) -> dict[str, float]:
    names = run.model.var_names
    if case.reference == "fine-nt":
        ref = reference_fine_grid(case, t=snap["t"],
                                  coarse_cells=run.grid.n_cells,
                                  fine_cells=fine_cells, cfl=fine_cfl,
                                  cache_dir=cache_dir)
        diffs = l1_error(snap["field"], ref, run.grid.dx)
    elif case.exact is not None:
        # evaluate the exact solution on the offset grid: no interpolation
        off = snap["offset"]
        shifted = GridSpec(case.x_min + off, case.x_max + off,
                           run.grid.n_cells)
        ref = case.exact(snap["t"], shifted)
        diffs = l1_error(snap["field_mesh"], ref, run.grid.dx)
    else:
        raise UsageError(f"case {case.name!r} declares reference "
                         f"{case.reference!r} but provides no evaluator")
    return dict(zip(names, np.atleast_1d(diffs)))


# -- fine-grid reference ---------------------------------------------------

def _cache_dir(arg) -> Path:
    if arg is not None:
        path = Path(arg)
    else:
        path = Path(os.environ.get("SOLVERLAB_REF_CACHE", "refcache"))
    path.mkdir(parents=True, exist_ok=True)
    return path


def _cache_name(case_name: str, fine_cells: int, t: float) -> str:
    return f"{case_name}-nt{int(fine_cells)}-t{t:.9g}.csv"


def _load_cache(path: Path, n_cells: int, n_comp: int) -> np.ndarray | None:
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError):
        return None
    if data.shape != (n_cells, n_comp) or not np.all(np.isfinite(data)):
        return None
    return data.T


def _write_cache(path: Path, field: np.ndarray, names) -> None:
    tmp = path.with_suffix(".tmp")
    with open(tmp, "w") as fh:
        fh.write(",".join(names) + "\n")
        for row in field.T:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    os.replace(tmp, path)


def reference_fine_grid(case: CaseSpec | str, t: float | None = None,
                        coarse_cells: int | None = None, *,
                        fine_cells: int = DEFAULT_FINE_CELLS,
                        cfl: float = DEFAULT_FINE_CFL,
                        cache_dir=None) -> np.ndarray:
    """Fine-grid staggered-central reference, conservatively restricted.

    Results are cached on disk as CSV keyed by (case, fine cells, time);
    unreadable or wrongly-shaped cache files are regenerated. One fine run
    produces every snapshot time of the case at once.
    """
    if isinstance(case, str):
        case = get_case(case)
    if case.reference != "fine-nt":
        raise UsageError(f"case {case.name!r} has no fine-grid reference")
    t_req = case.t_end if t is None else float(t)
    n_coarse = case.cells if coarse_cells is None else int(coarse_cells)
    n_comp = {"burgers": 1, "isothermal": 2, "gas": 3}[case.model]
    cdir = _cache_dir(cache_dir)
    path = cdir / _cache_name(case.name, fine_cells, t_req)
    fine = _load_cache(path, fine_cells, n_comp)
    if fine is None:
        times = sorted(set(case.snapshots) | {case.t_end, t_req})
        _generate_references(case, fine_cells, cfl, cdir, times)
        fine = _load_cache(path, fine_cells, n_comp)
        if fine is None:
            raise SolverError(f"failed to build reference cache {path}")
    return restrict_field(fine, n_coarse)


def _generate_references(case: CaseSpec, fine_cells: int, cfl: float,
                         cdir: Path, times) -> None:
    run = SolverRun(case, scheme="nt", cells=fine_cells, cfl=cfl,
                    record=False)
    snaps = run.run_until(max(times), snapshots=times)
    for t_snap, snap in snaps.items():
        out = cdir / _cache_name(case.name, fine_cells, t_snap)
        _write_cache(out, snap["field"], run.model.var_names)


def restrict_field(fine: np.ndarray, n_coarse: int) -> np.ndarray:
    """Exact conservative averaging onto ``n_coarse`` cells (any ratio).

    The cumulative integral of a piecewise-constant field is piecewise
    linear in the cell-index coordinate, so linear interpolation of the
    cumulative sums gives block averages without rational-ratio tricks.
    """
    fine = np.atleast_2d(np.asarray(fine, dtype=float))
    rows, nf = fine.shape
    if not 0 < n_coarse <= nf:
        raise UsageError(f"cannot restrict {nf} cells onto {n_coarse}")
    csum = np.zeros((rows, nf + 1))
    np.cumsum(fine, axis=1, out=csum[:, 1:])
    edges = np.linspace(0.0, nf, n_coarse + 1)
    idx = np.arange(nf + 1, dtype=float)
    parts = np.stack([np.interp(edges, idx, row) for row in csum])
    return np.diff(parts, axis=1) * (n_coarse / nf)


# -- metrics ---------------------------------------------------------------

def l1_error(a: np.ndarray, b: np.ndarray, dx: float):
    """dx * sum |a - b|, per component for stacked fields."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise UsageError(f"field shapes differ: {a.shape} vs {b.shape}")
    diffs = dx * np.sum(np.abs(a - b), axis=-1)
    return float(diffs) if np.ndim(diffs) == 0 else diffs


def convergence_order(resolutions, errors) -> float | None:
    """Least-squares slope of log(error) against log(cell size).

    ``resolutions`` are cell counts on a fixed domain. Returns None when
    any error vanishes: the scheme is exact there and no finite order
    describes it. The slope is invariant under rescaling of the errors.
    """
    res = np.asarray(list(resolutions), dtype=float)
    err = np.asarray(list(errors), dtype=float)
    if res.size != err.size or res.size < 3:
        raise UsageError("order fits need at least 3 matching resolutions")
    if np.any(err < 0.0):
        raise UsageError("errors must be non-negative")
    if np.any(err == 0.0):
        return None
    slope = np.polyfit(np.log(1.0 / res), np.log(err), 1)[0]
    return float(slope)


def overshoot_metric(momentum, q_left: float, q_right: float,
                     intermediates=()) -> float:
    """Total out-of-range excursion of a momentum profile.

    The admissible band is spanned by the left/right data plus any
    intermediate plateau values; excursions above its max and below its
    min are summed. Exact plateau profiles score 0.
    """
    expected = [float(q_left), float(q_right)]
    expected += [float(v) for v in intermediates]
    hi, lo = max(expected), min(expected)
    q = np.asarray(momentum, dtype=float)
    return (max(0.0, float(q.max()) - hi) + max(0.0, lo - float(q.min())))


def transition_width(values, lo: float, hi: float) -> int:
    """Number of cells with values strictly inside the open band (lo, hi)."""
    v = np.asarray(values, dtype=float)
    if lo > hi:
        lo, hi = hi, lo
    return int(np.count_nonzero((v > lo) & (v < hi)))


def level_crossing(x, values, level: float) -> float | None:
    """First grid position where the profile crosses ``level`` (linear
    interpolation between cell centers), or None if it never does."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(values, dtype=float) - level
    hits = np.nonzero(v[:-1] * v[1:] <= 0.0)[0]
    for j in hits:
        if v[j] == 0.0 and v[j + 1] == 0.0:
            return float(x[j])
        if v[j] == v[j + 1]:
            continue
        return float(x[j] - v[j] * (x[j + 1] - x[j]) / (v[j + 1] - v[j]))
    return None


def entropy_budget(before, after, dt: float, dx: float, model) -> float:
    """Change of total discrete entropy over one step:
    sum S(after) - sum S(before).

    Meaningful for periodic runs, where no boundary entropy flux enters.
    ``dt`` and ``dx`` let call sites normalize per unit time or volume;
    the returned value itself is the raw signed sum.
    """
    before = np.asarray(before, dtype=float)
    after = np.asarray(after, dtype=float)
    return float(np.sum(model.entropy(after)) - np.sum(model.entropy(before)))


def exact_pure_shock_average(left, right, sigma: float, x0: float, t: float,
                             grid: GridSpec, *, c: float | None = None,
                             gamma: float | None = None) -> np.ndarray:
    """Exact cell averages of a single traveling discontinuity.

    States are floats for the scalar model, IsoState pairs (c required),
    or GasState pairs (gamma required). Data violating the jump conditions
    is rejected rather than silently averaged.
    """
    if isinstance(left, IsoState):
        resid = float(np.max(rh_residual(left, right, sigma, c=c)))
        scale = max(1.0, abs(left.q), abs(right.q))
        rows_l: tuple = (left.rho, left.q)
        rows_r: tuple = (right.rho, right.q)
    elif isinstance(left, GasState):
        if gamma is None:
            raise UsageError("gas shock averages need gamma")
        resid = float(np.max(rh_residual(left, right, sigma, gamma=gamma)))
        scale = max(1.0, abs(left.p), abs(right.p))
        e = lambda s: s.p / (gamma - 1.0) + 0.5 * s.rho * s.u * s.u
        rows_l = (left.rho, left.rho * left.u, e(left))
        rows_r = (right.rho, right.rho * right.u, e(right))
    else:
        ul, ur = float(left), float(right)
        resid = abs(sigma * (ur - ul) - 0.5 * (ur * ur - ul * ul))
        scale = max(1.0, abs(ul), abs(ur))
        rows_l, rows_r = (ul,), (ur,)
    if resid > _RH_TOL * scale:
        raise RiemannError(
            f"states do not satisfy the jump conditions for speed {sigma} "
            f"(residual {resid:.3e})")
    pos = x0 + sigma * t
    profs = [PiecewiseProfile.step(pos, l, r)
             for l, r in zip(rows_l, rows_r)]
    return np.stack([init_cell_averages(p, grid) for p in profs])


# -- order studies ----------------------------------------------------------

def order_study(case: CaseSpec | str, scheme: str | None = None,
                cells_list: Sequence[int] = (), cfl: float | None = None,
                **overrides):
    """Errors at several resolutions plus the fitted order of the first
    conserved component. Runs fan out over a thread pool and are merged in
    resolution order, so the report is deterministic.

    Returns (rows, slope): rows are dicts with cells, dx and the error
    report; slope is None when the scheme is exact on the case.
    """
    if isinstance(case, str):
        case = get_case(case)
    cells_list = [int(n) for n in cells_list]
    if len(cells_list) < 3:
        raise UsageError("order studies need at least 3 resolutions")
    if case.reference == "none":
        raise UsageError(f"case {case.name!r} has no reference to measure "
                         f"errors against")
    if case.reference == "fine-nt":
        # warm the cache once; concurrent generation would duplicate work
        reference_fine_grid(case, t=overrides.get("tend", case.t_end),
                            coarse_cells=cells_list[0],
                            fine_cells=overrides.get("fine_cells",
                                                     DEFAULT_FINE_CELLS),
                            cfl=overrides.get("fine_cfl", DEFAULT_FINE_CFL),
                            cache_dir=overrides.get("cache_dir"))

    def one(n: int) -> RunResult:
        return run_case(case, scheme, n, cfl, record=False,
                        with_errors=True, **overrides)

    with ThreadPoolExecutor(max_workers=min(4, len(cells_list))) as pool:
        results = list(pool.map(one, cells_list))
    for r in results:
        if r.failed is not None:
            raise PositivityError(
                f"order study run at {r.cells} cells aborted: "
                f"{r.failed['message']}", step_index=r.failed["step"],
                cell=r.failed["cell"], value=r.failed["value"])
    length = case.x_max - case.x_min
    rows = [{"cells": n, "dx": length / n, "errors": r.error}
            for n, r in zip(cells_list, results)]
    first = build_model(case.model, gamma=case.gamma,
                        c_sound=case.c_sound).var_names[0]
    errs = [row["errors"][first] for row in rows]
    slope = convergence_order(cells_list, errs)
    return rows, slope
