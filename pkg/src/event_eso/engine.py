"""Fixed-step co-simulation, Monte Carlo ensembles and theorem-facing statistics.

One grid step at ``t_j = j h``:

1. poll the trigger with ``y = x1(t_j)`` (the ``t = 0`` trigger is implicit),
2. evaluate ``v1``, the total disturbance and the input at ``t_j``,
3. record and accumulate tail statistics,
4. explicit Euler for plant and observer (observer sees the held output),
5. advance the Brownian motions and the exact OU transition.

The compiled loop in ``_kernel`` implements exactly this sequence for the
built-in families; :func:`simulate_path_reference` composes the public
module operations and also serves configs with Python callables.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _kernel
from .errors import InvalidArgument, NumericOverflow
from .gains import LinearDesign, NonlinearDesign
from .noise import BoundedFamily, NoiseConfig, advance_with_draws, bounded_eval, initial_state, ou_coefficients, path_generator
from .observer import EtmState, eso_derivative
from .plant import DisturbanceKind, InputKind, PlantConfig, extended_state, input_eval, plant_derivative

CHUNK = 1 << 16
RECORD_POINTS = 2000
HIST_BINS = 50


@dataclass(frozen=True)
class SimConfig:
    """Grid and Monte Carlo settings.

    ``h=None`` picks ``min(dwell)/20``; the effective step is then shrunk so
    the grid lands exactly on ``t_end``. ``t_transient=None`` means ``t_end/2``.
    """

    t_end: float = 20.0
    h: Optional[float] = None
    master_seed: int = 0
    paths: int = 1
    record_stride: Optional[int] = None
    t_transient: Optional[float] = None

    def __post_init__(self):
        if not self.t_end > 0:
            raise InvalidArgument("t_end must be positive")
        if self.h is not None and not self.h > 0:
            raise InvalidArgument("h must be positive")
        if self.paths < 1:
            raise InvalidArgument("paths must be >= 1")
        if self.record_stride is not None and self.record_stride < 1:
            raise InvalidArgument("record_stride must be >= 1")
        if self.t_transient is not None and not 0 <= self.t_transient <= self.t_end:
            raise InvalidArgument("t_transient must lie in [0, t_end]")

    @property
    def tail_start(self) -> float:
        return 0.5 * self.t_end if self.t_transient is None else self.t_transient

    def grid(self, *designs) -> tuple[float, int]:
        """Effective step and number of steps for the given designs."""
        dwell = min(d.dwell for d in designs)
        h = dwell / 20.0 if self.h is None else self.h
        if h > dwell / 10.0 * (1 + 1e-12):
            raise InvalidArgument(f"step h={h!r} exceeds dwell/10={dwell / 10.0!r}")
        steps = math.ceil(self.t_end / h * (1 - 1e-12))
        if steps >= 2**63:
            raise InvalidArgument("too many steps for the horizon")
        return self.t_end / steps, steps

    def stride(self, steps: int) -> int:
        if self.record_stride is not None:
            return self.record_stride
        return max(1, steps // RECORD_POINTS)


@dataclass
class Trajectory:
    """One sample path on the recorded grid plus full-resolution tail statistics.

    ``tail_mse`` is the time average of squared errors over the tail window
    and ``tail_sup`` their supremum, both per state index ``1..n+1``.
    """

    times: np.ndarray
    x: np.ndarray
    x_ext: np.ndarray
    xhat: np.ndarray
    eta: np.ndarray
    trigger_times: np.ndarray
    trigger_held: np.ndarray
    inter_event: np.ndarray
    tail_mse: np.ndarray
    tail_sup: np.ndarray
    h: float
    r: float
    dwell: float
    threshold: float
    path_index: int = 0
    bound_exceeded: bool = False

    @property
    def trigger_count(self) -> int:
        return int(self.trigger_times.size)

    @property
    def errors(self) -> np.ndarray:
        """``x_i - xhat_i`` on the recorded grid, the last column for the extended state."""
        return np.column_stack([self.x, self.x_ext]) - self.xhat


def scaled_errors(x, x_ext, xhat, r) -> np.ndarray:
    """``r^(n+1-i) (x_i - xhat_i)`` column-wise."""
    full = np.column_stack([x, x_ext])
    m = full.shape[1]
    scale = float(r) ** np.arange(m - 1, -1, -1)
    return scale * (full - xhat)


def _observer_params(design):
    n = design.n
    a = np.asarray(design.a, dtype=float)
    r = float(design.r)
    if isinstance(design, LinearDesign):
        return 0, a * r ** np.arange(1, n + 2), 1.0, np.ones(n + 1)
    if isinstance(design, NonlinearDesign):
        pref = np.array([a[i - 1] * r ** (i - n) for i in range(1, n + 2)])
        expo = np.array([i * design.nu - (i - 1) for i in range(1, n + 2)])
        return 1, pref, r**n, expo
    raise InvalidArgument(f"not a design: {type(design).__name__}")


def _validate(plant: PlantConfig, design, xhat_init):
    if plant.n != design.n:
        raise InvalidArgument(f"plant order {plant.n} differs from observer order {design.n}")
    xh0 = np.zeros(plant.n + 1) if xhat_init is None else np.asarray(xhat_init, dtype=float).copy()
    if xh0.shape != (plant.n + 1,):
        raise InvalidArgument(f"xhat_init must have length {plant.n + 1}")
    return xh0


def _finish(rec, trig, tail_sum, tail_sup, tail_count, h, design, path_index, bound_flag):
    times, xs, ext, xh = rec
    t_t, t_y, t_dt = trig
    tail_mse = tail_sum / tail_count if tail_count else np.full(design.n + 1, np.nan)
    return Trajectory(
        times=times,
        x=xs,
        x_ext=ext,
        xhat=xh,
        eta=scaled_errors(xs, ext, xh, design.r),
        trigger_times=t_t,
        trigger_held=t_y,
        inter_event=t_dt,
        tail_mse=tail_mse,
        tail_sup=tail_sup,
        h=h,
        r=float(design.r),
        dwell=design.dwell,
        threshold=design.threshold,
        path_index=path_index,
        bound_exceeded=bound_flag,
    )


def _needs_reference(plant: PlantConfig, noise: NoiseConfig) -> bool:
    return plant.uses_hooks or noise.sigma is not None


def simulate_path(plant, noise, design, sim, path_index=0, xhat_init=None, backend="auto", h=None) -> Trajectory:
    """Simulate one sample path; ``h`` overrides the grid step chosen by ``sim``.

    ``backend`` is ``"auto"``, ``"kernel"`` or ``"reference"``.
    """
    if backend == "auto":
        backend = "reference" if _needs_reference(plant, noise) else "kernel"
    if backend == "reference":
        return simulate_path_reference(plant, noise, design, sim, path_index, xhat_init, h=h)
    if backend != "kernel":
        raise InvalidArgument(f"unknown backend {backend!r}")
    if _needs_reference(plant, noise):
        raise InvalidArgument("callable hooks require the reference backend")

    xh = _validate(plant, design, xhat_init)
    h, steps = _resolve_grid(sim, design, h)
    stride = sim.stride(steps)
    j_tail = math.ceil(sim.tail_start / h - 1e-9)
    rng = path_generator(sim.master_seed, path_index)

    x = np.array(plant.x_init, dtype=float)
    nst = np.array([0.0, 0.0, noise.v2_init])
    etm = np.array([0.0, x[0]])
    dist_kind = {DisturbanceKind.SECTION_IV: 0, DisturbanceKind.CONSTANT: 1, DisturbanceKind.ZERO: 2}[plant.disturbance.kind]
    bvec = np.zeros(9)
    if plant.disturbance.b:
        bvec[:] = plant.disturbance.b
    input_kind = 1 if plant.input_kind is InputKind.COS else 0
    fam = {BoundedFamily.SIN_AFFINE: 0, BoundedFamily.COS_AFFINE: 1, BoundedFamily.DETERMINISTIC_ONLY: 2}[noise.bounded_family]
    decay, sd = ou_coefficients(h, noise)
    obs_kind, gain, rn, expo = _observer_params(design)

    n_rec = steps // stride + 2
    rec_t = np.empty(n_rec)
    rec_x = np.empty((n_rec, plant.n))
    rec_ext = np.empty(n_rec)
    rec_xh = np.empty((n_rec, plant.n + 1))
    counters = np.zeros(6, dtype=np.int64)
    buf_t = np.empty(CHUNK)
    buf_y = np.empty(CHUNK)
    buf_dt = np.empty(CHUNK)
    trig_t, trig_y, trig_dt = [np.array([0.0])], [np.array([x[0]])], [np.array([np.nan])]
    tail_sum = np.zeros(plant.n + 1)
    tail_sup = np.zeros(plant.n + 1)

    for j0 in range(0, steps + 1, CHUNK):
        j1 = min(j0 + CHUNK, steps + 1)
        z = rng.standard_normal((min(j1, steps) - j0, 2))
        counters[1] = 0
        status = _kernel.run_chunk(
            z, j0, j1, steps, h, stride, j_tail,
            x, xh, nst, etm,
            dist_kind, bvec, float(plant.disturbance.c), input_kind, float(plant.b10),
            fam, float(noise.amplitude), float(noise.t_coeff), float(noise.b_coeff), decay, sd,
            obs_kind, gain, float(rn), expo, float(design.dwell), float(design.threshold),
            rec_t, rec_x, rec_ext, rec_xh, counters,
            buf_t, buf_y, buf_dt,
            tail_sum, tail_sup, float(plant.sanity_bound),
        )
        k = counters[1]
        trig_t.append(buf_t[:k].copy())
        trig_y.append(buf_y[:k].copy())
        trig_dt.append(buf_dt[:k].copy())
        if status != _kernel.OK:
            raise NumericOverflow("simulation diverged", time=float(counters[5] * h), path_index=path_index)

    r = counters[0]
    rec = (rec_t[:r], rec_x[:r], rec_ext[:r], rec_xh[:r])
    trig = tuple(np.concatenate(parts) for parts in (trig_t, trig_y, trig_dt))
    return _finish(rec, trig, tail_sum, tail_sup, int(counters[2]), h, design, path_index, bool(counters[4]))


def _resolve_grid(sim: SimConfig, design, h):
    if h is None:
        return sim.grid(design)
    if h > design.dwell / 10.0 * (1 + 1e-12):
        raise InvalidArgument(f"step h={h!r} exceeds dwell/10={design.dwell / 10.0!r}")
    steps = math.ceil(sim.t_end / h * (1 - 1e-12))
    return sim.t_end / steps, steps


def simulate_path_reference(plant, noise, design, sim, path_index=0, xhat_init=None, h=None) -> Trajectory:
    """Pure-Python stepper built from the module-level operations. Slow; short horizons."""
    xh = _validate(plant, design, xhat_init)
    h, steps = _resolve_grid(sim, design, h)
    stride = sim.stride(steps)
    j_tail = math.ceil(sim.tail_start / h - 1e-9)
    rng = path_generator(sim.master_seed, path_index)
    m = plant.n + 1

    x = np.array(plant.x_init, dtype=float)
    ns = initial_state(noise)
    etm = EtmState.for_design(design, x[0])
    rec_t, rec_x, rec_ext, rec_xh = [], [], [], []
    inter = [np.nan]
    tail_sum = np.zeros(m)
    tail_sup = np.zeros(m)
    tail_count = 0
    bound_flag = False

    z = None
    for j in range(steps + 1):
        if j % CHUNK == 0 and j < steps:
            z = rng.standard_normal((min(j + CHUNK, steps) - j, 2))
        t = j * h
        if j > 0:
            before = etm.last_trigger_time
            if etm.poll(t, x[0]):
                inter.append(t - before)
        v1 = bounded_eval(noise, t, ns.b1)
        f = extended_state(plant, t, x, v1, ns.v2)
        u = input_eval(plant, t)
        if j % stride == 0 or j == steps:
            rec_t.append(t)
            rec_x.append(x.copy())
            rec_ext.append(f)
            rec_xh.append(xh.copy())
        if j >= j_tail:
            err = np.abs(np.append(x, f) - xh)
            tail_sum += err * err
            tail_sup = np.maximum(tail_sup, err)
            tail_count += 1
        if j == steps:
            break
        if not (math.isfinite(f) and math.isfinite(etm.held_output - xh[0])):
            raise NumericOverflow("simulation diverged", time=t, path_index=path_index)
        dx = plant_derivative(plant, t, x, v1, ns.v2)
        dxh = eso_derivative(design, xh, etm.held_output, u, t=t)
        x = x + h * dx
        xh = xh + h * dxh
        if x @ x > plant.sanity_bound**2:
            bound_flag = True
        zz = z[j % CHUNK]
        ns = advance_with_draws(ns, h, noise, float(zz[0]), float(zz[1]))

    log = np.array(etm.trigger_log)
    rec = (np.array(rec_t), np.array(rec_x), np.array(rec_ext), np.array(rec_xh))
    trig = (log[:, 0].copy(), log[:, 1].copy(), np.array(inter))
    return _finish(rec, trig, tail_sum, tail_sup, tail_count, h, design, path_index, bound_flag)


@dataclass
class EnsembleStats:
    """Cross-path statistics on the recorded grid, ordered by path index.

    ``ci_halfwidth`` is the normal-approximation half-width ``1.96 sd / sqrt(paths)``.
    """

    times: np.ndarray
    mse: np.ndarray
    ci_halfwidth: np.ndarray
    sup_err: np.ndarray
    tail_mse: np.ndarray
    trigger_counts: np.ndarray
    inter_event_counts: np.ndarray
    inter_event_edges: np.ndarray
    min_inter_event: float
    dwell: float
    path_indices: tuple
    h: float
    t_transient: float
    trajectories: Optional[list] = field(default=None, repr=False)

    @property
    def mean_tail_mse(self) -> np.ndarray:
        return self.tail_mse.mean(axis=0)


def _map_paths(fn, indices, workers):
    if workers is None or workers <= 1:
        return [fn(i) for i in indices]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, indices))


def _run_paths(plant, noise, design, sim, indices, workers, xhat_init, h=None):
    def one(idx):
        try:
            return simulate_path(plant, noise, design, sim, idx, xhat_init, h=h)
        except NumericOverflow as exc:
            if exc.path_index is None:
                exc.path_index = idx
            raise
    return _map_paths(one, indices, workers)


def summarize(trajs, sim: SimConfig, keep_trajectories=False) -> EnsembleStats:
    if len(trajs) < 2:
        raise InvalidArgument("an ensemble needs at least 2 paths")
    sq = np.stack([t.errors**2 for t in trajs])
    # centring on the first path keeps identical paths at exactly zero spread
    dev = sq - sq[0]
    mse = sq[0] + dev.mean(axis=0)
    ci = 1.96 * dev.std(axis=0, ddof=1) / math.sqrt(len(trajs))
    inter = np.concatenate([t.inter_event[1:] for t in trajs])
    dwell = trajs[0].dwell
    if inter.size:
        counts, edges = np.histogram(inter, bins=HIST_BINS, range=(dwell, max(inter.max(), dwell * (1 + 1e-9))))
        min_ie = float(inter.min())
    else:
        counts, edges = np.zeros(HIST_BINS, dtype=np.int64), np.linspace(dwell, 2 * dwell, HIST_BINS + 1)
        min_ie = math.inf
    return EnsembleStats(
        times=trajs[0].times,
        mse=mse,
        ci_halfwidth=ci,
        sup_err=np.stack([t.tail_sup for t in trajs]),
        tail_mse=np.stack([t.tail_mse for t in trajs]),
        trigger_counts=np.array([t.trigger_count for t in trajs]),
        inter_event_counts=counts,
        inter_event_edges=edges,
        min_inter_event=min_ie,
        dwell=dwell,
        path_indices=tuple(t.path_index for t in trajs),
        h=trajs[0].h,
        t_transient=sim.tail_start,
        trajectories=list(trajs) if keep_trajectories else None,
    )


def run_ensemble(plant, noise, design, sim, paths=None, workers=1, path_indices=None,
                 xhat_init=None, keep_trajectories=False, h=None) -> EnsembleStats:
    """Monte Carlo over independent paths seeded by ``(sim.master_seed, index)``.

    ``path_indices`` overrides the default ``range(paths)``; repeating an
    index reruns the same stream.
    """
    if path_indices is None:
        paths = sim.paths if paths is None else paths
        path_indices = range(paths)
    path_indices = [int(i) for i in path_indices]
    if len(path_indices) < 2:
        raise InvalidArgument("an ensemble needs at least 2 paths")
    trajs = _run_paths(plant, noise, design, sim, path_indices, workers, xhat_init, h=h)
    return summarize(trajs, sim, keep_trajectories)


@dataclass
class SweepResult:
    r_values: np.ndarray
    tail_mse: np.ndarray
    mean_triggers: np.ndarray
    slopes: np.ndarray
    slope_defined: np.ndarray
    predicted_exponents: np.ndarray
    t_transient: float
    t_end: float
    min_inter_event_ok: bool
    ensembles: list = field(default_factory=list, repr=False)


def fit_loglog_slopes(r_values, tail_mse):
    """Least-squares slope of ``ln tail_mse`` against ``ln r`` per column; NaN where undefined."""
    r_values = np.asarray(r_values, dtype=float)
    tail_mse = np.asarray(tail_mse, dtype=float)
    if r_values.size < 3:
        raise InvalidArgument("slope fitting needs at least 3 r values")
    slopes = np.full(tail_mse.shape[1], np.nan)
    ok = np.all(tail_mse > 0, axis=0) & np.all(np.isfinite(tail_mse), axis=0)
    lr = np.log(r_values)
    for i in np.flatnonzero(ok):
        slopes[i] = np.polyfit(lr, np.log(tail_mse[:, i]), 1)[0]
    return slopes, ok


def sweep_r(plant, noise, design, sim, r_values: Sequence[float], paths=None, workers=1,
            xhat_init=None, keep_ensembles=False) -> SweepResult:
    """Tail mean-square error against the tuning gain, with fitted log-log slopes.

    Each ensemble averages the full-resolution squared error over the tail window.
    """
    r_values = np.asarray(r_values, dtype=float)
    if np.any(np.diff(r_values) <= 0):
        raise InvalidArgument("r_values must be strictly ascending")
    if r_values.size < 3:
        raise InvalidArgument("slope fitting needs at least 3 r values")
    paths = sim.paths if paths is None else paths
    rows, trig, ens_list, ok = [], [], [], True
    for r in r_values:
        d = design.with_r(r)
        ens = run_ensemble(plant, noise, d, sim, paths=paths, workers=workers, xhat_init=xhat_init)
        rows.append(ens.mean_tail_mse)
        trig.append(ens.trigger_counts.mean())
        ok = ok and ens.min_inter_event >= ens.dwell
        if keep_ensembles:
            ens_list.append(ens)
    tail = np.array(rows)
    slopes, defined = fit_loglog_slopes(r_values, tail)
    return SweepResult(
        r_values=r_values,
        tail_mse=tail,
        mean_triggers=np.array(trig),
        slopes=slopes,
        slope_defined=defined,
        predicted_exponents=design.predicted_mse_exponents(),
        t_transient=sim.tail_start,
        t_end=sim.t_end,
        min_inter_event_ok=ok,
        ensembles=ens_list,
    )


@dataclass
class CompareReport:
    """Paired comparison on shared noise paths; ``a`` is the linear design slot."""

    path_indices: tuple
    triggers_a: np.ndarray
    triggers_b: np.ndarray
    sup_err_a: np.ndarray
    sup_err_b: np.ndarray
    h: float
    dwell_a: float
    dwell_b: float
    min_inter_event_a: float
    min_inter_event_b: float

    @property
    def fraction_b_better(self) -> float:
        """Share of paths where ``b`` has strictly smaller extended-state tail sup-error."""
        return float(np.mean(self.sup_err_b[:, -1] < self.sup_err_a[:, -1]))

    @property
    def fraction_ties(self) -> float:
        return float(np.mean(self.sup_err_b[:, -1] == self.sup_err_a[:, -1]))

    @property
    def trigger_ratios(self) -> np.ndarray:
        return self.triggers_b / self.triggers_a

    @property
    def trigger_ratio(self) -> float:
        return float(self.triggers_b.mean() / self.triggers_a.mean())


def compare_observers(plant, noise, linear, nonlinear, sim, paths=None, workers=1, xhat_init=None) -> CompareReport:
    """Run both observers on identical plant/noise paths (common step, same seeds)."""
    if linear.n != nonlinear.n:
        raise InvalidArgument("designs have different plant orders")
    if linear.r != nonlinear.r:
        raise InvalidArgument("designs have different tuning gains")
    h, _ = sim.grid(linear, nonlinear)
    paths = sim.paths if paths is None else paths
    idx = list(range(paths))
    ta = _run_paths(plant, noise, linear, sim, idx, workers, xhat_init, h=h)
    tb = _run_paths(plant, noise, nonlinear, sim, idx, workers, xhat_init, h=h)
    return CompareReport(
        path_indices=tuple(idx),
        triggers_a=np.array([t.trigger_count for t in ta]),
        triggers_b=np.array([t.trigger_count for t in tb]),
        sup_err_a=np.stack([t.tail_sup for t in ta]),
        sup_err_b=np.stack([t.tail_sup for t in tb]),
        h=h,
        dwell_a=linear.dwell,
        dwell_b=nonlinear.dwell,
        min_inter_event_a=min((float(np.nanmin(t.inter_event[1:])) for t in ta if t.inter_event.size > 1), default=math.inf),
        min_inter_event_b=min((float(np.nanmin(t.inter_event[1:])) for t in tb if t.inter_event.size > 1), default=math.inf),
    )
