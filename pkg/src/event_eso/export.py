"""CSV and JSON serializers for trajectories and statistics.

Floats are written with ``repr`` (shortest round-trip form) so output bytes
are reproducible for a fixed manifest and seed.
"""
from __future__ import annotations

import csv
import json
import math
import os

import numpy as np


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    return repr(v)


def write_csv(path, header, rows) -> str:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return os.fspath(path)


def trajectory_header(n):
    return (
        ["t"]
        + [f"x{i}" for i in range(1, n + 1)]
        + [f"x{n + 1}_ext"]
        + [f"xhat{i}" for i in range(1, n + 2)]
        + [f"eta{i}" for i in range(1, n + 2)]
    )


def write_trajectory(path, traj) -> str:
    n = traj.x.shape[1]
    data = np.column_stack([traj.times, traj.x, traj.x_ext, traj.xhat, traj.eta])
    return write_csv(path, trajectory_header(n), data.tolist())


def write_triggers(path, traj) -> str:
    rows = []
    for k, (t, y, dt) in enumerate(zip(traj.trigger_times, traj.trigger_held, traj.inter_event), start=1):
        rows.append([k, float(t), float(y), None if k == 1 else float(dt)])
    return write_csv(path, ["k", "t_k", "held_y", "inter_event"], rows)


def write_ensemble(path, ens) -> str:
    m = ens.mse.shape[1]
    header = ["t"] + [f"mse_{i}" for i in range(1, m + 1)] + [f"ci_{i}" for i in range(1, m + 1)]
    data = np.column_stack([ens.times, ens.mse, ens.ci_halfwidth])
    return write_csv(path, header, data.tolist())


def write_paths(path, ens) -> str:
    m = ens.sup_err.shape[1]
    header = ["path", "triggers"] + [f"sup_err_{i}" for i in range(1, m + 1)] + [f"tail_mse_{i}" for i in range(1, m + 1)]
    rows = [
        [idx, int(c), *map(float, s), *map(float, q)]
        for idx, c, s, q in zip(ens.path_indices, ens.trigger_counts, ens.sup_err, ens.tail_mse)
    ]
    return write_csv(path, header, rows)


def write_histogram(path, counts, edges) -> str:
    rows = [[float(lo), float(hi), int(c)] for lo, hi, c in zip(edges[:-1], edges[1:], counts)]
    return write_csv(path, ["bin_lo", "bin_hi", "count"], rows)


def write_sweep(path, sweep) -> str:
    m = sweep.tail_mse.shape[1]
    idx = range(1, m + 1)
    header = (
        ["r"]
        + [f"tail_mse_{i}" for i in idx]
        + [f"slope_{i}" for i in idx]
        + [f"predicted_exponent_{i}" for i in idx]
        + ["mean_triggers"]
    )
    rows = [
        [float(r), *map(float, q), *map(float, sweep.slopes), *map(float, sweep.predicted_exponents), float(mt)]
        for r, q, mt in zip(sweep.r_values, sweep.tail_mse, sweep.mean_triggers)
    ]
    return write_csv(path, header, rows)


def write_compare(path, rep) -> str:
    m = rep.sup_err_a.shape[1]
    idx = range(1, m + 1)
    header = (
        ["path", "triggers_linear", "triggers_nonlinear"]
        + [f"sup_err_linear_{i}" for i in idx]
        + [f"sup_err_nonlinear_{i}" for i in idx]
    )
    rows = [
        [p, int(ta), int(tb), *map(float, sa), *map(float, sb)]
        for p, ta, tb, sa, sb in zip(rep.path_indices, rep.triggers_a, rep.triggers_b, rep.sup_err_a, rep.sup_err_b)
    ]
    return write_csv(path, header, rows)


def write_compare_summary(path, rep) -> str:
    header = [
        "paths", "mean_triggers_linear", "mean_triggers_nonlinear", "trigger_ratio",
        "fraction_nonlinear_better", "fraction_ties",
    ]
    row = [
        len(rep.path_indices), float(rep.triggers_a.mean()), float(rep.triggers_b.mean()),
        rep.trigger_ratio, rep.fraction_b_better, rep.fraction_ties,
    ]
    return write_csv(path, header, [row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, payload) -> str:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(payload), fh, indent=2)
        fh.write("\n")
    return os.fspath(path)
