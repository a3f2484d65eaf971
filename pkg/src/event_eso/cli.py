"""Command-line front end: ``event-eso {design,run,ensemble,sweep,compare,validate}``."""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__, export, manifest as mf
from .engine import compare_observers, run_ensemble, simulate_path, sweep_r
from .errors import InfeasibleDesign, InvalidArgument, NumericOverflow
from .gains import (
    BelowRStarWarning,
    LinearDesign,
    NonlinearDesign,
    TOL_LYAPUNOV,
    homogeneity_residual,
    is_hurwitz,
    lyapunov_residual,
    mu_interval,
    nu_interval,
)

WORKERS_ENV = "EVENT_ESO_WORKERS"

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_OVERFLOW = 3
EXIT_IO = 4
EXIT_VALIDATION = 5


def design_report(design) -> dict:
    G = design.gains.G
    out = {
        "kind": design.kind,
        "n": design.n,
        "a": list(design.a),
        "r": design.r,
        "G": G,
        "hurwitz": is_hurwitz(G),
        "dwell": design.dwell,
        "threshold": design.threshold,
        "predicted_mse_exponents": design.predicted_mse_exponents(),
        "predicted_pathwise_exponents": design.predicted_pathwise_exponents(),
    }
    if isinstance(design, LinearDesign):
        out.update(
            Q=design.Q,
            lambda_max_Q=float(np.linalg.eigvalsh(design.Q).max()),
            lambda_min_Q=float(np.linalg.eigvalsh(design.Q).min()),
            lyapunov_residual=lyapunov_residual(design.Q, G),
            zeta=design.zeta,
            r_star=design.r_star,
            meets_r_star=design.meets_r_star,
            tau=design.tau,
        )
    else:
        out.update(
            nu=design.nu,
            p=design.p,
            mu=design.mu,
            nu_interval=nu_interval(design.n, design.p),
            mu_interval=mu_interval(design.n, design.nu),
            weights=design.weights,
            tau_star=design.tau_star,
            threshold_star=design.threshold_star,
        )
    return out


def _designs(m: mf.RunManifest):
    return [d for d in (m.linear, m.nonlinear) if d is not None]


def _meta(args, m, command, started, outputs, **extra):
    return {
        "tool": "event-eso",
        "version": __version__,
        "command": command,
        "manifest": mf.to_dict(m),
        "workers": args.workers,
        "wall_time_s": time.perf_counter() - started,
        "outputs": [os.path.basename(p) for p in outputs],
        **extra,
    }


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_design(args, m):
    report = {d.kind: design_report(d) for d in _designs(m)}
    text = json.dumps(export._jsonable(report), indent=2)
    print(text)
    if args.out:
        export.write_json(_outdir(args) / "design.json", report)
    return EXIT_OK


def cmd_run(args, m):
    started = time.perf_counter()
    out = _outdir(args)
    traj = simulate_path(m.plant, m.noise, m.design, m.sim, path_index=0, xhat_init=m.xhat_init)
    files = [export.write_trajectory(out / "trajectory.csv", traj), export.write_triggers(out / "triggers.csv", traj)]
    export.write_json(out / "run.json", _meta(
        args, m, "run", started, files,
        h=traj.h, trigger_count=traj.trigger_count, bound_exceeded=traj.bound_exceeded,
        tail_window=[m.sim.tail_start, m.sim.t_end],
    ))
    return EXIT_OK


def cmd_ensemble(args, m):
    started = time.perf_counter()
    out = _outdir(args)
    ens = run_ensemble(m.plant, m.noise, m.design, m.sim, workers=args.workers, xhat_init=m.xhat_init)
    files = [
        export.write_ensemble(out / "ensemble.csv", ens),
        export.write_paths(out / "paths.csv", ens),
        export.write_histogram(out / "inter_event_hist.csv", ens.inter_event_counts, ens.inter_event_edges),
    ]
    export.write_json(out / "ensemble.json", _meta(
        args, m, "ensemble", started, files,
        h=ens.h, dwell=ens.dwell, min_inter_event=ens.min_inter_event,
        tail_window=[ens.t_transient, m.sim.t_end], ci="normal approximation 1.96 sd / sqrt(paths)",
    ))
    return EXIT_OK


def cmd_sweep(args, m):
    if not m.r_values:
        raise InvalidArgument("manifest has no sweep.r_values")
    started = time.perf_counter()
    out = _outdir(args)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BelowRStarWarning)
        sw = sweep_r(m.plant, m.noise, m.design, m.sim, m.r_values, workers=args.workers, xhat_init=m.xhat_init)
    files = [export.write_sweep(out / "sweep.csv", sw)]
    export.write_json(out / "sweep.json", _meta(
        args, m, "sweep", started, files,
        tail_window=[sw.t_transient, sw.t_end],
        averaging="time average of squared error over the tail window, then mean over paths",
        slope_defined=sw.slope_defined, min_inter_event_ok=sw.min_inter_event_ok,
    ))
    return EXIT_OK


def cmd_compare(args, m):
    if m.linear is None or m.nonlinear is None:
        raise InvalidArgument("compare needs both linear and nonlinear blocks")
    started = time.perf_counter()
    out = _outdir(args)
    rep = compare_observers(m.plant, m.noise, m.linear, m.nonlinear, m.sim, workers=args.workers, xhat_init=m.xhat_init)
    files = [export.write_compare(out / "compare.csv", rep), export.write_compare_summary(out / "compare_summary.csv", rep)]
    export.write_json(out / "compare.json", _meta(
        args, m, "compare", started, files,
        h=rep.h, tail_window=[m.sim.tail_start, m.sim.t_end],
        min_inter_event_linear=rep.min_inter_event_a, min_inter_event_nonlinear=rep.min_inter_event_b,
    ))
    return EXIT_OK


def validation_checks(m: mf.RunManifest):
    """Yield ``(status, name, detail)`` with status ``PASS``, ``WARN`` or ``FAIL``."""
    for d in _designs(m):
        G = d.gains.G
        yield ("PASS" if is_hurwitz(G) else "FAIL"), f"{d.kind}.hurwitz", "companion matrix eigenvalues"
        if isinstance(d, LinearDesign):
            res = lyapunov_residual(d.Q, G)
            yield ("PASS" if res <= TOL_LYAPUNOV else "FAIL"), "linear.lyapunov_residual", f"{res:.3e}"
            lmin = float(np.linalg.eigvalsh(d.Q).min())
            yield ("PASS" if lmin > 0 else "FAIL"), "linear.Q_positive_definite", f"lambda_min={lmin:.6g}"
            yield ("PASS" if d.meets_r_star else "WARN"), "linear.r_at_least_r_star", f"r={d.r}, r*={d.r_star:.6g}"
        if isinstance(d, NonlinearDesign):
            lo, hi = nu_interval(d.n, d.p)
            yield ("PASS" if lo < d.nu < hi else "FAIL"), "nonlinear.nu_interval", f"{d.nu} in ({lo:.6g}, {hi:.6g})"
            mlo, mhi = mu_interval(d.n, d.nu)
            yield ("PASS" if mlo < d.mu < mhi else "FAIL"), "nonlinear.mu_interval", f"{d.mu} in ({mlo:.6g}, {mhi:.6g})"
            yield ("PASS" if np.all(d.weights > 0) else "FAIL"), "nonlinear.weights_positive", str([float(w) for w in d.weights])
            res = homogeneity_residual(d.gains, d.nu)
            yield ("PASS" if res <= 1e-9 else "FAIL"), "nonlinear.homogeneity_residual", f"{res:.3e}"
        try:
            h, steps = m.sim.grid(d)
            yield "PASS", f"{d.kind}.step_resolves_dwell", f"h={h:.6g} <= dwell/10={d.dwell / 10:.6g}, steps={steps}"
        except InvalidArgument as exc:
            yield "FAIL", f"{d.kind}.step_resolves_dwell", str(exc)


def cmd_validate(args, m):
    failed = False
    for status, name, detail in validation_checks(m):
        print(f"{status} {name}: {detail}")
        failed |= status == "FAIL"
    return EXIT_VALIDATION if failed else EXIT_OK


COMMANDS = {
    "design": cmd_design,
    "run": cmd_run,
    "ensemble": cmd_ensemble,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
    "validate": cmd_validate,
}


def _default_workers():
    env = os.environ.get(WORKERS_ENV)
    return int(env) if env else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="event-eso", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--manifest", required=True, help="JSON run manifest")
        p.add_argument("--out", default=None if name in ("design", "validate") else "out", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override sim.master_seed")
        p.add_argument("--paths", type=int, default=None, help="override sim.paths")
        p.add_argument("--workers", type=int, default=None, help=f"worker threads (env {WORKERS_ENV})")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.workers is None:
        args.workers = _default_workers()
    try:
        m = mf.load(args.manifest).with_overrides(seed=args.seed, paths=args.paths)
        return COMMANDS[args.command](args, m)
    except (InvalidArgument, InfeasibleDesign) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericOverflow as exc:
        print(f"error: numeric overflow: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
