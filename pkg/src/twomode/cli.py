"""Command-line entry point: ``twomode simulate|scan|reproduce-figure``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 photon number beyond the hierarchy capacity.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .coherent import CoherentPair
from .config import ExperimentConfig, load_config
from .csvio import write_csv
from .errors import CapacityError, ConfigError, NumericalError, TwoModeError, UnsupportedConfigurationError
from .figures import FIGURE_IDS, reproduce_figure
from .hierarchy import even_mode_expand
from .oracles import CollisionModelConfig, collision_model_pt
from .problems import EvenFock
from .sweep import optimize_bandwidth, scan_bandwidth, scan_phase, scan_photon_number

log = logging.getLogger("twomode")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_CAPACITY = 0, 2, 3, 4


def _fixed(x: float, digits: int = 3) -> str:
    text = f"{x:.{digits}f}"
    return text[1:] if text.startswith("-") and float(text) == 0.0 else text


def summary_line(p_max: float, t_at_max: float) -> str:
    return f"p_max={_fixed(p_max)} at t={_fixed(t_at_max)}"


def _output_path(cfg: ExperimentConfig, override, suffix: str, config_path: Path) -> Path:
    if override is not None:
        return Path(override)
    if cfg.output is not None:
        return cfg.output
    return Path(f"{config_path.stem}_{suffix}.csv")


def _oracle_check(cfg: ExperimentConfig, traj) -> str:
    state = cfg.problem.state
    if isinstance(state, EvenFock):
        state = even_mode_expand(state.n)
    try:
        oracle = collision_model_pt(CollisionModelConfig(), cfg.problem.params, cfg.problem.envelopes, state)
    except CapacityError as exc:
        return f"oracle unavailable: {exc}"
    inside = (oracle.times >= traj.times[0]) & (oracle.times <= traj.times[-1])
    ref = np.interp(oracle.times[inside], traj.times, traj.p_values)
    dev = float(np.max(np.abs(ref - oracle.p_values[inside]))) if inside.any() else 0.0
    return f"oracle sup-norm deviation={dev:.3e} (dt={oracle.metadata['time_step']:.3g})"


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    traj = cfg.problem.run()
    path = _output_path(cfg, args.output, "trajectory", Path(args.config))
    write_csv(path, {"t_gamma0": traj.times, "p": traj.p_values}, {"config": cfg.resolved})
    print(summary_line(traj.p_max, traj.t_at_max))
    if args.oracle:
        print(_oracle_check(cfg, traj))
    log.info("wrote %s", path)
    return EXIT_OK


def _run_sweep(cfg: ExperimentConfig, workers):
    spec, problem = cfg.sweep, cfg.problem
    values = np.array(spec.values)
    if spec.parameter == "bandwidth":
        return scan_bandwidth(problem, values, workers)
    if spec.parameter == "n":
        return scan_photon_number(problem, list(spec.values), [problem.bandwidth], workers)[problem.bandwidth]
    state = problem.state
    if not isinstance(state, CoherentPair):
        raise ConfigError(f"sweep.parameter={spec.parameter} needs a coherent input", field="sweep.parameter")
    if spec.parameter == "nbar_r":
        return scan_phase(problem, (state.phi,), values, state.nbar_l, workers)[state.phi]
    by_phi = scan_phase(problem, tuple(spec.values), [state.nbar_r], state.nbar_l, workers)
    res = by_phi[spec.values[0]]
    res.axis, res.values = "phi", values
    res.p_max = np.concatenate([by_phi[phi].p_max for phi in spec.values])
    res.t_at_max = np.concatenate([by_phi[phi].t_at_max for phi in spec.values])
    return res


def cmd_scan(args) -> int:
    cfg = load_config(args.config)
    if cfg.sweep is None:
        raise ConfigError("scan needs a [sweep] section", field="sweep")
    path = _output_path(cfg, args.output, "sweep", Path(args.config))
    res = _run_sweep(cfg, args.workers)
    header = {"config": cfg.resolved}
    i = res.best_index
    print(f"{summary_line(res.p_max[i], res.t_at_max[i])} ({res.axis}={res.values[i]:.6g})")
    if cfg.sweep.optimize:
        bracket = cfg.sweep.bracket or (float(res.values[0]), float(res.values[-1]))
        omega, p = optimize_bandwidth(cfg.problem, bracket, workers=args.workers)
        header["optimum"] = f"bandwidth={omega!r} p_max={p!r}"
        print(f"optimum bandwidth={omega:.4f} p_max={_fixed(p)}")
    write_csv(path, {"param": res.values, "p_max": res.p_max, "t_at_max": res.t_at_max}, header)
    log.info("wrote %s", path)
    return EXIT_OK


def cmd_figure(args) -> int:
    try:
        figure = int(args.figure)
    except ValueError:
        raise ConfigError(f"unknown figure {args.figure!r}; choose one of {FIGURE_IDS}", field="figure") from None
    files = reproduce_figure(figure, args.outdir, args.points, args.workers)
    for path in files:
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twomode", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="integrate one trajectory and write P(t)")
    sim.add_argument("config", help="experiment configuration file")
    sim.add_argument("-o", "--output", help="CSV path (overrides [output] path)")
    sim.add_argument("--oracle", action="store_true", help=argparse.SUPPRESS)
    sim.set_defaults(func=cmd_simulate)

    scan = sub.add_parser("scan", help="sweep one parameter and write P_max per grid point")
    scan.add_argument("config")
    scan.add_argument("-o", "--output")
    scan.add_argument("-j", "--workers", type=int, default=None,
                      help="worker processes (default: $TWOMODE_WORKERS or 1)")
    scan.set_defaults(func=cmd_scan)

    fig = sub.add_parser("reproduce-figure", help="write the CSV curves of a figure")
    fig.add_argument("figure", help=f"figure id, one of {', '.join(map(str, FIGURE_IDS))}")
    fig.add_argument("--outdir", default=".", help="output directory (default: current)")
    fig.add_argument("--points", type=int, default=None, help="reduced grid size for quick previews")
    fig.add_argument("-j", "--workers", type=int, default=None)
    fig.set_defaults(func=cmd_figure)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, UnsupportedConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (NumericalError, TwoModeError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
