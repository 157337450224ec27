"""One-call regeneration of the standard figure data sets as plot-ready CSV files.

All figures use gamma_env = 0 and gamma_r = gamma_l = 1/2. Each curve goes to
its own file, named ``fig<id>_<curve>.csv``.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Optional

import numpy as np

from .coherent import CoherentPair
from .csvio import write_csv
from .envelopes import PulseEnvelope
from .errors import ConfigError
from .hierarchy import FockSuperposition
from .params import SystemParams
from .problems import EvenFock, Problem, RunOptions, describe_state
from .sweep import SweepResult, optimize_bandwidth, scan_bandwidth, scan_phase, scan_photon_number

FIGURE_IDS = (2, 3, 4, 5, 6, 7, 8)
PARAMS = SystemParams(0.5, 0.5, 0.0)
RECT_BANDWIDTHS = (0.1, 0.8, 1.5, 10.0)
OPT_BRACKET = (0.1, 10.0)
PHASES = (("phi0", 0.0), ("phipi", math.pi), ("phipi2", 0.5 * math.pi))


def _tag(x: float) -> str:
    return f"{x:g}".replace(".", "p")


def _rising(omega: float = 1.0) -> PulseEnvelope:
    return PulseEnvelope("rising-exponential", omega)


def _rect(omega: float) -> PulseEnvelope:
    return PulseEnvelope("rectangular", omega)


def _problem(state, env, options: Optional[RunOptions] = None) -> Problem:
    return Problem(state, env, env, PARAMS, options or RunOptions())


def _rising_problems() -> dict:
    env = _rising()
    return {
        "fock_even": _problem(EvenFock(1), env),
        "fock_single": _problem(FockSuperposition.fock(1, 0), env),
        "coherent_single": _problem(CoherentPair(1.0, 0.0), env),
        "coherent_even": _problem(CoherentPair.even(1.0), env),
    }


def _header(figure: int, curve: str, problem: Problem, **extra) -> dict:
    env = problem.env_r
    out = {
        "figure": figure,
        "curve": curve,
        "state": describe_state(problem.state),
        "envelope": env.kind,
        "gamma_r": PARAMS.gamma_r,
        "gamma_l": PARAMS.gamma_l,
        "gamma_env": PARAMS.gamma_env,
        "method": problem.options.method,
        "representation": problem.options.representation,
    }
    out.update(extra)
    return out


def _write_sweep(outdir: Path, name: str, result: SweepResult, header: dict) -> Path:
    return write_csv(outdir / name, {"param": result.values, "p_max": result.p_max,
                                     "t_at_max": result.t_at_max},
                     dict(header, axis=result.axis))


def _write_trajectory(outdir: Path, name: str, problem: Problem, header: dict) -> Path:
    traj = problem.run()
    return write_csv(outdir / name, {"t_gamma0": traj.times, "p": traj.p_values},
                     dict(header, bandwidth=problem.bandwidth, p_max=traj.p_max, t_at_max=traj.t_at_max))


def _grid(points: Optional[int]) -> np.ndarray:
    return np.geomspace(0.05, 20.0, points or 60)


def _fig2(outdir, points, workers):
    files = []
    for name, problem in _rising_problems().items():
        res = scan_bandwidth(problem, _grid(points), workers)
        files.append(_write_sweep(outdir, f"fig2_{name}.csv", res, _header(2, name, problem)))
    return files


def _fig3(outdir, points, workers):
    files = []
    coarse = max(5, min(points or 13, 13))
    for name, problem in _rising_problems().items():
        omega, _ = optimize_bandwidth(problem, OPT_BRACKET, coarse_points=coarse, workers=workers)
        best = problem.with_bandwidth(omega)
        files.append(_write_trajectory(outdir, f"fig3_{name}.csv", best, _header(3, name, best)))
    return files


def _fig4(outdir, points, workers):
    files = []
    n_values = range(1, 6) if points is None else range(1, min(points, 5) + 1)
    for omega in RECT_BANDWIDTHS:
        for n in n_values:
            for kind, state in (("fock", EvenFock(n)), ("coherent", CoherentPair.even(float(n)))):
                problem = _problem(state, _rect(omega))
                name = f"fig4_{kind}_omega{_tag(omega)}_n{n}"
                files.append(_write_trajectory(outdir, f"{name}.csv", problem, _header(4, name, problem)))
    return files


def _fig5(outdir, points, workers):
    files = []
    n_max = 10 if points is None else min(points, 10)
    n_list = list(range(1, n_max + 1))
    # the effective even-mode chain is exact for symmetric rates and its state grows only linearly in n
    fock = _problem(EvenFock(1), _rect(1.0), RunOptions(representation="effective"))
    coherent = _problem(CoherentPair.even(1.0), _rect(1.0))
    for kind, problem in (("fock", fock), ("coherent", coherent)):
        for omega, res in scan_photon_number(problem, n_list, RECT_BANDWIDTHS, workers).items():
            name = f"fig5_{kind}_omega{_tag(omega)}"
            files.append(_write_sweep(outdir, f"{name}.csv", res, _header(5, name, problem, bandwidth=omega)))
    return files


def _fig6(outdir, points, workers):
    files = []
    grid = _grid(points)
    for n in range(1, 6):
        for kind, state in (("fock", EvenFock(n)), ("coherent", CoherentPair.even(float(n)))):
            problem = _problem(state, _rect(1.0))
            res = scan_bandwidth(problem, grid, workers)
            name = f"fig6_{kind}_n{n}"
            files.append(_write_sweep(outdir, f"{name}.csv", res, _header(6, name, problem)))
    return files


def _fig7(outdir, points, workers):
    files = []
    states = {"fock_11": FockSuperposition.fock(1, 1), "fock_10": FockSuperposition.fock(1, 0)}
    for name, state in states.items():
        problem = _problem(state, _rect(1.0))
        res = scan_bandwidth(problem, _grid(points), workers)
        files.append(_write_sweep(outdir, f"fig7_{name}_pmax.csv", res, _header(7, name, problem)))
        coarse = max(5, min(points or 13, 13))
        omega, _ = optimize_bandwidth(problem, OPT_BRACKET, coarse_points=coarse, workers=workers)
        best = problem.with_bandwidth(omega)
        files.append(_write_trajectory(outdir, f"fig7_{name}_pt.csv", best, _header(7, name, best)))
    return files


def _fig8(outdir, points, workers):
    grid = np.arange(0, 51) / 10.0 if points is None else np.linspace(0.0, 5.0, max(points, 2))
    if 1.0 not in grid:
        grid = np.union1d(grid, [1.0])
    files = []
    phis = [phi for _, phi in PHASES]
    results = scan_phase(phi_grid=phis, nbar_r_grid=grid, nbar_l=1.0, workers=workers)
    problem = Problem(CoherentPair(1.0, 1.0), _rect(2.0), _rect(2.0), PARAMS)
    for (label, phi) in PHASES:
        name = f"fig8_{label}"
        files.append(_write_sweep(outdir, f"{name}.csv", results[phi],
                                  _header(8, name, problem, phi=phi, nbar_l=1.0, bandwidth=2.0)))
    return files


_FIGURES = {2: _fig2, 3: _fig3, 4: _fig4, 5: _fig5, 6: _fig6, 7: _fig7, 8: _fig8}


def reproduce_figure(figure_id: int, outdir=".", points: Optional[int] = None,
                     workers: Optional[int] = None) -> list[Path]:
    """Write every curve of figure ``figure_id`` into ``outdir``; returns the file paths.

    ``points`` shrinks the grids (bandwidth points, photon numbers) for quick
    previews; ``None`` uses the full default ranges.
    """
    if figure_id not in _FIGURES:
        raise ConfigError(f"unknown figure {figure_id!r}; choose one of {FIGURE_IDS}", field="figure")
    if points is not None and points < 1:
        raise ConfigError("points must be positive", field="points")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    return _FIGURES[figure_id](outdir, points, workers)
