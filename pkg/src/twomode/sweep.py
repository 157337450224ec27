"""Parameter studies of the peak excitation probability.

Every grid point is an independent simulation. Points can be farmed out to a
process pool (``workers`` argument or the ``TWOMODE_WORKERS`` environment
variable); results are stored by grid position, so the output does not depend
on the worker count.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .coherent import CoherentPair
from .envelopes import PulseEnvelope
from .errors import TwoModeError
from .params import SystemParams
from .problems import Problem, describe_state


WORKERS_ENV = "TWOMODE_WORKERS"
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def default_omega_grid(n: int = 60, lo: float = 0.05, hi: float = 20.0) -> np.ndarray:
    return np.geomspace(lo, hi, n)


@dataclass
class SweepResult:
    axis: str
    values: np.ndarray
    p_max: np.ndarray
    t_at_max: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.p_max = np.asarray(self.p_max, dtype=float)
        self.t_at_max = np.asarray(self.t_at_max, dtype=float)
        if not (len(self.values) == len(self.p_max) == len(self.t_at_max)):
            raise ValueError("sweep arrays must have equal length")

    @property
    def best_index(self) -> int:
        return int(np.argmax(self.p_max))

    @property
    def argmax(self) -> float:
        return float(self.values[self.best_index])

    @property
    def best(self) -> float:
        return float(self.p_max[self.best_index])


def resolve_workers(workers: Optional[int] = None) -> int:
    if workers is None:
        try:
            workers = int(os.environ.get(WORKERS_ENV, "1"))
        except ValueError:
            workers = 1
    return max(1, workers)


def _peak(problem: Problem) -> tuple[float, float]:
    traj = problem.run()
    return traj.p_max, traj.t_at_max


def _annotated_peak(args) -> tuple[float, float]:
    label, problem = args
    try:
        return _peak(problem)
    except TwoModeError as exc:
        raise type(exc)(f"{label}: {exc}") from exc


def evaluate_points(problems: list, labels: list, workers: Optional[int] = None):
    """Peak probability and its time for each problem, in input order."""
    workers = resolve_workers(workers)
    jobs = list(zip(labels, problems))
    if workers == 1 or len(jobs) < 2:
        results = [_annotated_peak(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_annotated_peak, jobs))
    if not results:
        return np.array([]), np.array([])
    p, t = zip(*results)
    return np.array(p, dtype=float), np.array(t, dtype=float)


def _provenance(problem: Problem, **extra) -> dict:
    env_r, env_l = problem.envelopes
    out = {
        "state": describe_state(problem.state),
        "env_r": f"{env_r.kind} phase={env_r.envelope_phase:g}",
        "env_l": f"{env_l.kind} phase={env_l.envelope_phase:g}",
        "gamma_r": problem.params.gamma_r,
        "gamma_l": problem.params.gamma_l,
        "gamma_env": problem.params.gamma_env,
        "method": problem.options.method,
        "representation": problem.options.representation,
    }
    out.update(extra)
    return out


def scan_bandwidth(problem: Problem, omega_grid, workers: Optional[int] = None) -> SweepResult:
    """P_max at every bandwidth of ``omega_grid`` (strictly positive, sorted)."""
    grid = np.asarray(omega_grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0 or np.any(grid <= 0):
        raise ValueError("bandwidth grid must be a nonempty list of positive rates")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("bandwidth grid must be strictly increasing")
    problems = [problem.with_bandwidth(om) for om in grid]
    p, t = evaluate_points(problems, [f"bandwidth={om:.6g}" for om in grid], workers)
    return SweepResult("bandwidth", grid, p, t, _provenance(problem))


def golden_section_max(f: Callable[[float], float], a: float, b: float, tol: float):
    """Maximize a unimodal ``f`` on [a, b] until the bracket is narrower than ``tol``.

    Returns ``(x_best, f_best)`` over all evaluated points.
    """
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    best = max((fc, c), (fd, d))
    while abs(b - a) > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
            best = max(best, (fc, c))
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
            best = max(best, (fd, d))
    return best[1], best[0]


def _is_unimodal(values, slack: float = 1e-9) -> bool:
    i = int(np.argmax(values))
    rising = np.all(np.diff(values[: i + 1]) >= -slack)
    falling = np.all(np.diff(values[i:]) <= slack)
    return bool(rising and falling)


def optimize_bandwidth(problem: Problem, bracket: tuple[float, float], *, coarse_points: int = 13,
                       rel_width: float = 1e-3, workers: Optional[int] = None) -> tuple[float, float]:
    """Bandwidth maximizing P_max within ``bracket``.

    A log-spaced coarse scan checks unimodality and narrows the bracket to the
    neighbours of its best point; golden-section search then refines until the
    bracket is ``rel_width`` of its midpoint. A multimodal coarse scan falls
    back to the best point of a denser grid.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if lo <= 0 or hi <= 0:
        raise ValueError("bandwidth bracket must be positive")
    if lo > hi:
        lo, hi = hi, lo
    if lo == hi:
        return lo, float(problem.with_bandwidth(lo).run().p_max)

    coarse = scan_bandwidth(problem, np.geomspace(lo, hi, coarse_points), workers)
    if not _is_unimodal(coarse.p_max):
        warnings.warn("P_max(bandwidth) is not unimodal on the bracket; using dense-grid argmax",
                      RuntimeWarning, stacklevel=2)
        dense = scan_bandwidth(problem, np.geomspace(lo, hi, 4 * coarse_points), workers)
        return dense.argmax, dense.best

    i = coarse.best_index
    a = coarse.values[max(i - 1, 0)]
    b = coarse.values[min(i + 1, len(coarse.values) - 1)]
    x, fx = golden_section_max(lambda om: problem.with_bandwidth(om).run().p_max,
                               a, b, rel_width * 0.5 * (a + b))
    if coarse.best > fx:
        return coarse.argmax, coarse.best
    return float(x), float(fx)


def scan_photon_number(problem: Problem, n_list, omega_list, workers: Optional[int] = None) -> dict:
    """P_max over photon number for each bandwidth: ``{omega: SweepResult(axis='n')}``."""
    n_values = list(n_list)
    problems, labels = [], []
    for om in omega_list:
        for n in n_values:
            problems.append(problem.with_bandwidth(om).with_photons(n))
            labels.append(f"bandwidth={om:g}, n={n:g}")
    p, t = evaluate_points(problems, labels, workers)
    out = {}
    k = len(n_values)
    for j, om in enumerate(omega_list):
        out[om] = SweepResult("n", n_values, p[j * k:(j + 1) * k], t[j * k:(j + 1) * k],
                              _provenance(problem, bandwidth=om))
    return out


def default_phase_problem(bandwidth: float = 2.0, params: Optional[SystemParams] = None) -> Problem:
    env = PulseEnvelope("rectangular", bandwidth)
    return Problem(CoherentPair(1.0, 1.0, 0.0), env, env, params or SystemParams())


def default_nbar_grid() -> np.ndarray:
    return np.arange(1, 51) / 10.0


def scan_phase(problem: Optional[Problem] = None, phi_grid=(0.0, math.pi, 0.5 * math.pi),
               nbar_r_grid=None, nbar_l: float = 1.0, workers: Optional[int] = None) -> dict:
    """P_max against nbar_r for each relative phase: ``{phi: SweepResult(axis='nbar_r')}``."""
    problem = problem or default_phase_problem()
    if not isinstance(problem.state, CoherentPair):
        raise ValueError("phase scans need a coherent input")
    grid = default_nbar_grid() if nbar_r_grid is None else np.asarray(nbar_r_grid, dtype=float)
    problems, labels = [], []
    for phi in phi_grid:
        for nr in grid:
            problems.append(problem.with_state(CoherentPair(float(nr), nbar_l, float(phi))))
            labels.append(f"phi={phi:g}, nbar_r={nr:g}")
    p, t = evaluate_points(problems, labels, workers)
    out = {}
    k = len(grid)
    for j, phi in enumerate(phi_grid):
        out[phi] = SweepResult("nbar_r", grid, p[j * k:(j + 1) * k], t[j * k:(j + 1) * k],
                               _provenance(problem, phi=phi, nbar_l=nbar_l))
    return out
