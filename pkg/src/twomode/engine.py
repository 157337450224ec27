"""Piecewise ODE integration with running-maximum tracking.

Integration never steps across an envelope discontinuity: the window is split
at every breakpoint and each piece is solved separately, with the right-hand
side told which piece it is on (so one-sided envelope limits are used at the
edges). Once every pulse has passed, the atom only decays, and the remaining
window is filled with the analytic free-decay solution.

Two methods are available: classical fixed-step RK4 (bit-reproducible) and
adaptive Dormand-Prince RK45 via :func:`scipy.integrate.solve_ivp`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import minimize_scalar

from .errors import ConfigError, NumericalError

METHODS = ("rk4", "rk45")
P_BOUND_SLACK = 1e-6


@dataclass(frozen=True)
class IntegrationPlan:
    t_start: float
    t_end: float
    breakpoints: tuple = ()
    method: str = "rk45"
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    sample_stride: float = 0.01
    max_step: float = math.inf
    rk4_step: float = 1e-3
    # after this time every drive is off; None disables the analytic tail
    pulse_end: Optional[float] = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}", field="method")
        if not (math.isfinite(self.t_start) and math.isfinite(self.t_end)):
            raise ConfigError("integration window must be finite", field="t_start")
        if self.t_end < self.t_start:
            raise ConfigError("t_end must not precede t_start", field="t_end")
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ConfigError("tolerances must be positive", field="abs_tol")
        if self.sample_stride <= 0:
            raise ConfigError("sample_stride must be positive", field="sample_stride")
        if self.rk4_step <= 0 or self.max_step <= 0:
            raise ConfigError("step sizes must be positive", field="rk4_step")
        bps = tuple(sorted(float(b) for b in self.breakpoints))
        for b in bps:
            if b < self.t_start - 1e-12 or b > self.t_end + 1e-12:
                raise ConfigError(f"breakpoint {b} outside [t_start, t_end]", field="breakpoints")
        object.__setattr__(self, "breakpoints", bps)

    def nodes(self, tail_available: bool) -> list[float]:
        """Segment boundaries of the numerically integrated part of the window."""
        stop = self.t_end
        if tail_available and self.pulse_end is not None:
            stop = min(stop, max(self.pulse_end, self.t_start))
        inner = [b for b in self.breakpoints if self.t_start < b < stop]
        out = [self.t_start, *inner, stop]
        return sorted(set(out))


@dataclass
class Trajectory:
    times: np.ndarray
    p_values: np.ndarray
    p_max: float
    t_at_max: float
    metadata: dict = field(default_factory=dict)
    states: Optional[np.ndarray] = None
    n_steps: int = 0

    @property
    def final_state(self):
        return None if self.states is None else self.states[-1]


def default_tolerance(total_photons: int) -> float:
    return 1e-9 if total_photons <= 5 else 1e-8


def plan_for_envelopes(
    envelopes,
    *,
    method: str = "rk45",
    tail: float = 5.0,
    tol: float = 1e-9,
    sample_stride: float = 0.01,
    max_step: float = math.inf,
    rk4_step: float = 1e-3,
) -> IntegrationPlan:
    """Build a plan spanning the union of envelope supports plus a decay tail."""
    supports = [env.support() for env in envelopes]
    t_start = min(s[0] for s in supports)
    pulse_end = max(s[1] for s in supports)
    bps = sorted({b for env in envelopes for b in env.breakpoints()})
    return IntegrationPlan(
        t_start=t_start,
        t_end=pulse_end + tail,
        breakpoints=tuple(bps),
        method=method,
        abs_tol=tol,
        rel_tol=tol,
        sample_stride=sample_stride,
        max_step=max_step,
        rk4_step=rk4_step,
        pulse_end=pulse_end,
    )


def _check_finite(y, t, segment):
    if not np.all(np.isfinite(y)):
        raise NumericalError(f"non-finite state at t={t:.6g} on segment {segment}")


def _rk4_segment(rhs, y, segment, h_target):
    t_a, t_b = segment
    n = max(1, int(math.ceil((t_b - t_a) / h_target - 1e-9)))
    h = (t_b - t_a) / n
    ts = t_a + h * np.arange(n + 1)
    ts[-1] = t_b
    ys = np.empty((n + 1, y.size), dtype=y.dtype)
    ys[0] = y
    for k in range(n):
        t = ts[k]
        k1 = rhs(t, y, segment)
        k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1, segment)
        k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2, segment)
        k4 = rhs(t + h, y + h * k3, segment)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        ys[k + 1] = y
    _check_finite(y, t_b, segment)
    return ts, ys


def integrate(
    rhs: Callable,
    y0,
    plan: IntegrationPlan,
    *,
    observable: Optional[Callable] = None,
    free_decay: Optional[Callable] = None,
    keep_states: bool = False,
    metadata: Optional[dict] = None,
) -> Trajectory:
    """Integrate ``y' = rhs(t, y, segment)`` over ``plan``.

    Parameters
    ----------
    rhs : callable
        ``rhs(t, y, segment)`` where ``segment`` is the ``(t_a, t_b)`` piece
        currently being integrated.
    y0 : array_like
        State at ``plan.t_start``.
    observable : callable, optional
        Maps a stack of states with shape ``(n, len(y))`` to ``n`` real
        values. Defaults to the real part of the first component.
    free_decay : callable, optional
        ``free_decay(y, dt)`` giving the analytic undriven evolution; used
        after ``plan.pulse_end``.
    keep_states : bool
        Store the sampled states on the trajectory.
    """
    if observable is None:
        observable = lambda ys: np.real(ys[:, 0])
    y = np.array(y0, dtype=complex).ravel()
    _check_finite(y, plan.t_start, (plan.t_start, plan.t_start))

    nodes = plan.nodes(free_decay is not None)
    stride = plan.sample_stride
    n_samples = int(math.floor((plan.t_end - plan.t_start) / stride + 1e-9)) + 1
    grid = plan.t_start + stride * np.arange(n_samples)
    grid = np.unique(np.concatenate([grid, nodes, [plan.t_end]]))
    grid = grid[(grid >= plan.t_start) & (grid <= plan.t_end)]

    sample_t, sample_y = [], []
    best_p, best_t = -math.inf, plan.t_start
    n_steps = 0

    def consider(ts, ps):
        nonlocal best_p, best_t
        if len(ps) == 0:
            return
        i = int(np.argmax(ps))
        if ps[i] > best_p:
            best_p, best_t = float(ps[i]), float(ts[i])

    # zero-length window: only the initial state
    if len(nodes) == 1:
        sample_t.append(np.array([plan.t_start]))
        sample_y.append(y[None, :])

    for t_a, t_b in zip(nodes[:-1], nodes[1:]):
        segment = (t_a, t_b)
        last = t_b == nodes[-1]
        in_seg = grid[(grid >= t_a) & ((grid < t_b) | (last & (grid <= t_b)))]
        if plan.method == "rk4":
            ts, ys = _rk4_segment(rhs, y, segment, min(plan.rk4_step, plan.max_step))
            n_steps += len(ts) - 1
            ps = observable(ys)
            consider(ts, ps)
            keep = max(1, int(round(stride / (ts[1] - ts[0])))) if len(ts) > 1 else 1
            idx = np.arange(0, len(ts), keep)
            if not last:
                idx = idx[ts[idx] < t_b]
            elif idx[-1] != len(ts) - 1:
                idx = np.append(idx, len(ts) - 1)
            sample_t.append(ts[idx])
            sample_y.append(ys[idx])
            y = ys[-1]
        else:
            sol = solve_ivp(
                lambda t, v: rhs(t, v, segment),
                segment,
                y,
                method="RK45",
                rtol=plan.rel_tol,
                atol=plan.abs_tol,
                max_step=plan.max_step,
                dense_output=True,
            )
            if sol.status != 0:
                raise NumericalError(f"integrator failed on segment {segment}: {sol.message}")
            steps = sol.y.T
            _check_finite(steps, t_b, segment)
            n_steps += len(sol.t) - 1
            ps = observable(steps)
            consider(sol.t, ps)
            i = int(np.argmax(ps))
            if 0 < i < len(sol.t) - 1:
                # peak lies between accepted steps; refine on the interpolant
                res = minimize_scalar(
                    lambda t: -observable(sol.sol(t)[None, :])[0],
                    bounds=(sol.t[i - 1], sol.t[i + 1]),
                    method="bounded",
                    options={"xatol": 1e-10},
                )
                consider([res.x], [-res.fun])
            if len(in_seg):
                ys = sol.sol(in_seg).T
                sample_t.append(in_seg)
                sample_y.append(ys)
            y = steps[-1]
            if last and (not len(in_seg) or in_seg[-1] != t_b):
                sample_t.append(np.array([t_b]))
                sample_y.append(y[None, :])

    t_numeric_end = nodes[-1]
    tail_t = grid[grid > t_numeric_end]
    if len(tail_t):
        if free_decay is None:
            raise NumericalError("window extends past the integrated range without a free-decay tail")
        tail_y = np.stack([free_decay(y, t - t_numeric_end) for t in tail_t])
        sample_t.append(tail_t)
        sample_y.append(tail_y)

    times = np.concatenate(sample_t)
    states = np.concatenate(sample_y, axis=0)
    p_values = np.asarray(observable(states), dtype=float)
    consider(times, p_values)
    return Trajectory(
        times=times,
        p_values=p_values,
        p_max=best_p,
        t_at_max=best_t,
        metadata=dict(metadata or {}),
        states=states if keep_states else None,
        n_steps=n_steps,
    )
