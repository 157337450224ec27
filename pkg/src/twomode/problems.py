"""A single simulation request: input state, pulses, rates and integration options."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Union

from . import coherent, hierarchy
from .coherent import CoherentPair
from .engine import Trajectory, default_tolerance, plan_for_envelopes
from .envelopes import PulseEnvelope
from .errors import ConfigError
from .hierarchy import FockSuperposition
from .params import SystemParams


@dataclass(frozen=True)
class EvenFock:
    """n photons in the even-parity mode."""

    n: int = 1

    def __post_init__(self):
        if self.n < 0:
            raise ConfigError("photon number must be nonnegative", field="n")


State = Union[FockSuperposition, EvenFock, CoherentPair]


@dataclass(frozen=True)
class RunOptions:
    method: str = "rk45"
    tol: Optional[float] = None
    tail: float = 5.0
    sample_stride: float = 0.01
    rk4_step: float = 1e-3
    # "two-mode" expands even-mode Fock inputs on |n_r, n_l>; "effective" uses the single-mode chain
    representation: str = "two-mode"

    def __post_init__(self):
        if self.representation not in ("two-mode", "effective"):
            raise ConfigError("representation must be 'two-mode' or 'effective'", field="representation")
        if self.tail < 0:
            raise ConfigError("tail must be nonnegative", field="tail")

    def plan_kwargs(self) -> dict:
        out = dict(method=self.method, tail=self.tail, sample_stride=self.sample_stride,
                   rk4_step=self.rk4_step)
        if self.tol is not None:
            out["tol"] = self.tol
        return out


@dataclass(frozen=True)
class Problem:
    state: State
    env_r: PulseEnvelope
    env_l: Optional[PulseEnvelope] = None
    params: SystemParams = field(default_factory=SystemParams)
    options: RunOptions = field(default_factory=RunOptions)

    @property
    def envelopes(self) -> tuple[PulseEnvelope, PulseEnvelope]:
        return self.env_r, self.env_l if self.env_l is not None else self.env_r

    @property
    def bandwidth(self) -> float:
        return self.env_r.bandwidth

    def with_bandwidth(self, bandwidth: float) -> "Problem":
        env_r, env_l = self.envelopes
        return replace(self, env_r=env_r.with_bandwidth(bandwidth), env_l=env_l.with_bandwidth(bandwidth))

    def with_state(self, state: State) -> "Problem":
        return replace(self, state=state)

    def with_photons(self, n: float) -> "Problem":
        return replace(self, state=scale_photons(self.state, n))

    def run(self, keep_states: bool = False) -> Trajectory:
        env_r, env_l = self.envelopes
        opts = self.options.plan_kwargs()
        state = self.state
        if isinstance(state, CoherentPair):
            plan = coherent.default_plan(self.params, state, env_r, env_l, **opts)
            traj = coherent.simulate(state, env_r, env_l, self.params, plan, keep_states=keep_states)
        elif isinstance(state, EvenFock) and self.options.representation == "effective":
            if env_l != env_r:
                raise ConfigError("effective even-mode run needs identical envelopes", field="envelope")
            opts.setdefault("tol", default_tolerance(state.n))
            plan = plan_for_envelopes((env_r,), **opts)
            traj = hierarchy.simulate_even_effective(state.n, env_r, self.params, plan)
        else:
            sup = hierarchy.even_mode_expand(state.n) if isinstance(state, EvenFock) else state
            system = hierarchy.FockSystem(sup, env_r, env_l, self.params)
            plan = system.default_plan(**opts)
            traj = hierarchy.simulate(sup, env_r, env_l, self.params, plan, keep_states=keep_states)
        traj.metadata["problem"] = self
        return traj


def scale_photons(state: State, n: float) -> State:
    """Same kind of input with a new (mean) photon number."""
    if isinstance(state, EvenFock):
        if n != int(n):
            raise ConfigError("Fock photon numbers must be integers", field="n")
        return EvenFock(int(n))
    if isinstance(state, CoherentPair):
        total = state.nbar
        if total == 0:
            return CoherentPair(0.5 * n, 0.5 * n, state.phi)
        return CoherentPair(n * state.nbar_r / total, n * state.nbar_l / total, state.phi)
    if isinstance(state, FockSuperposition):
        if len(state.coefficients) == 1 and n == int(n):
            (nr, nl), _ = state.coefficients[0]
            if nl == 0:
                return FockSuperposition.fock(int(n), 0)
            if nr == 0:
                return FockSuperposition.fock(0, int(n))
        raise ConfigError("photon-number scans need an even-mode, single-mode or coherent input", field="state")
    raise ConfigError(f"unsupported state {state!r}", field="state")


def describe_state(state: State) -> str:
    if isinstance(state, EvenFock):
        return f"even-fock n={state.n}"
    if isinstance(state, CoherentPair):
        return f"coherent nbar_r={state.nbar_r:g} nbar_l={state.nbar_l:g} phi={state.phi:g}"
    terms = " + ".join(f"({c.real:g}{c.imag:+g}j)|{k[0]},{k[1]}>" for k, c in state.coefficients)
    return f"fock {terms}"

