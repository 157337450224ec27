"""Atomic dynamics under two counter-propagating coherent-state pulses.

A coherent input is an eigenstate of the input-field operator, so the three
expectations X = <sigma_z>, Y = <sigma_->, Z = <sigma_+> close on their own,
driven by the complex amplitude

    Lambda(t) = sqrt(gamma_r nbar_r) xi_r(t) + e^{i phi} sqrt(gamma_l nbar_l) xi_l(t).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .engine import IntegrationPlan, Trajectory, integrate, plan_for_envelopes
from .envelopes import PulseEnvelope
from .errors import ConfigError, NumericalError, UnsupportedConfigurationError
from .params import SystemParams

IMAG_TOL = 1e-9


@dataclass(frozen=True)
class CoherentPair:
    nbar_r: float = 1.0
    nbar_l: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        for name in ("nbar_r", "nbar_l"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ConfigError(f"{name} must be a nonnegative mean photon number", field=name)
        if not math.isfinite(self.phi):
            raise ConfigError("phi must be finite", field="phi")

    @property
    def alpha_r(self) -> complex:
        return complex(math.sqrt(self.nbar_r))

    @property
    def alpha_l(self) -> complex:
        return math.sqrt(self.nbar_l) * cmath.exp(1j * self.phi)

    @property
    def nbar(self) -> float:
        return self.nbar_r + self.nbar_l

    @classmethod
    def even(cls, nbar: float) -> "CoherentPair":
        """|alpha_e> = |alpha_e/sqrt2, alpha_e/sqrt2> with real alpha_e."""
        return cls(0.5 * nbar, 0.5 * nbar, 0.0)


@dataclass
class BlochState:
    time: float
    X: complex = -1.0
    Y: complex = 0.0
    Z: complex = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.X, self.Y, self.Z], dtype=complex)


def drive_amplitude(params: SystemParams, pair: CoherentPair, xi_r: complex, xi_l: complex) -> complex:
    return (math.sqrt(params.gamma_r) * pair.alpha_r * xi_r
            + math.sqrt(params.gamma_l) * pair.alpha_l * xi_l)


def _bloch_derivative(state, lam, g0):
    x, y, z = state
    return np.array([
        -g0 * (x + 1.0) - 2.0 * (np.conj(lam) * y + lam * z),
        -0.5 * g0 * y + lam * x,
        -0.5 * g0 * z + np.conj(lam) * x,
    ])


def coherent_rhs(params: SystemParams, env_r: PulseEnvelope, env_l: PulseEnvelope,
                 pair: CoherentPair, state, t: float) -> np.ndarray:
    values = state.as_array() if isinstance(state, BlochState) else np.asarray(state, dtype=complex)
    lam = drive_amplitude(params, pair, env_r.evaluate(t), env_l.evaluate(t))
    return _bloch_derivative(values, lam, params.gamma0)


def free_decay(state, dt: float, g0: float) -> np.ndarray:
    x, y, z = state
    return np.array([
        -1.0 + (x + 1.0) * math.exp(-g0 * dt),
        y * math.exp(-0.5 * g0 * dt),
        z * math.exp(-0.5 * g0 * dt),
    ])


def probabilities(states) -> np.ndarray:
    x = np.asarray(states)[:, 0]
    if np.any(np.abs(x.imag) > IMAG_TOL):
        raise NumericalError(f"<sigma_z> has imaginary residue {np.max(np.abs(x.imag)):.3g}")
    return 0.5 * (1.0 + x.real)


def peak_drive(params: SystemParams, pair: CoherentPair, env_r: PulseEnvelope, env_l: PulseEnvelope) -> float:
    """Upper bound on |Lambda(t)| used to cap the step size."""
    return (math.sqrt(params.gamma_r * pair.nbar_r) * env_r.peak_amplitude
            + math.sqrt(params.gamma_l * pair.nbar_l) * env_l.peak_amplitude)


def default_plan(params, pair, env_r, env_l, **kwargs) -> IntegrationPlan:
    lam_peak = peak_drive(params, pair, env_r, env_l)
    kwargs.setdefault("max_step", 0.05 / max(params.gamma0, lam_peak))
    return plan_for_envelopes((env_r, env_l), **kwargs)


def simulate(pair: CoherentPair, env_r: PulseEnvelope, env_l: PulseEnvelope | None = None,
             params: SystemParams | None = None, plan: IntegrationPlan | None = None,
             keep_states: bool = False) -> Trajectory:
    params = params or SystemParams()
    env_l = env_l or env_r
    g0 = params.gamma0
    branches = {}

    def derivative(t, y, segment):
        pieces = branches.get(segment)
        if pieces is None:
            pieces = branches[segment] = [env.on_segment(*segment) for env in (env_r, env_l)]
        xi = [0.0 if fn is None else scale * float(fn(t)) for scale, fn in pieces]
        return _bloch_derivative(y, drive_amplitude(params, pair, xi[0], xi[1]), g0)

    plan = plan or default_plan(params, pair, env_r, env_l)
    return integrate(
        derivative,
        BlochState(plan.t_start).as_array(),
        plan,
        observable=probabilities,
        free_decay=lambda y, dt: free_decay(y, dt, g0),
        keep_states=keep_states,
        metadata={"state": "coherent", "pair": pair, "env_r": env_r, "env_l": env_l, "params": params},
    )


def coherent_even_equivalence(alpha_e: complex, env: PulseEnvelope, params: SystemParams | None = None,
                              plan: IntegrationPlan | None = None):
    """Run an even-mode coherent pulse both as a two-mode pair and as one mode with gamma_eff.

    Returns ``(pair, two_mode, single_mode, max_abs_difference)``; the two
    trajectories share one sampling grid.
    """
    params = params or SystemParams()
    if not params.is_symmetric:
        raise UnsupportedConfigurationError("even-mode equivalence requires gamma_r == gamma_l")
    nbar = abs(alpha_e) ** 2
    pair = CoherentPair(0.5 * nbar, 0.5 * nbar, 0.0)
    env_e = env.with_phase(env.envelope_phase + cmath.phase(alpha_e)) if alpha_e else env
    two_mode = simulate(pair, env_e, env_e, params, plan)
    # one coupled mode carrying the whole even-mode amplitude; gamma0 unchanged
    single_params = SystemParams(gamma_r=params.gamma_even, gamma_l=0.0,
                                 gamma_env=max(0.0, params.gamma0 - params.gamma_even))
    single = simulate(CoherentPair(nbar, 0.0, 0.0), env_e, env_e, single_params, plan)
    diff = float(np.max(np.abs(two_mode.p_values - single.p_values)))
    return pair, two_mode, single, diff
