"""Independent reference solutions.

* closed-form single-photon excitation for a rising-exponential pulse
* a time-bin collision model: the input field is cut into bins of width dt,
  each bin meets the atom once under the exact unitary of the bin Hamiltonian
  and then leaves. Fock inputs (N <= 2) are tracked as a pure state in the
  fixed-excitation sector; coherent inputs use displaced, truncated bin
  oscillators that are traced out after their collision. Both are first-order
  accurate in dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import expm

from .coherent import CoherentPair
from .engine import Trajectory
from .envelopes import PulseEnvelope
from .errors import CapacityError, ConfigError
from .hierarchy import FockSuperposition
from .params import SystemParams

MAX_ORACLE_PHOTONS = 2
MAX_ORACLE_NBAR = 4.0
MAX_TIME_STEP = 0.02


def analytic_single_photon_pmax(omega: float, gamma_eff: float, gamma0: float = 1.0) -> float:
    """Peak excitation 4 gamma_eff Omega / (gamma0 + Omega)^2 by one rising-exponential photon.

    For t <= 0 the level-1 equations are solved by
    P(t) = 4 gamma_eff Omega / (gamma0 + Omega)^2 * exp(Omega t),
    which peaks at the end of the pulse.
    """
    if omega <= 0:
        return 0.0
    return 4.0 * gamma_eff * omega / (gamma0 + omega) ** 2


def analytic_single_photon_pt(t, omega: float, gamma_eff: float, gamma0: float = 1.0):
    """Full P(t) for the same problem, including the free decay after t = 0."""
    t = np.asarray(t, dtype=float)
    peak = analytic_single_photon_pmax(omega, gamma_eff, gamma0)
    return np.where(t <= 0, peak * np.exp(omega * np.minimum(t, 0.0)), peak * np.exp(-gamma0 * np.maximum(t, 0.0)))


@dataclass(frozen=True)
class CollisionModelConfig:
    time_step: float = 0.01
    tail: float = 1.0
    # tails of infinite envelopes are cut at this norm for the oracle only
    truncation_epsilon: float = 1e-6
    max_excitations: int = MAX_ORACLE_PHOTONS
    bin_dim: int = 4
    t_start: Optional[float] = None
    t_end: Optional[float] = None

    def __post_init__(self):
        if not (0 < self.time_step <= MAX_TIME_STEP):
            raise ConfigError(f"time_step must lie in (0, {MAX_TIME_STEP}]", field="time_step")
        if self.tail < 0:
            raise ConfigError("tail must be nonnegative", field="tail")
        if self.max_excitations > MAX_ORACLE_PHOTONS:
            raise CapacityError("collision oracle supports at most two photons")
        if self.bin_dim < 2:
            raise ConfigError("bin_dim must be at least 2", field="bin_dim")


def _window(config, envelopes):
    envs = [PulseEnvelope(e.kind, e.bandwidth, e.envelope_phase,
                          max(e.truncation_epsilon, config.truncation_epsilon)) for e in envelopes]
    supports = [e.support() for e in envs]
    t0 = config.t_start if config.t_start is not None else min(s[0] for s in supports)
    t1 = config.t_end if config.t_end is not None else max(s[1] for s in supports) + config.tail
    n_bins = max(1, int(math.ceil((t1 - t0) / config.time_step - 1e-9)))
    return t0, (t1 - t0) / n_bins, n_bins


def bin_amplitudes(env: PulseEnvelope, t0: float, dt: float, n_bins: int) -> np.ndarray:
    """(1/sqrt(dt)) * integral of xi over each bin, by 8-point Gauss-Legendre."""
    nodes, weights = np.polynomial.legendre.leggauss(8)
    edges = t0 + dt * np.arange(n_bins)
    t = edges[:, None] + 0.5 * dt * (nodes[None, :] + 1.0)
    vals = env.evaluate(t.ravel()).reshape(t.shape)
    return (0.5 * dt * vals @ weights) / math.sqrt(dt)


def _channels(params: SystemParams):
    rates = [params.gamma_r, params.gamma_l]
    if params.gamma_env > 0:
        rates.append(params.gamma_env)
    return rates


def collision_model_pt(config: CollisionModelConfig, params: SystemParams, envelopes, state) -> Trajectory:
    """P(t) at bin boundaries for a Fock superposition or a coherent pair."""
    env_r, env_l = envelopes
    if isinstance(state, CoherentPair):
        return _coherent_oracle(config, params, env_r, env_l, state)
    if not isinstance(state, FockSuperposition):
        raise ConfigError("oracle input must be a FockSuperposition or CoherentPair")
    if state.total_photons > min(config.max_excitations, MAX_ORACLE_PHOTONS):
        raise CapacityError(
            f"collision oracle sector overflow: {state.total_photons} photons > {config.max_excitations}"
        )
    return _fock_oracle(config, params, env_r, env_l, state)


def _fock_oracle(config, params, env_r, env_l, state):
    t0, dt, n_bins = _window(config, (env_r, env_l))
    rates = _channels(params)
    n_ch = len(rates)
    size = n_bins * n_ch
    c = np.sqrt(np.array(rates) * dt)
    big_c = float(np.linalg.norm(c))
    c_hat = c / big_c if big_c > 0 else c

    packets = []
    for j, env in enumerate((env_r, env_l)):
        w = np.zeros(size, dtype=complex)
        amp = bin_amplitudes(env, t0, dt, n_bins)
        norm = np.linalg.norm(amp)
        w[j::n_ch] = amp / norm if norm > 0 else amp
        packets.append(w)
    w_r, w_l = packets
    coeffs = state.as_dict()
    n = state.total_photons

    times = t0 + dt * np.arange(n_bins + 1)
    probs = np.zeros(n_bins + 1)

    if n == 0:
        norm_error = 0.0
    elif n == 1:
        g = coeffs.get((1, 0), 0) * w_r + coeffs.get((0, 1), 0) * w_l
        e = 0.0j
        cos, sin = math.cos(big_c), math.sin(big_c)
        for k in range(n_bins):
            local = slice(k * n_ch, (k + 1) * n_ch)
            s = c_hat @ g[local]
            g[local] -= s * c_hat
            s, e = s * cos + e * sin, -s * sin + e * cos
            g[local] += s * c_hat
            probs[k + 1] = abs(e) ** 2
        norm_error = abs(np.vdot(g, g).real + abs(e) ** 2 - 1.0)
    else:
        # two photons: |g> part (1/sqrt2) sum A_st b_s^+ b_t^+ |0>, |e> part sum e_s sigma_+ b_s^+ |0>
        a = (coeffs.get((2, 0), 0) * np.outer(w_r, w_r)
             + coeffs.get((0, 2), 0) * np.outer(w_l, w_l)
             + coeffs.get((1, 1), 0) * (np.outer(w_r, w_l) + np.outer(w_l, w_r)) / math.sqrt(2.0))
        e = np.zeros(size, dtype=complex)
        c1, s1 = math.cos(big_c), math.sin(big_c)
        c2, s2 = math.cos(math.sqrt(2.0) * big_c), math.sin(math.sqrt(2.0) * big_c)
        for k in range(n_bins):
            local = slice(k * n_ch, (k + 1) * n_ch)
            d = np.zeros(size)
            d[local] = c_hat
            row = c_hat @ a[local, :]          # A d
            alpha = row[local] @ c_hat         # <g, 2_d|psi>
            r_tilde = row - alpha * d          # one photon in d, one elsewhere
            eps = e[local] @ c_hat
            e_perp = e - eps * d
            # |g,2_d> <-> |e,1_d> at angle sqrt2*C; |g,1_d 1_x> <-> |e,1_x> at angle C
            alpha_new = alpha * c2 + eps * s2
            eps_new = -alpha * s2 + eps * c2
            r = math.sqrt(2.0) * r_tilde
            r_new = r * c1 + e_perp * s1
            e_perp = -r * s1 + e_perp * c1
            dr = r_new / math.sqrt(2.0) - r_tilde
            a[local, :] += np.outer(c_hat, dr)
            a[:, local] += np.outer(dr, c_hat)
            a[local, local] += (alpha_new - alpha) * np.outer(c_hat, c_hat)
            e = e_perp + eps_new * d
            probs[k + 1] = np.vdot(e, e).real
        norm_error = abs(np.vdot(a, a).real + np.vdot(e, e).real - 1.0)

    i = int(np.argmax(probs))
    return Trajectory(
        times=times,
        p_values=probs,
        p_max=float(probs[i]),
        t_at_max=float(times[i]),
        metadata={"oracle": "collision-fock", "time_step": dt, "bins": n_bins, "norm_error": norm_error},
    )


def _ladder(dim):
    return np.diag(np.sqrt(np.arange(1, dim)), 1).astype(complex)


def _truncated_coherent(beta, dim):
    amps = np.array([beta**k / math.sqrt(math.factorial(k)) for k in range(dim)], dtype=complex)
    return amps / np.linalg.norm(amps)


def _coherent_oracle(config, params, env_r, env_l, pair: CoherentPair):
    if pair.nbar_r > MAX_ORACLE_NBAR or pair.nbar_l > MAX_ORACLE_NBAR:
        raise CapacityError(f"collision oracle supports mean photon numbers up to {MAX_ORACLE_NBAR}")
    t0, dt, n_bins = _window(config, (env_r, env_l))
    rates = _channels(params)
    dims = [config.bin_dim, config.bin_dim] + [2] * (len(rates) - 2)
    sm = np.array([[0, 1], [0, 0]], dtype=complex)  # |g><e| with basis (g, e)
    total = int(np.prod(dims))

    def embed(op, slot):
        mats = [np.eye(d, dtype=complex) for d in dims]
        mats[slot] = op
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        return out

    gen = np.zeros((2 * total, 2 * total), dtype=complex)
    for j, rate in enumerate(rates):
        b = embed(_ladder(dims[j]), j)
        term = np.kron(sm.conj().T, b)
        gen += math.sqrt(rate * dt) * (term - term.conj().T)
    unitary = expm(-gen)

    # each displaced bin carries alpha_j times the bin's share of the mode
    betas = [pair.alpha_r * bin_amplitudes(env_r, t0, dt, n_bins),
             pair.alpha_l * bin_amplitudes(env_l, t0, dt, n_bins)]
    rho = np.array([[1, 0], [0, 0]], dtype=complex)
    times = t0 + dt * np.arange(n_bins + 1)
    probs = np.zeros(n_bins + 1)
    for k in range(n_bins):
        field = np.array([1.0 + 0j])
        for j, dim in enumerate(dims):
            vec = _truncated_coherent(betas[j][k], dim) if j < 2 else np.eye(dim)[0]
            field = np.kron(field, vec)
        full = np.kron(rho, np.outer(field, field.conj()))
        full = unitary @ full @ unitary.conj().T
        rho = np.einsum("aibi->ab", full.reshape(2, total, 2, total))
        probs[k + 1] = rho[1, 1].real
    i = int(np.argmax(probs))
    return Trajectory(
        times=times,
        p_values=probs,
        p_max=float(probs[i]),
        t_at_max=float(times[i]),
        metadata={"oracle": "collision-coherent", "time_step": dt, "bins": n_bins,
                  "trace_error": abs(np.trace(rho).real - 1.0)},
    )
