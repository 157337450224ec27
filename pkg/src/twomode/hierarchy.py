"""Recursive equations of motion for atomic matrix elements between two-mode Fock states.

Naming follows the bra-first convention: for occupation multi-indices
``m = (m_r, m_l)`` (bra) and ``n = (n_r, n_l)`` (ket)

    X[m, n] = <g, m| sigma_z(t) |g, n>     with |m| == |n|
    Y[m, n] = <g, m| sigma_-(t) |g, n>     with |m| == |n| - 1
    Z[m, n] = <g, m| sigma_+(t) |g, n>     with |m| == |n| + 1

so the familiar first-level variables read ``Y[(n_r-1, n_l), (n_r, n_l)]`` and
``Z[(n_r, n_l), (n_r-1, n_l)]``. Applying the input-field operator to the ket,
a_j(t)|n> = sqrt(n_j) xi_j(t) |n - e_j>, and its adjoint to the bra closes the
system level by level down to the vacuum element X[0, 0] = -1:

    dX[m,n] = -g0 (X[m,n] + d_mn)
              - 2 sum_j sqrt(g_j) (sqrt(n_j) xi_j Z[m, n-e_j] + sqrt(m_j) xi_j^* Y[m-e_j, n])
    dY[m,n] = -g0/2 Y[m,n] + sum_j sqrt(g_j n_j) xi_j   X[m, n-e_j]
    dZ[m,n] = -g0/2 Z[m,n] + sum_j sqrt(g_j m_j) xi_j^* X[m-e_j, n]

The right-hand side is linear in the state, with coefficients that are either
constant or proportional to xi_j / xi_j^*; :class:`FockGenerator` stores those
pieces as sparse matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .engine import IntegrationPlan, Trajectory, default_tolerance, integrate, plan_for_envelopes
from .envelopes import PulseEnvelope
from .errors import CapacityError, ConfigError, NumericalError, UnsupportedConfigurationError
from .params import SystemParams

N_MAX = 12
NORM_TOL = 1e-12
IMAG_TOL = 1e-9
HERMITICITY_TOL = 1e-9


def _level(total: int) -> list[tuple[int, int]]:
    return [(k, total - k) for k in range(total, -1, -1)]


def _lower(index: tuple[int, int], mode: int) -> tuple[int, int]:
    out = list(index)
    out[mode] -= 1
    return tuple(out)


@dataclass(frozen=True)
class FockSuperposition:
    """Normalized superposition of |n_r, n_l> states sharing one total photon number."""

    total_photons: int
    coefficients: tuple  # ((n_r, n_l), complex) pairs, sorted by key

    def __post_init__(self):
        coeffs = tuple(sorted((tuple(int(v) for v in k), complex(c)) for k, c in self.coefficients))
        if not coeffs:
            raise ConfigError("superposition needs at least one component", field="coefficients")
        seen = set()
        for (nr, nl), _ in coeffs:
            if nr < 0 or nl < 0:
                raise ConfigError(f"negative occupation in {(nr, nl)}", field="coefficients")
            if nr + nl != self.total_photons:
                raise ConfigError(
                    f"component {(nr, nl)} has {nr + nl} photons; mixed totals are not supported"
                    f" (expected {self.total_photons})",
                    field="coefficients",
                )
            if (nr, nl) in seen:
                raise ConfigError(f"duplicate component {(nr, nl)}", field="coefficients")
            seen.add((nr, nl))
        norm = sum(abs(c) ** 2 for _, c in coeffs)
        if abs(norm - 1.0) > NORM_TOL:
            raise ConfigError(f"superposition norm is {norm!r}, expected 1", field="coefficients")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def from_dict(cls, coefficients: dict, normalize: bool = False) -> "FockSuperposition":
        items = [(tuple(k), complex(c)) for k, c in coefficients.items() if c != 0]
        if not items:
            raise ConfigError("superposition needs at least one nonzero component", field="coefficients")
        totals = {sum(k) for k, _ in items}
        if len(totals) != 1:
            raise ConfigError(
                f"components have different photon totals {sorted(totals)}", field="coefficients"
            )
        if normalize:
            norm = math.sqrt(sum(abs(c) ** 2 for _, c in items))
            items = [(k, c / norm) for k, c in items]
        return cls(totals.pop(), tuple(items))

    @classmethod
    def fock(cls, n_r: int, n_l: int) -> "FockSuperposition":
        return cls(n_r + n_l, (((n_r, n_l), 1.0),))

    def as_dict(self) -> dict:
        return dict(self.coefficients)


def even_mode_expand(n: int) -> FockSuperposition:
    """Expand n photons in the even mode, (B_e^dag)^n |0> / sqrt(n!), on the |n_r, n_l> basis."""
    if n < 0:
        raise ConfigError("photon number must be nonnegative", field="n")
    return FockSuperposition(
        n, tuple(((k, n - k), math.sqrt(math.comb(n, k) / 2.0**n)) for k in range(n + 1))
    )


@dataclass(frozen=True, eq=False)
class HierarchyLayout:
    total_photons: int
    x_index: dict
    y_index: dict
    z_index: dict

    @property
    def state_length(self) -> int:
        return len(self.x_index) + len(self.y_index) + len(self.z_index)

    @property
    def x_slice(self) -> slice:
        return slice(0, len(self.x_index))

    @property
    def yz_slice(self) -> slice:
        return slice(len(self.x_index), self.state_length)

    def offset(self, sector: str, bra, ket) -> int:
        table = {"X": self.x_index, "Y": self.y_index, "Z": self.z_index}[sector]
        return table[(tuple(bra), tuple(ket))]

    def sector_counts(self) -> dict:
        return {"X": len(self.x_index), "Y": len(self.y_index), "Z": len(self.z_index)}


@lru_cache(maxsize=None)
def build_layout(total_photons: int, n_max: int = N_MAX) -> HierarchyLayout:
    """Registry of every matrix element needed to close the hierarchy from level N down."""
    if total_photons < 0:
        raise ConfigError("total photon number must be nonnegative", field="total_photons")
    if total_photons > n_max:
        raise CapacityError(f"total photon number {total_photons} exceeds capacity N_max={n_max}")
    x_index, y_index, z_index = {}, {}, {}
    offset = 0
    for level in range(total_photons + 1):
        for m in _level(level):
            for n in _level(level):
                x_index[(m, n)] = offset
                offset += 1
    for level in range(1, total_photons + 1):
        for m in _level(level - 1):
            for n in _level(level):
                y_index[(m, n)] = offset
                offset += 1
    for level in range(1, total_photons + 1):
        for m in _level(level):
            for n in _level(level - 1):
                z_index[(m, n)] = offset
                offset += 1
    return HierarchyLayout(total_photons, x_index, y_index, z_index)


@dataclass
class HierarchyState:
    time: float
    values: np.ndarray


def initial_state(layout: HierarchyLayout, t0: float = 0.0) -> HierarchyState:
    """Atom in |g>: X[m, n] = -delta_mn, Y = Z = 0."""
    values = np.zeros(layout.state_length, dtype=complex)
    for (m, n), i in layout.x_index.items():
        if m == n:
            values[i] = -1.0
    return HierarchyState(t0, values)


class FockGenerator:
    """Sparse pieces of the hierarchy right-hand side.

    dy/dt = decay * y + drift + sum_j (xi_j K_j + conj(xi_j) C_j) y
    with K_r, K_l, C_r, C_l stacked into a single matrix for one matvec per call.
    """

    def __init__(self, layout: HierarchyLayout, params: SystemParams):
        self.layout = layout
        self.params = params
        size = layout.state_length
        g0 = params.gamma0
        root = [math.sqrt(g) for g in params.rates]
        self.decay = np.zeros(size)
        self.drift = np.zeros(size, dtype=complex)
        self.diagonal = np.zeros(size)
        rows, cols, vals = [], [], []

        def add(block, row, col, value):
            # block: 0,1 -> xi_r, xi_l; 2,3 -> conj(xi_r), conj(xi_l)
            rows.append(block * size + row)
            cols.append(col)
            vals.append(value)

        vacuum = ((0, 0), (0, 0))
        for (m, n), i in layout.x_index.items():
            if m == n:
                self.diagonal[i] = 1.0
            if (m, n) == vacuum:
                continue  # held at -1
            self.decay[i] = -g0
            if m == n:
                self.drift[i] = -g0
            for j in range(2):
                if n[j] > 0:
                    add(j, i, layout.z_index[(m, _lower(n, j))], -2.0 * root[j] * math.sqrt(n[j]))
                if m[j] > 0:
                    add(2 + j, i, layout.y_index[(_lower(m, j), n)], -2.0 * root[j] * math.sqrt(m[j]))
        for (m, n), i in layout.y_index.items():
            self.decay[i] = -0.5 * g0
            for j in range(2):
                if n[j] > 0:
                    add(j, i, layout.x_index[(m, _lower(n, j))], root[j] * math.sqrt(n[j]))
        for (m, n), i in layout.z_index.items():
            self.decay[i] = -0.5 * g0
            for j in range(2):
                if m[j] > 0:
                    add(2 + j, i, layout.x_index[(_lower(m, j), n)], root[j] * math.sqrt(m[j]))
        self.coupling = sp.csr_matrix((vals, (rows, cols)), shape=(4 * size, size), dtype=float)

    def __call__(self, y, xi_r: complex, xi_l: complex):
        size = self.layout.state_length
        if y.shape[-1] != size:
            raise ConfigError(f"state length {y.shape[-1]} does not match layout length {size}")
        u = (self.coupling @ y).reshape(4, size)
        drive = xi_r * u[0] + xi_l * u[1] + np.conj(xi_r) * u[2] + np.conj(xi_l) * u[3]
        return self.decay * y + self.drift + drive

    def free_decay(self, y, dt: float):
        """Undriven evolution over dt: X -> -delta + (X + delta) e^{-g0 dt}, Y,Z -> e^{-g0 dt/2}."""
        g0 = self.params.gamma0
        out = np.array(y, dtype=complex)
        xs = self.layout.x_slice
        delta = self.diagonal[xs]
        out[xs] = -delta + (out[xs] + delta) * math.exp(-g0 * dt)
        out[self.layout.yz_slice] *= math.exp(-0.5 * g0 * dt)
        return out


@lru_cache(maxsize=64)
def fock_generator(total_photons: int, params: SystemParams) -> FockGenerator:
    return FockGenerator(build_layout(total_photons), params)


def rhs(layout: HierarchyLayout, params: SystemParams, env_r: PulseEnvelope,
        env_l: PulseEnvelope, state: HierarchyState, t: float) -> np.ndarray:
    values = np.asarray(state.values if isinstance(state, HierarchyState) else state)
    if values.shape[-1] != layout.state_length:
        raise ConfigError(
            f"state length {values.shape[-1]} does not match layout length {layout.state_length}"
        )
    gen = fock_generator(layout.total_photons, params)
    return gen(values, env_r.evaluate(t), env_l.evaluate(t))


def probability_weights(layout: HierarchyLayout, superposition: FockSuperposition) -> np.ndarray:
    if superposition.total_photons != layout.total_photons:
        raise ConfigError(
            f"superposition has N={superposition.total_photons} but layout has N={layout.total_photons}"
        )
    w = np.zeros(layout.state_length, dtype=complex)
    for m, cm in superposition.coefficients:
        for n, cn in superposition.coefficients:
            w[layout.x_index[(m, n)]] += np.conj(cm) * cn
    return w


def probabilities(weights: np.ndarray, states: np.ndarray) -> np.ndarray:
    """P = (1 + sum c_m^* c_n X[m,n]) / 2 for a stack of states."""
    sigma_z = np.asarray(states) @ weights
    if np.any(np.abs(sigma_z.imag) > IMAG_TOL):
        worst = float(np.max(np.abs(sigma_z.imag)))
        raise NumericalError(f"<sigma_z> has imaginary residue {worst:.3g}")
    return 0.5 * (1.0 + sigma_z.real)


def excitation_probability(superposition: FockSuperposition, state: HierarchyState,
                           layout: HierarchyLayout | None = None) -> float:
    if layout is None:
        layout = build_layout(superposition.total_photons)
    values = state.values if isinstance(state, HierarchyState) else state
    return float(probabilities(probability_weights(layout, superposition), np.atleast_2d(values))[0])


def hermiticity_residual(layout: HierarchyLayout, states: np.ndarray) -> float:
    """max over samples of |Z[m,n] - conj(Y[n,m])| and |X[m,n] - conj(X[n,m])|."""
    states = np.atleast_2d(states)
    worst = 0.0
    z_pairs = [(i, layout.y_index[(n, m)]) for (m, n), i in layout.z_index.items()]
    if z_pairs:
        zi, yi = np.array(z_pairs).T
        worst = max(worst, float(np.max(np.abs(states[:, zi] - np.conj(states[:, yi])))))
    x_pairs = [(i, layout.x_index[(n, m)]) for (m, n), i in layout.x_index.items()]
    xi, xj = np.array(x_pairs).T
    worst = max(worst, float(np.max(np.abs(states[:, xi] - np.conj(states[:, xj])))))
    return worst


class _SegmentEnvelopes:
    """Caches per-segment envelope branches for a pair of envelopes."""

    def __init__(self, envelopes):
        self.envelopes = envelopes
        self._cache = {}

    def __call__(self, t, segment):
        branches = self._cache.get(segment)
        if branches is None:
            branches = [env.on_segment(*segment) for env in self.envelopes]
            self._cache[segment] = branches
        return [0.0 if fn is None else scale * float(fn(t)) for scale, fn in branches]


class FockSystem:
    """Hierarchy for one superposition, driven by a fixed pair of envelopes."""

    def __init__(self, superposition: FockSuperposition, env_r: PulseEnvelope,
                 env_l: PulseEnvelope, params: SystemParams):
        self.superposition = superposition
        self.params = params
        self.envelopes = (env_r, env_l)
        self.layout = build_layout(superposition.total_photons)
        self.generator = fock_generator(superposition.total_photons, params)
        self.weights = probability_weights(self.layout, superposition)
        self._xi = _SegmentEnvelopes(self.envelopes)

    def derivative(self, t, y, segment):
        xi_r, xi_l = self._xi(t, segment)
        return self.generator(y, xi_r, xi_l)

    def observable(self, states):
        return probabilities(self.weights, states)

    def initial_values(self):
        return initial_state(self.layout).values

    def default_plan(self, **kwargs) -> IntegrationPlan:
        kwargs.setdefault("tol", default_tolerance(self.superposition.total_photons))
        return plan_for_envelopes(self.envelopes, **kwargs)


def simulate(superposition: FockSuperposition, env_r: PulseEnvelope, env_l: PulseEnvelope | None = None,
             params: SystemParams | None = None, plan: IntegrationPlan | None = None,
             keep_states: bool = False, check_hermiticity: bool = True) -> Trajectory:
    """Excitation probability P(t) for a Fock superposition input."""
    params = params or SystemParams()
    env_l = env_l or env_r
    system = FockSystem(superposition, env_r, env_l, params)
    plan = plan or system.default_plan()
    traj = integrate(
        system.derivative,
        system.initial_values(),
        plan,
        observable=system.observable,
        free_decay=system.generator.free_decay,
        keep_states=keep_states or check_hermiticity,
        metadata={
            "state": "fock",
            "total_photons": superposition.total_photons,
            "coefficients": {f"{k[0]},{k[1]}": c for k, c in superposition.coefficients},
            "env_r": env_r,
            "env_l": env_l,
            "params": params,
        },
    )
    if check_hermiticity:
        residual = hermiticity_residual(system.layout, traj.states)
        traj.metadata["hermiticity_residual"] = residual
        if residual > HERMITICITY_TOL:
            raise NumericalError(f"hermiticity violated along trajectory (residual {residual:.3g})")
        if not keep_states:
            traj.states = None
    return traj


# --- single-mode effective representation for even-mode inputs -------------

def effective_layout_size(n: int) -> int:
    """X_0..X_n, Y_1..Y_n, Z_1..Z_n."""
    return 3 * n + 1


def _check_symmetric(params: SystemParams):
    if not params.is_symmetric:
        raise UnsupportedConfigurationError(
            "the single even-mode representation requires gamma_r == gamma_l"
        )


def effective_initial_values(n: int) -> np.ndarray:
    y = np.zeros(effective_layout_size(n), dtype=complex)
    y[: n + 1] = -1.0
    return y


def _effective_derivative(y, xi, gamma_eff, g0):
    n = (y.size - 1) // 3
    x, yy, z = y[: n + 1], y[n + 1 : 2 * n + 1], y[2 * n + 1 :]
    k = np.arange(1, n + 1)
    c = np.sqrt(gamma_eff * k)
    dx = np.zeros(n + 1, dtype=complex)
    dx[1:] = -g0 * (x[1:] + 1.0) - 2.0 * c * (xi * z + np.conj(xi) * yy)
    dy = -0.5 * g0 * yy + c * xi * x[:-1]
    dz = -0.5 * g0 * z + c * np.conj(xi) * x[:-1]
    return np.concatenate([dx, dy, dz])


def effective_even_mode_rhs(params: SystemParams, env: PulseEnvelope, state, t: float) -> np.ndarray:
    """Single-mode chain for n photons in the even mode with coupling gamma_even.

    ``state`` holds [X_0..X_n, Y_1..Y_n, Z_1..Z_n] where
    X_k = <k|sigma_z|k>, Y_k = <k-1|sigma_-|k>, Z_k = <k|sigma_+|k-1>.
    """
    _check_symmetric(params)
    values = np.asarray(state.values if isinstance(state, HierarchyState) else state, dtype=complex)
    if (values.size - 1) % 3:
        raise ConfigError(f"state length {values.size} is not of the form 3n+1")
    return _effective_derivative(values, env.evaluate(t), params.gamma_even, params.gamma0)


def simulate_even_effective(n: int, env: PulseEnvelope, params: SystemParams | None = None,
                            plan: IntegrationPlan | None = None) -> Trajectory:
    params = params or SystemParams()
    _check_symmetric(params)
    if n < 0:
        raise ConfigError("photon number must be nonnegative", field="n")
    if n > N_MAX:
        raise CapacityError(f"photon number {n} exceeds capacity N_max={N_MAX}")
    g0, g_eff = params.gamma0, params.gamma_even
    xi_seg = _SegmentEnvelopes((env,))

    def derivative(t, y, segment):
        return _effective_derivative(y, xi_seg(t, segment)[0], g_eff, g0)

    def observable(states):
        return 0.5 * (1.0 + np.real(states[:, n]))

    def free_decay(y, dt):
        out = np.array(y, dtype=complex)
        out[: n + 1] = -1.0 + (out[: n + 1] + 1.0) * math.exp(-g0 * dt)
        out[0] = -1.0
        out[n + 1 :] *= math.exp(-0.5 * g0 * dt)
        return out

    plan = plan or plan_for_envelopes((env,), tol=default_tolerance(n))
    return integrate(
        derivative,
        effective_initial_values(n),
        plan,
        observable=observable,
        free_decay=free_decay,
        metadata={"state": "even-fock-effective", "n": n, "env": env, "params": params},
    )
