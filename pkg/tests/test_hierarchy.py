import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twomode import hierarchy as H
from twomode.engine import plan_for_envelopes
from twomode.envelopes import PulseEnvelope
from twomode.errors import CapacityError, ConfigError, UnsupportedConfigurationError
from twomode.hierarchy import FockSuperposition
from twomode.params import SystemParams

from conftest import sup_norm


@pytest.mark.parametrize("n, counts, length", [
    (0, {"X": 1, "Y": 0, "Z": 0}, 1),
    (1, {"X": 5, "Y": 2, "Z": 2}, 9),
    (2, {"X": 14, "Y": 8, "Z": 8}, 30),
])
def test_layout_counts(n, counts, length):
    layout = H.build_layout(n)
    assert layout.sector_counts() == counts
    assert layout.state_length == length


def test_layout_capacity():
    with pytest.raises(CapacityError):
        H.build_layout(H.N_MAX + 1)


def test_level_one_equations_by_hand():
    """Level-1 equations written out term by term, complex envelopes, random state."""
    gr, gl, ge = 0.3, 0.45, 0.25
    g0 = gr + gl + ge
    params = SystemParams(gr, gl, ge)
    env_r = PulseEnvelope("rectangular", 1.0, 0.4)
    env_l = PulseEnvelope("gaussian", 2.0, -1.1)
    t = -0.3
    xr, xl = env_r.evaluate(t), env_l.evaluate(t)
    layout = H.build_layout(1)
    rng = np.random.default_rng(1)
    y = rng.normal(size=9) + 1j * rng.normal(size=9)
    y[layout.offset("X", (0, 0), (0, 0))] = -1.0

    def at(s, m, n):
        return y[layout.offset(s, m, n)]

    g, r, l = (0, 0), (1, 0), (0, 1)
    x00 = -1.0
    sr, sl = math.sqrt(gr), math.sqrt(gl)
    expected = {
        ("X", g, g): 0.0,
        ("X", r, r): -g0 * (at("X", r, r) + 1) - 2 * sr * (xr * at("Z", r, g) + np.conj(xr) * at("Y", g, r)),
        ("X", l, l): -g0 * (at("X", l, l) + 1) - 2 * sl * (xl * at("Z", l, g) + np.conj(xl) * at("Y", g, l)),
        ("X", r, l): -g0 * at("X", r, l) - 2 * (sl * xl * at("Z", r, g) + sr * np.conj(xr) * at("Y", g, l)),
        ("X", l, r): -g0 * at("X", l, r) - 2 * (sr * xr * at("Z", l, g) + sl * np.conj(xl) * at("Y", g, r)),
        ("Y", g, r): -0.5 * g0 * at("Y", g, r) + sr * xr * x00,
        ("Y", g, l): -0.5 * g0 * at("Y", g, l) + sl * xl * x00,
        ("Z", r, g): -0.5 * g0 * at("Z", r, g) + sr * np.conj(xr) * x00,
        ("Z", l, g): -0.5 * g0 * at("Z", l, g) + sl * np.conj(xl) * x00,
    }
    got = H.rhs(layout, params, env_r, env_l, H.HierarchyState(t, y), t)
    for (s, m, n), value in expected.items():
        assert got[layout.offset(s, m, n)] == pytest.approx(value, abs=1e-14)


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_ground_state_is_stationary_without_drive(n, params):
    layout = H.build_layout(n)
    env = PulseEnvelope("rectangular", 1.0)
    state = H.initial_state(layout)
    d = H.rhs(layout, params, env, env, state, 5.0)
    assert np.all(d == 0)


def test_initial_probability_is_zero():
    sup = H.even_mode_expand(3)
    assert H.excitation_probability(sup, H.initial_state(H.build_layout(3))) == 0.0


def test_even_mode_expand():
    assert H.even_mode_expand(0).as_dict() == {(0, 0): 1.0}
    one = H.even_mode_expand(1).as_dict()
    assert one[(1, 0)] == pytest.approx(1 / math.sqrt(2)) and one[(0, 1)] == pytest.approx(1 / math.sqrt(2))
    two = H.even_mode_expand(2).as_dict()
    assert two == pytest.approx({(2, 0): 0.5, (1, 1): 1 / math.sqrt(2), (0, 2): 0.5})


def test_superposition_validation():
    with pytest.raises(ConfigError):
        FockSuperposition.from_dict({(1, 0): 1.0, (1, 1): 0.0 + 1e-3})
    with pytest.raises(ConfigError):
        FockSuperposition.from_dict({(1, 0): 0.5})
    sup = FockSuperposition.from_dict({(1, 0): 1.0, (0, 1): 1j}, normalize=True)
    assert sum(abs(c) ** 2 for _, c in sup.coefficients) == pytest.approx(1.0, abs=1e-15)


def test_single_photon_even_mode_reaches_one(rising, params):
    traj = H.simulate(H.even_mode_expand(1), rising, rising, params)
    assert traj.p_max == pytest.approx(1.0, abs=1e-3)
    assert traj.t_at_max == pytest.approx(0.0, abs=1e-6)


def test_single_photon_single_mode_reaches_half(rising, params):
    traj = H.simulate(FockSuperposition.fock(1, 0), rising, rising, params)
    assert traj.p_max == pytest.approx(0.5, abs=1e-3)


def test_hermiticity_and_bounds_along_trajectory(params):
    env = PulseEnvelope("gaussian", 1.2)
    sup = H.even_mode_expand(3)
    traj = H.simulate(sup, env, env, params, keep_states=True)
    layout = H.build_layout(3)
    assert traj.metadata["hermiticity_residual"] <= 1e-9
    assert H.hermiticity_residual(layout, traj.states) <= 1e-9
    diag = [i for (m, n), i in layout.x_index.items() if m == n]
    assert np.all(np.abs(traj.states[:, diag].real) <= 1 + 1e-6)
    assert np.all(traj.p_values >= -1e-6) and np.all(traj.p_values <= 1 + 1e-6)


def test_state_equivalence_11_vs_20_02(rect2, params):
    a = H.simulate(FockSuperposition.fock(1, 1), rect2, rect2, params)
    b = H.simulate(FockSuperposition.from_dict({(2, 0): 1 / math.sqrt(2), (0, 2): 1 / math.sqrt(2)}),
                   rect2, rect2, params)
    assert sup_norm(a.p_values, b.p_values) <= 1e-8


@settings(max_examples=8, deadline=None)
@given(phase=st.floats(0.0, 2 * math.pi))
def test_fock_phase_indifference(phase):
    env = PulseEnvelope("rectangular", 2.0)
    params = SystemParams()
    base = H.simulate(FockSuperposition.fock(1, 1), env, env, params)
    turned = H.simulate(FockSuperposition.fock(1, 1), env, env.with_phase(phase), params)
    assert sup_norm(base.p_values, turned.p_values) <= 1e-8


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_even_mode_dual_representation(n, params):
    env = PulseEnvelope("rectangular", 1.5)
    two_mode = H.simulate(H.even_mode_expand(n), env, env, params)
    plan = plan_for_envelopes((env,), tol=1e-9)
    single = H.simulate_even_effective(n, env, params, plan)
    assert np.array_equal(two_mode.times, single.times)
    assert sup_norm(two_mode.p_values, single.p_values) <= 1e-6


def test_effective_vacuum_stays_dark(rising, params):
    traj = H.simulate_even_effective(0, rising, params)
    assert np.all(traj.p_values == 0.0)


def test_effective_rejects_asymmetric_rates(rising):
    with pytest.raises(UnsupportedConfigurationError):
        H.simulate_even_effective(1, rising, SystemParams(0.7, 0.3))
    with pytest.raises(UnsupportedConfigurationError):
        H.effective_even_mode_rhs(SystemParams(0.7, 0.3), rising, H.effective_initial_values(1), -1.0)


def test_effective_layout():
    assert H.effective_layout_size(4) == 13
    y = H.effective_initial_values(2)
    assert list(y) == [-1, -1, -1, 0, 0, 0, 0]


def test_imaginary_residue_is_rejected():
    layout = H.build_layout(1)
    sup = H.even_mode_expand(1)
    state = H.initial_state(layout).values.copy()
    state[layout.offset("X", (1, 0), (0, 1))] = 1e-3j
    state[layout.offset("X", (0, 1), (1, 0))] = 1e-3j  # not the conjugate
    from twomode.errors import NumericalError
    with pytest.raises(NumericalError):
        H.excitation_probability(sup, state, layout)
