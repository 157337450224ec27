import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twomode.envelopes import KINDS, PulseEnvelope, is_normalized, norm_check, support
from twomode.errors import ConfigError


def test_rectangular_values():
    env = PulseEnvelope("rectangular", 2.0)
    assert env.evaluate(-0.5) == pytest.approx(1.0, abs=1e-15)
    assert env.evaluate(0.1) == 0.0
    assert env.evaluate(-2.1) == 0.0


def test_rising_exponential_left_limit():
    env = PulseEnvelope("rising-exponential", 1.0)
    assert abs(env.evaluate(-1e-12)) == pytest.approx(1.0, abs=1e-11)
    assert env.evaluate(0.5) == 0.0


def test_supports():
    assert support(PulseEnvelope("rectangular", 1.0)) == (-2.0, 0.0)
    lo, hi = PulseEnvelope("rising-exponential", 1.0, truncation_epsilon=1e-10).support()
    assert lo == pytest.approx(math.log(1e-10)) and lo == pytest.approx(-23.0258, abs=1e-4)
    assert hi == 0.0


def test_gaussian_support_holds_all_but_epsilon():
    from scipy import integrate

    env = PulseEnvelope("gaussian", 0.7, truncation_epsilon=1e-8)
    lo, hi = env.support()
    inside, _ = integrate.quad(lambda t: env.shape(t) ** 2, lo, hi, epsabs=1e-14)
    assert 1.0 - inside <= 1e-8 * 1.01


def test_gaussian_rms_bandwidth():
    # spectral std of the field amplitude equals the bandwidth
    om = 1.3
    env = PulseEnvelope("gaussian", om)
    t = np.linspace(*env.support(), 20001)
    dt = t[1] - t[0]
    amp = env.shape(t)
    w = np.fft.fftshift(np.fft.fftfreq(len(t), dt)) * 2 * math.pi
    spec = np.abs(np.fft.fftshift(np.fft.fft(amp))) ** 2
    rms = math.sqrt(np.sum(w**2 * spec) / np.sum(spec))
    assert rms == pytest.approx(om, rel=1e-3)


def test_norm_check_examples():
    assert norm_check(PulseEnvelope("rectangular", 0.37)) <= 1e-12
    env = PulseEnvelope("rising-exponential", 3.0)
    assert norm_check(env) <= env.truncation_epsilon * 1.01


def test_norm_check_reports_misscaled_envelope():
    class Scaled:
        def __init__(self, env, factor):
            self.env, self.factor = env, factor

        def evaluate(self, t):
            return self.factor * self.env.evaluate(t)

        def support(self):
            return self.env.support()

    bad = Scaled(PulseEnvelope("rectangular", 1.0), 1.1)
    assert norm_check(bad) == pytest.approx(0.21, abs=1e-9)
    assert not is_normalized(bad)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_invalid_bandwidth_names_field(bad):
    with pytest.raises(ConfigError) as info:
        PulseEnvelope("rectangular", bad)
    assert info.value.field == "bandwidth"


def test_unknown_kind():
    with pytest.raises(ConfigError):
        PulseEnvelope("sech", 1.0)


@settings(max_examples=30, deadline=None)
@given(kind=st.sampled_from(KINDS), log_om=st.floats(-2.0, 2.0))
def test_normalized_over_bandwidth_range(kind, log_om):
    assert norm_check(PulseEnvelope(kind, 10.0**log_om)) <= 1e-8


@settings(max_examples=50, deadline=None)
@given(kind=st.sampled_from(KINDS), phase=st.floats(-10, 10), t=st.floats(-5, 1))
def test_phase_is_unit_modulus_factor(kind, phase, t):
    base = PulseEnvelope(kind, 1.0)
    rotated = base.with_phase(phase)
    assert abs(rotated.evaluate(t)) == pytest.approx(abs(base.evaluate(t)), abs=1e-15)
    assert rotated.evaluate(t) == pytest.approx(base.evaluate(t) * complex(math.cos(phase), math.sin(phase)))


def test_evaluate_is_deterministic_and_vectorized():
    env = PulseEnvelope("gaussian", 2.0, 0.3)
    t = np.linspace(-3, 3, 101)
    a, b = env.evaluate(t), env(t)
    assert np.array_equal(a, b)
    assert np.array_equal(a, [env.evaluate(x) for x in t])
