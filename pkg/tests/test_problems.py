import pytest

from twomode.coherent import CoherentPair
from twomode.envelopes import PulseEnvelope
from twomode.errors import ConfigError
from twomode.hierarchy import FockSuperposition
from twomode.problems import EvenFock, Problem, RunOptions, describe_state, scale_photons


def test_scale_photons():
    assert scale_photons(EvenFock(1), 4) == EvenFock(4)
    assert scale_photons(CoherentPair(1.0, 3.0, 0.2), 8) == CoherentPair(2.0, 6.0, 0.2)
    assert scale_photons(FockSuperposition.fock(1, 0), 3) == FockSuperposition.fock(3, 0)
    with pytest.raises(ConfigError):
        scale_photons(EvenFock(1), 1.5)
    with pytest.raises(ConfigError):
        scale_photons(FockSuperposition.fock(1, 1), 3)


def test_problem_dispatch_and_metadata():
    env = PulseEnvelope("rectangular", 1.5)
    two = Problem(EvenFock(2), env).run()
    eff = Problem(EvenFock(2), env, options=RunOptions(representation="effective")).run()
    assert two.p_max == pytest.approx(eff.p_max, abs=1e-6)
    assert two.metadata["problem"].state == EvenFock(2)


def test_effective_needs_identical_envelopes():
    env = PulseEnvelope("rectangular", 1.5)
    p = Problem(EvenFock(1), env, env.with_phase(1.0), options=RunOptions(representation="effective"))
    with pytest.raises(ConfigError):
        p.run()


def test_run_options_validation():
    with pytest.raises(ConfigError):
        RunOptions(representation="odd")
    with pytest.raises(ConfigError):
        RunOptions(tail=-1)


def test_describe_state():
    assert describe_state(EvenFock(3)) == "even-fock n=3"
    assert "nbar_r=1" in describe_state(CoherentPair(1.0, 0.0))
    assert "|1,1>" in describe_state(FockSuperposition.fock(1, 1))
