import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seathermo import (
    StateError,
    Verdict,
    beta_from_energy,
    canonical_distribution,
    entropy,
    is_equilibrium,
    partition_function,
    temperature_of_stable_state,
    validate_state,
)
from seathermo.core import ModelConstants
from seathermo.equilibrium import canonical_entropy_identity


# two-level closed forms: E = 1 / (1 + e^beta), so beta = ln((1 - E) / E)


@pytest.mark.parametrize("E", [0.01, 0.1, 0.25, 0.4, 0.5, 0.6, 0.9, 0.999])
def test_two_level_inversion(E):
    sol = beta_from_energy(E, [0.0, 1.0])
    assert sol.beta == pytest.approx(math.log((1 - E) / E), abs=1e-12)
    assert sol.energy == pytest.approx(E, abs=1e-15)


def test_quarter_energy_gives_ln3():
    sol = beta_from_energy(0.25, [0.0, 1.0])
    assert abs(sol.beta - math.log(3)) < 1e-10
    assert np.allclose(sol.distribution.probs, [0.75, 0.25], atol=1e-15)
    assert sol.temperature == pytest.approx(1 / math.log(3))


def test_partition_function_values():
    pf = partition_function(math.log(2), [0.0, 1.0, 2.0])
    assert pf.value == pytest.approx(1 + 0.5 + 0.25)
    assert pf.log_value == pytest.approx(math.log(1.75))
    # enormous beta: shifted sum stays finite, log is still exact
    pf = partition_function(1e4, [3.0, 4.0])
    assert pf.shifted == pytest.approx(1.0) and pf.log_value == pytest.approx(-3e4)
    assert partition_function(-1e4, [3.0, 4.0]).log_value == pytest.approx(4e4)


def test_extreme_beta_distributions_are_finite():
    for b in (-1e6, -800.0, 800.0, 1e6):
        p = canonical_distribution(b, [0.0, 1.0, 2.0]).probs
        assert np.all(np.isfinite(p))
    assert canonical_distribution(math.inf, [0.0, 0.0, 1.0]).probs.tolist() == [0.5, 0.5, 0.0]
    assert canonical_distribution(-math.inf, [0.0, 1.0, 1.0]).probs.tolist() == [0.0, 0.5, 0.5]


def test_endpoints_and_mean():
    lv = [0.0, 1.0, 2.0]
    lo, mid, hi = (beta_from_energy(E, lv) for E in (0.0, 1.0, 2.0))
    assert lo.beta == math.inf and lo.zero_temperature and lo.temperature == 0.0
    assert hi.beta == -math.inf and math.copysign(1, hi.temperature) == -1
    assert mid.beta == 0.0 and mid.infinite_temperature and mid.temperature == math.inf
    assert np.allclose(mid.distribution.probs, 1 / 3)
    for bad in (-0.1, 2.1, math.nan):
        with pytest.raises(StateError):
            beta_from_energy(bad, lv)


def test_degenerate_spectrum_is_infinite_temperature():
    sol = beta_from_energy(2.0, [2.0, 2.0, 2.0])
    assert sol.beta == 0.0 and sol.entropy == pytest.approx(math.log(3))


def test_support_restricted_inversion():
    lv = [0.0, 1.0, 2.0]
    sol = beta_from_energy(1.0, lv, support=[0, 2])
    assert sol.distribution.probs.tolist() == [0.5, 0.0, 0.5]
    sol = beta_from_energy(0.5, lv, support=[0, 2])
    # p2/p0 = e^{-2 beta} = 1/3
    assert sol.beta == pytest.approx(0.5 * math.log(3), abs=1e-12)
    with pytest.raises(StateError):
        beta_from_energy(0.5, lv, support=[1, 2])


@given(st.floats(-20, 20))
@settings(max_examples=200, deadline=None)
def test_round_trip_positive_precision_multilevel(beta):
    lv = np.array([0.0, 0.3, 1.1, 2.0])
    E = float(canonical_distribution(beta, lv).probs @ lv)
    back = beta_from_energy(E, lv).beta
    # conditioning: dbeta = dE / Var, Var ~ exp(-|beta| gap) in the tails
    assert back == pytest.approx(beta, abs=1e-6, rel=1e-8)


def test_temperature_of_stable_state():
    assert temperature_of_stable_state(1.0, [0.0, 1.0, 2.0]) == math.inf
    T = temperature_of_stable_state(0.25, [0.0, 1.0], ModelConstants(k=2.0))
    assert T == pytest.approx(1 / (2 * math.log(3)))
    with pytest.raises(StateError):
        temperature_of_stable_state(0.0, [0.0, 1.0])


@pytest.mark.parametrize("beta", [-4.0, -0.3, 0.0, 0.5, 7.0])
def test_entropy_identity(beta):
    lv = [0.0, 0.7, 1.0, 2.5]
    s = canonical_distribution(beta, lv)
    assert canonical_entropy_identity(beta, lv) == pytest.approx(entropy(s), abs=1e-12)


def test_is_equilibrium_verdicts():
    lv = [0.0, 1.0, 2.0]
    assert is_equilibrium(canonical_distribution(0.4, lv), lv) is Verdict.STABLE
    assert is_equilibrium(canonical_distribution(0.4, lv, support=[0, 1]), lv) is Verdict.PARTIAL
    assert is_equilibrium(validate_state([0.5, 0.2, 0.3]), lv) is Verdict.NONE
    # a pure state is trivially canonical on its own support
    assert is_equilibrium(validate_state([0.0, 1.0, 0.0]), lv) is Verdict.PARTIAL
    assert Verdict.STABLE == "stable"
