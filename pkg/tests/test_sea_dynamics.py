import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seathermo import (
    IntegrationError,
    IntegratorConfig,
    ModelConstants,
    StateError,
    beta_from_energy,
    canonical_distribution,
    entropy_production,
    integrate,
    pure_state,
    sea_rate,
    sea_rate_oracle,
    uniform_state,
    validate_state,
)
from seathermo.sea_dynamics import Method

LEVELS3 = np.array([0.0, 1.0, 2.0])


def _random_case(rng, n=None):
    n = n or int(rng.integers(3, 9))
    e = rng.uniform(0, 10, n)
    p = rng.dirichlet(np.ones(n))
    return e, validate_state(p, strict=False)


# rate law against independent forms


def test_rate_matches_lagrange_form(rng):
    for _ in range(200):
        e, s = _random_case(rng)
        assert np.max(np.abs(sea_rate(s, e) - sea_rate_oracle(s, e))) < 1e-10


def test_rate_by_explicit_projection(rng):
    # project -ln p - 1 onto the complement of span{1, e} in the metric diag(p)
    e, s = _random_case(rng, 5)
    p = s.probs
    g = -np.log(p)
    A = np.vstack([np.ones_like(e), e])
    lam = np.linalg.solve((A * p) @ A.T, (A * p) @ g)
    expected = p * (g - A.T @ lam)
    assert np.allclose(sea_rate(s, e), expected, atol=1e-13)


def test_rate_conserves_trace_and_energy(rng):
    for _ in range(100):
        e, s = _random_case(rng)
        r = sea_rate(s, e)
        assert abs(r.sum()) < 1e-12
        assert abs(e @ r) < 1e-11


def test_rate_scales_inversely_with_tau(rng):
    e, s = _random_case(rng)
    a = sea_rate(s, e, ModelConstants(tau=1.0))
    b = sea_rate(s, e, ModelConstants(tau=4.0))
    assert np.allclose(a, 4.0 * b, rtol=1e-13, atol=1e-16)


def test_production_matches_definition(rng):
    for _ in range(200):
        e, s = _random_case(rng)
        rate = sea_rate(s, e)
        direct = -float(np.sum(rate * np.log(s.probs)))
        assert entropy_production(s, e) == pytest.approx(direct, abs=1e-10)
        assert entropy_production(s, e) >= -1e-12


def test_production_scales_with_k(rng):
    e, s = _random_case(rng)
    assert entropy_production(s, e, ModelConstants(k=3.0)) == pytest.approx(3 * entropy_production(s, e), rel=1e-13)


# fixed points


@pytest.mark.parametrize("beta", [-3.0, -0.5, 0.0, 0.7, 5.0])
def test_canonical_states_are_stationary(beta):
    s = canonical_distribution(beta, LEVELS3)
    assert np.max(np.abs(sea_rate(s, LEVELS3))) < 1e-14
    assert abs(entropy_production(s, LEVELS3)) < 1e-14


def test_partial_canonical_is_stationary():
    s = canonical_distribution(0.8, [0.0, 1.0, 2.0, 3.5], support=[0, 2, 3])
    r = sea_rate(s, [0.0, 1.0, 2.0, 3.5])
    assert r[1] == 0.0
    assert np.max(np.abs(r)) < 1e-14


def test_degenerate_cases_have_zero_rate():
    assert not sea_rate(pure_state(3, 1), LEVELS3).any()
    # all support on a single energy value
    s = validate_state([0.3, 0.7, 0.0])
    assert not sea_rate(s, [1.0, 1.0, 4.0]).any()
    assert entropy_production(s, [1.0, 1.0, 4.0]) == 0.0


@given(st.floats(0.001, 0.999), st.floats(-5, 5), st.floats(0.1, 5))
@settings(max_examples=200, deadline=None)
def test_two_level_states_are_stationary(a, e0, gap):
    s = validate_state([a, 1.0 - a])
    assert np.max(np.abs(sea_rate(s, [e0, e0 + gap]))) <= 1e-12


def test_degenerate_level_still_equalizes():
    # two energies but three states: mass flows between the equal-energy pair
    s = validate_state([0.2, 0.4, 0.4])
    r = sea_rate(s, [0.0, 1.0, 0.0])
    assert r[0] > 0 > r[2] and abs(r[1]) < 1e-15


def test_mismatched_lengths():
    with pytest.raises(StateError):
        sea_rate(uniform_state(2), LEVELS3)


# integration


def test_three_level_relaxation():
    s0 = validate_state([0.5, 0.2, 0.3])
    traj = integrate(s0, LEVELS3, config=IntegratorConfig(t_end=30.0))
    target = beta_from_energy(0.8, LEVELS3).distribution.probs
    assert np.max(np.abs(traj.final.state.probs - target)) < 1e-6
    assert np.all(np.diff(traj.entropies) >= -1e-12)
    assert traj.times[0] == 0.0 and traj.times[-1] == pytest.approx(30.0)


def test_rk45_agrees_with_rk4():
    s0 = validate_state([0.1, 0.2, 0.3, 0.4])
    e = [0.0, 0.5, 2.0, 3.0]
    a = integrate(s0, e, config=IntegratorConfig(t_end=3.0)).final.state.probs
    b = integrate(s0, e, config=IntegratorConfig(method=Method.RK45, t_end=3.0, tolerance=1e-11)).final.state.probs
    assert np.max(np.abs(a - b)) < 1e-9


def test_time_is_in_units_of_tau():
    s0 = validate_state([0.5, 0.2, 0.3])
    a = integrate(s0, LEVELS3, ModelConstants(tau=1.0), IntegratorConfig(t_end=2.0))
    b = integrate(s0, LEVELS3, ModelConstants(tau=3.0), IntegratorConfig(t_end=2.0))
    assert b.times[-1] == pytest.approx(6.0)
    assert np.allclose(a.final.state.probs, b.final.state.probs, atol=1e-13)


def test_stride_sampling_keeps_final_point():
    s0 = validate_state([0.5, 0.2, 0.3])
    traj = integrate(s0, LEVELS3, config=IntegratorConfig(t_end=1.0, step=0.03, sample_stride=7))
    # 34 steps of length 1/34; samples at 0, 7, 14, 21, 28 and the last step
    assert len(traj) == 6
    assert traj.times[-1] == pytest.approx(1.0)


def test_pure_and_stationary_initial_states():
    traj = integrate(pure_state(3, 0), LEVELS3, config=IntegratorConfig(t_end=1.0, sample_stride=50))
    assert np.all(traj.probs == np.array([1.0, 0.0, 0.0]))
    assert np.all(traj.entropies == 0.0)
    u = integrate(uniform_state(3), LEVELS3, config=IntegratorConfig(method="rk45", t_end=5.0))
    assert np.allclose(u.final.state.probs, 1 / 3, atol=1e-15)


def test_backward_integration_warns():
    s0 = validate_state([0.45, 0.3, 0.25])
    with pytest.warns(RuntimeWarning):
        traj = integrate(s0, LEVELS3, config=IntegratorConfig(t_end=-0.5))
    assert traj.times[0] == pytest.approx(-0.5) and traj.times[-1] == 0.0
    # going back in time lowers the entropy
    assert traj.entropies[0] < traj.entropies[-1]


def test_backward_into_the_boundary_aborts():
    s0 = validate_state([0.98, 0.01, 0.01])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        with pytest.raises(IntegrationError):
            integrate(s0, LEVELS3, config=IntegratorConfig(t_end=-50.0, step=0.5))


@pytest.mark.parametrize("kw", [{"t_end": 0.0}, {"t_end": math.nan}, {"step": 0.0}, {"method": "euler"},
                                {"method": "rk45", "tolerance": 1.0}, {"sample_stride": 0}])
def test_integrator_config_validation(kw):
    with pytest.raises(ValueError):
        IntegratorConfig(**kw)


def test_gap_relaxes_to_partial_canonical():
    # three occupied levels around an empty one: a real relaxation, not a fixed point
    e = np.array([0.0, 1.0, 2.0, 3.0])
    s0 = validate_state([0.4, 0.0, 0.5, 0.1])
    traj = integrate(s0, e, config=IntegratorConfig(t_end=40.0, sample_stride=100))
    assert np.all(traj.probs[:, 1] == 0.0)
    target = beta_from_energy(traj.energies[0], e, support=[0, 2, 3]).distribution.probs
    assert np.max(np.abs(traj.probs[0] - target)) > 0.1
    assert np.max(np.abs(traj.final.state.probs - target)) < 1e-9
