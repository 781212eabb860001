import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_belief
from infoplan import oracle
from infoplan.core import DegenerateBelief, DomainError
from infoplan.domains import LightDark2D
from infoplan.filtering import (
    ParticleBelief,
    expected_entropy_estimate,
    expected_state_reward,
    maybe_resample,
    posterior,
    posterior_from_likelihood,
    predict,
    sample_observation_set,
    systematic_resample,
)


def test_belief_validation():
    with pytest.raises(DomainError):
        ParticleBelief(np.zeros((0, 2)), np.zeros(0))
    with pytest.raises(DomainError):
        ParticleBelief(np.zeros((2, 2)), [0.5, 0.4])
    with pytest.raises(DomainError):
        ParticleBelief(np.zeros((2, 2)), [1.5, -0.5])
    with pytest.raises(DomainError):
        ParticleBelief([[np.nan, 0.0]], [1.0])
    b = ParticleBelief.uniform(np.arange(6.0).reshape(3, 2))
    assert len(b) == 3 and b.effective_sample_size() == pytest.approx(3.0)
    with pytest.raises(ValueError):
        b.states[0, 0] = 1.0


def test_predict_identity_transition(static_model):
    b = random_belief(np.random.default_rng(0), 5)
    bp = predict(b, 0, static_model, np.random.default_rng(1))
    np.testing.assert_array_equal(bp.states, b.states)
    assert bp.weights is b.weights


def test_predict_null_action_without_noise():
    m = LightDark2D(transition_cov=1e-20 * np.eye(2))
    b = random_belief(np.random.default_rng(0), 5)
    bp = predict(b, 8, m, np.random.default_rng(1))
    np.testing.assert_allclose(bp.states, b.states, atol=1e-8)


def test_predict_is_deterministic_per_seed(lightdark):
    b = random_belief(np.random.default_rng(0), 8)
    a = predict(b, 3, lightdark, np.random.default_rng(42)).states
    c = predict(b, 3, lightdark, np.random.default_rng(42)).states
    assert a.tobytes() == c.tobytes()


def test_posterior_examples(static_model, lightdark):
    b = ParticleBelief.uniform(np.zeros((3, 1)))
    bp = predict(b, 0, static_model, np.random.default_rng(0))
    np.testing.assert_allclose(posterior(bp, [0.0], static_model).weights, b.weights)
    np.testing.assert_allclose(posterior_from_likelihood(bp, np.array([0.2, 0.3, 0.5])).weights, [0.2, 0.3, 0.5])
    np.testing.assert_allclose(posterior_from_likelihood(bp, np.array([0.0, 2.0, 0.0])).weights, [0, 1, 0])
    with pytest.raises(DegenerateBelief):
        posterior_from_likelihood(bp, np.zeros(3))


def test_sample_observation_set(lightdark, static_model):
    b = random_belief(np.random.default_rng(0), 6)
    bp = predict(b, 0, lightdark, np.random.default_rng(0))
    with pytest.raises(ValueError):
        sample_observation_set(bp, 0, np.random.default_rng(0), lightdark)
    a = sample_observation_set(bp, 5, np.random.default_rng(3), lightdark)
    c = sample_observation_set(bp, 5, np.random.default_rng(3), lightdark)
    assert a.shape == (5, 2) and a.tobytes() == c.tobytes()
    # deterministic sensor: every sample is one of the particle states
    bp0 = predict(b, 0, static_model, np.random.default_rng(0))
    obs = sample_observation_set(bp0, 20, np.random.default_rng(1), static_model)
    assert all(any(np.array_equal(o, s) for s in b.states) for o in obs)


def test_observation_sampling_follows_weights(static_model):
    states = np.arange(3.0)[:, None]
    bp = predict(ParticleBelief(states, [0.1, 0.6, 0.3]), 0, static_model, np.random.default_rng(0))
    obs = sample_observation_set(bp, 30000, np.random.default_rng(1), static_model)
    freq = np.bincount(obs[:, 0].astype(int), minlength=3) / 30000
    np.testing.assert_allclose(freq, [0.1, 0.6, 0.3], atol=0.015)


def test_single_particle_entropy_is_zero(static_model):
    bp = predict(ParticleBelief.uniform(np.zeros((1, 2))), 0, static_model, np.random.default_rng(0))
    assert expected_entropy_estimate(bp, np.zeros((3, 2)), static_model) == 0.0


def test_two_particle_hand_case(lightdark):
    # N=2, M=1 against the literal transcription
    b = ParticleBelief([[0.0, 0.0], [0.5, 0.2]], [0.3, 0.7])
    bp = predict(b, 1, lightdark, np.random.default_rng(5))
    o = np.array([[0.6, 1.1]])
    ref = oracle.naive_expected_entropy(b.states, b.weights, bp.states, o, 1, lightdark)
    assert expected_entropy_estimate(bp, o, lightdark) == pytest.approx(ref, abs=1e-12)


def test_degenerate_observation_set_raises(lightdark):
    b = random_belief(np.random.default_rng(0), 4)
    bp = predict(b, 0, lightdark, np.random.default_rng(0))
    with pytest.raises(DegenerateBelief):
        expected_entropy_estimate(bp, [[1e6, 1e6]], lightdark)
    with pytest.raises(DegenerateBelief):
        expected_state_reward(bp, [[1e6, 1e6]], 0, lightdark)


def test_zero_weight_particles_are_skipped(lightdark):
    b = ParticleBelief([[0.0, 0.0], [1.0, 1.0], [50.0, 50.0]], [0.5, 0.5, 0.0])
    bp = predict(b, 0, lightdark, np.random.default_rng(0))
    obs = sample_observation_set(bp, 3, np.random.default_rng(1), lightdark)
    val = expected_entropy_estimate(bp, obs, lightdark)
    assert np.isfinite(val)
    ref = oracle.naive_expected_entropy(b.states, b.weights, bp.states, obs, 0, lightdark)
    assert val == pytest.approx(ref, abs=1e-9)


def test_systematic_resample_keeps_heavy_particles():
    b = ParticleBelief(np.arange(4.0)[:, None], [0.0, 0.0, 1.0, 0.0])
    r = systematic_resample(b, np.random.default_rng(0))
    np.testing.assert_array_equal(r.states[:, 0], [2, 2, 2, 2])
    u = ParticleBelief.uniform(np.arange(4.0)[:, None])
    assert maybe_resample(u, np.random.default_rng(0)) is u


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 12), st.integers(1, 5))
def test_estimator_matches_literal_transcription(seed, n, m):
    rng = np.random.default_rng(seed)
    model = LightDark2D()
    b = random_belief(rng, n, scale=2.0)
    a = int(rng.integers(9))
    bp = predict(b, a, model, rng)
    obs = sample_observation_set(bp, m, rng, model)
    ref = oracle.naive_expected_entropy(b.states, b.weights, bp.states, obs, a, model)
    assert expected_entropy_estimate(bp, obs, model) == pytest.approx(ref, rel=1e-9, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 15))
def test_posterior_weights_normalised(seed, n):
    rng = np.random.default_rng(seed)
    model = LightDark2D()
    bp = predict(random_belief(rng, n), 0, model, rng)
    o = sample_observation_set(bp, 1, rng, model)[0]
    assert posterior(bp, o, model).weights.sum() == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 12), st.integers(1, 4))
def test_estimator_permutation_invariant(seed, n, m):
    rng = np.random.default_rng(seed)
    model = LightDark2D()
    b = random_belief(rng, n)
    bp = predict(b, 2, model, rng)
    obs = sample_observation_set(bp, m, rng, model)
    perm = rng.permutation(n)
    b2 = ParticleBelief(b.states[perm], b.weights[perm])
    bp2 = predict(b2, 2, model, rng)
    # reuse the propagated states so both beliefs describe the same particles
    object.__setattr__(bp2, "states", bp.states[perm])
    v1 = expected_entropy_estimate(bp, obs, model)
    v2 = expected_entropy_estimate(bp2, obs, model)
    assert v1 == pytest.approx(v2, rel=1e-12, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 12), st.integers(2, 6))
def test_duplicated_observation_equals_single(seed, n, m):
    rng = np.random.default_rng(seed)
    model = LightDark2D()
    bp = predict(random_belief(rng, n), 4, model, rng)
    o = sample_observation_set(bp, 1, rng, model)
    single = expected_entropy_estimate(bp, o, model)
    repeated = expected_entropy_estimate(bp, np.repeat(o, m, axis=0), model)
    assert repeated == pytest.approx(single, rel=1e-12, abs=1e-12)
