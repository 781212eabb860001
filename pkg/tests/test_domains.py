import math

import numpy as np
import pytest
from scipy import stats

from infoplan import oracle
from infoplan.core import RewardSpec
from infoplan.domains import (
    DIRECTIONS,
    NULL_ACTION,
    DiscreteGridPomdp,
    LightDark2D,
    LinearGaussianModel,
    abstract_observation_table,
    discrete_exact_expected_entropy,
    discrete_exact_posterior,
    discrete_exact_predict,
    discrete_exact_state_reward,
    lightdark_from_file,
    load_config,
)
from infoplan.filtering import ParticleBelief


def test_action_geometry():
    assert DIRECTIONS.shape == (9, 2)
    np.testing.assert_array_equal(DIRECTIONS[0], [1.0, 0.0])
    np.testing.assert_array_equal(DIRECTIONS[2], [0.0, 1.0])
    np.testing.assert_array_equal(DIRECTIONS[NULL_ACTION], [0.0, 0.0])
    np.testing.assert_allclose(np.linalg.norm(DIRECTIONS[:8], axis=1), 1.0)


def test_move_without_noise(lightdark):
    x = np.array([[1.0, 2.0]])
    np.testing.assert_array_equal(lightdark.move(x, NULL_ACTION), x)
    np.testing.assert_array_equal(lightdark.move(x, 0), [[2.0, 2.0]])


def test_transition_reproducible(lightdark):
    x = np.zeros((4, 2))
    a = lightdark.sample_transition(x, 1, np.random.default_rng(9))
    b = lightdark.sample_transition(x, 1, np.random.default_rng(9))
    assert a.tobytes() == b.tobytes()


def test_noise_scale_examples():
    m = LightDark2D(obs_noise_base=1.0, obs_noise_floor=0.1)
    assert m.noise_scale(m.beacons[:1])[0] == pytest.approx(0.1)
    x = np.array([[0.5, 6.0]])
    o = m.sample_observation(x, np.random.default_rng(0))
    assert m.observation_density(x, x)[0, 0] == pytest.approx(1 / (2 * math.pi * m.noise_scale(x)[0] ** 2))
    quiet = LightDark2D(obs_noise_base=0.0)
    np.testing.assert_array_equal(quiet.sample_observation(x, np.random.default_rng(0)), x)
    assert o.shape == (1, 2)


def test_transition_sampler_matches_density(lightdark):
    # KS on the whitened displacement
    rng = np.random.default_rng(0)
    x = np.array([[1.0, -2.0]])
    s = lightdark.sample_transition(np.repeat(x, 100000, axis=0), 3, rng)
    z = (s - x - DIRECTIONS[3]) / math.sqrt(0.1)
    for dim in range(2):
        assert stats.kstest(z[:, dim], "norm").pvalue > 0.001
    # density integrates to one over a grid
    g = np.linspace(-2, 2, 201)
    gx, gy = np.meshgrid(g, g)
    pts = np.column_stack([gx.ravel(), gy.ravel()]) + x + DIRECTIONS[3]
    total = lightdark.transition_density(pts, x, 3).sum() * (g[1] - g[0]) ** 2
    assert total == pytest.approx(1.0, abs=1e-3)


def test_observation_sampler_matches_density(lightdark):
    rng = np.random.default_rng(1)
    x = np.array([[3.0, 3.0]])
    o = lightdark.sample_observation(np.repeat(x, 100000, axis=0), rng)
    z = (o - x) / lightdark.noise_scale(x)[0]
    for dim in range(2):
        assert stats.kstest(z[:, dim], "norm").pvalue > 0.001


def test_lightdark_reward_examples():
    m = LightDark2D()
    at_goal = ParticleBelief(m.goal[None, :], [1.0])
    assert m.belief_reward(at_goal, 0, 0.0) == 0.0
    two = ParticleBelief([m.goal + [1.0, 0.0], m.goal + [0.0, 3.0]], [0.5, 0.5])
    assert m.belief_reward(two, 0, 0.0) == pytest.approx(-2.0)
    v = LightDark2D(obstacles=True, forbidden=[[0, 0, 1, 1]])
    assert v.belief_reward(ParticleBelief(v.goal[None, :], [1.0]), 0, 0.0) == pytest.approx(10.0)
    b = ParticleBelief([[0.5, 0.5], [3.0, 3.0]], [0.3, 0.7])
    plain = LightDark2D().belief_reward(b, 0, 0.0)
    assert v.belief_reward(b, 0, 0.0) == pytest.approx(plain + 0.3 * -10.0)


def test_lightdark_validation():
    with pytest.raises(ValueError):
        LightDark2D(prior_cov=[[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(ValueError):
        LightDark2D(beacons=np.zeros((0, 2)))
    with pytest.raises(ValueError):
        LightDark2D.from_config({"bogus": 1})


def test_shipped_configs():
    d = lightdark_from_file("lightdark_default")
    assert d.horizon == 25 and not d.obstacles and d.reward == RewardSpec(1.0, -1.0)
    o = lightdark_from_file("lightdark_obstacles")
    assert o.obstacles and len(o.forbidden) >= 1
    assert load_config("lightdark_default.json")["name"] == "lightdark_default"


def test_discrete_examples():
    rng = np.random.default_rng(0)
    m = DiscreteGridPomdp.random(rng, n_states=4, n_obs=4)
    b = rng.dirichlet(np.ones(4))
    bp = discrete_exact_predict(m, b, 0)
    uniform = np.full((4, 4), 0.25)
    np.testing.assert_allclose(discrete_exact_posterior(m, bp, 2, uniform), bp)
    perfect = DiscreteGridPomdp(m.T, np.eye(4), m.r, m.b0)
    assert discrete_exact_expected_entropy(perfect, b, 1) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        DiscreteGridPomdp(m.T, m.Z * 2, m.r, m.b0)


def test_discrete_matches_second_enumeration():
    rng = np.random.default_rng(3)
    for _ in range(50):
        m = DiscreteGridPomdp.random(rng, n_states=5, n_obs=6)
        b = rng.dirichlet(np.ones(5))
        for k in (1, 2, 3):
            zk = abstract_observation_table(m.Z, k)
            h, s = oracle.enumerate_discrete(m.T.tolist(), m.Z.tolist(), m.r.tolist(), b.tolist(), 1, k)
            assert discrete_exact_expected_entropy(m, b, 1, zk) == pytest.approx(h, abs=1e-12)
            assert discrete_exact_state_reward(m, b, 1, zk) == pytest.approx(s, abs=1e-12)


def test_discrete_theorem1_and_lemma2():
    rng = np.random.default_rng(4)
    for _ in range(1000):
        m = DiscreteGridPomdp.random(rng, n_states=5, n_obs=6, concentration=float(rng.choice([0.1, 1.0])))
        b = rng.dirichlet(np.ones(5))
        for k in (2, 3):
            zk = abstract_observation_table(m.Z, k)
            gap = discrete_exact_expected_entropy(m, b, 0, zk) - discrete_exact_expected_entropy(m, b, 0)
            assert -1e-12 <= gap <= math.log(k) + 1e-12
            assert abs(discrete_exact_state_reward(m, b, 0, zk) - discrete_exact_state_reward(m, b, 0)) <= 1e-12


def test_discrete_samplers_match_tables():
    rng = np.random.default_rng(5)
    m = DiscreteGridPomdp.random(rng, n_states=3, n_obs=4)
    s = m.sample_transition(np.full((100000, 1), 1.0), 0, rng)
    counts = np.bincount(s[:, 0].astype(int), minlength=3)
    assert stats.chisquare(counts, 100000 * m.T[0, 1]).pvalue > 0.001
    o = m.sample_observation(np.full((100000, 1), 2.0), rng)
    counts = np.bincount(o[:, 0].astype(int), minlength=4)
    assert stats.chisquare(counts, 100000 * m.Z[2]).pvalue > 0.001


def test_linear_gaussian_closed_form(lg_model):
    # 1-D sanity: P=1, Q=0.2, R=0.5 -> posterior variance 1/(1/1.2 + 2)
    m = LinearGaussianModel([[0.0]], [[0.2]], [[0.5]])
    var = 1 / (1 / 1.2 + 2)
    assert m.expected_posterior_entropy([[1.0]]) == pytest.approx(0.5 * math.log(2 * math.pi * math.e * var))
    d = lg_model.transition_density(np.zeros((1, 2)), np.zeros((1, 2)), 2)[0, 0]
    assert d == pytest.approx(1 / (2 * math.pi * 0.2))
