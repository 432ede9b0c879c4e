"""Action encoding, replay, training updates, and whole episodes."""
import numpy as np
import pytest

from irsambc.agent import (DdpgAgent, DdpgSettings, ReplayMemory, TrainingSchedule,
                           critic_targets, decode_theta, encode_action,
                           encode_action_backward, encode_state, reward_from_grcd,
                           run_episode)
from irsambc.channel import NodeGeometry, generate_realization
from irsambc.config import default_config, node_geometry, system_parameters
from irsambc.errors import InvalidInputError, StateError
from irsambc.neural import MlpNetwork


def small_channels(m=2, n=4, seed=0):
    geo = node_geometry(default_config())
    return generate_realization(geo, m, n, 3.0, np.random.default_rng(seed))


def quick_schedule(t_random=12, t_actor=8):
    return TrainingSchedule(t_random=t_random, t_actor=t_actor, batch_size=4)


class TestEncoding:
    def test_state_layout(self):
        g = np.array([1.0 + 2j, 3.0 - 1j])
        theta = np.array([0.0 + 1j])
        np.testing.assert_allclose(encode_state(g, theta),
                                   [1.0, 3.0, 2.0, -1.0, 0.0, 1.0])

    def test_pair_normalization(self):
        out = encode_action(np.array([3.0, 4.0]))
        np.testing.assert_allclose(out, [0.6, 0.8])

    def test_degenerate_pair_maps_to_phase_zero(self):
        # pair layout is halves: pair 0 = (0, 0) degenerate, pair 1 = (1, 2)
        out = encode_action(np.array([0.0, 1.0, 0.0, 2.0]))
        root5 = np.sqrt(5.0)
        np.testing.assert_allclose(out, [1.0, 1.0 / root5, 0.0, 2.0 / root5])

    def test_all_pairs_unit_modulus(self):
        raw = np.random.default_rng(1).standard_normal(20)
        theta = decode_theta(encode_action(raw))
        np.testing.assert_allclose(np.abs(theta), 1.0, atol=1e-12)

    def test_rejects_odd_length(self):
        with pytest.raises(InvalidInputError):
            encode_action(np.ones(5))

    def test_backward_matches_numeric_jacobian(self):
        rng = np.random.default_rng(2)
        raw = rng.standard_normal(8)
        grad = rng.standard_normal(8)
        analytic = encode_action_backward(raw, grad)
        eps = 1e-7
        for i in range(8):
            bumped = raw.copy()
            bumped[i] += eps
            up = np.dot(encode_action(bumped), grad)
            bumped[i] -= 2 * eps
            down = np.dot(encode_action(bumped), grad)
            assert analytic[i] == pytest.approx((up - down) / (2 * eps), abs=1e-6)

    def test_backward_degenerate_pair_blocks_gradient(self):
        raw = np.array([0.0, 1.0, 0.0, 1.0])
        grad = np.ones(4)
        out = encode_action_backward(raw, grad)
        assert out[0] == 0.0 and out[2] == 0.0
        assert out[1] != 0.0 or out[3] != 0.0


class TestReward:
    def test_reference_points(self):
        assert reward_from_grcd(1.0) == 0.0
        assert reward_from_grcd(1.5) == pytest.approx(50.0)
        assert reward_from_grcd(2.37) == pytest.approx(137.0)

    def test_rejects_ratio_below_one(self):
        with pytest.raises(InvalidInputError):
            reward_from_grcd(0.9)


class TestReplayMemory:
    def test_capacity_eviction(self):
        mem = ReplayMemory(3)
        for i in range(5):
            mem.store(np.array([i]), np.array([i]), float(i), np.array([i]))
        assert len(mem) == 3
        states, _, rewards, _ = mem.sample(3, np.random.default_rng(0))
        assert sorted(rewards.tolist()) == [2.0, 3.0, 4.0]

    def test_sampling_without_replacement(self):
        mem = ReplayMemory(10)
        for i in range(10):
            mem.store(np.array([i]), np.array([0]), 0.0, np.array([0]))
        states, _, _, _ = mem.sample(10, np.random.default_rng(1))
        assert sorted(int(s[0]) for s in states) == list(range(10))

    def test_sample_too_few_raises(self):
        mem = ReplayMemory(5)
        mem.store(np.zeros(1), np.zeros(1), 0.0, np.zeros(1))
        with pytest.raises(StateError):
            mem.sample(2, np.random.default_rng(0))


class TestCriticTargets:
    def test_zero_discount_is_bitwise_reward(self):
        rewards = np.array([7.0, -1.5, 0.25])
        out = critic_targets(rewards, None, None, None, 0.0)
        np.testing.assert_array_equal(out, rewards)

    def test_constant_value_offset(self):
        rng = np.random.default_rng(3)
        actor = MlpNetwork.create([4, 3, 2], rng)
        critic = MlpNetwork(weights=[np.zeros((6, 1))], biases=[np.array([2.5])])
        rewards = np.array([1.0, 2.0])
        states = rng.standard_normal((2, 4))
        out = critic_targets(rewards, states, actor, critic, 1.0)
        np.testing.assert_allclose(out, rewards + 2.5)

    def test_matches_manual_composition(self):
        rng = np.random.default_rng(4)
        actor = MlpNetwork.create([4, 6, 2], rng)
        critic = MlpNetwork.create([6, 5, 1], rng)
        states = rng.standard_normal((3, 4))
        rewards = np.array([0.0, 1.0, -2.0])
        out = critic_targets(rewards, states, actor, critic, 0.5)
        a = encode_action(actor.forward(states)[-1])
        q = critic.forward(np.concatenate([states, a], axis=1))[-1][:, 0]
        np.testing.assert_allclose(out, rewards + 0.5 * q)


class TestTrainStep:
    def agent(self, seed=5):
        return DdpgAgent(2, 3, quick_schedule(), DdpgSettings(),
                         np.random.default_rng(seed))

    def fill(self, agent, count=8, seed=6):
        rng = np.random.default_rng(seed)
        for _ in range(count):
            g = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            g /= np.linalg.norm(g)
            theta = np.exp(2j * np.pi * rng.random(3))
            state = encode_state(g, theta)
            action = encode_action(rng.standard_normal(6))
            agent.replay.store(state, action, float(rng.random() * 100), state)

    def test_skips_until_batch_available(self):
        agent = self.agent()
        before = agent.critic.weights[0].copy()
        agent.train_step()
        np.testing.assert_array_equal(before, agent.critic.weights[0])

    def test_critic_overfits_frozen_minibatch(self):
        agent = self.agent()
        self.fill(agent, count=4)

        def loss():
            states, actions, rewards, _ = agent.replay.sample(4, np.random.default_rng(0))
            q = agent.critic.forward(np.concatenate([states, actions], axis=1))[-1][:, 0]
            return float(np.mean((q - rewards) ** 2))

        initial = loss()
        for _ in range(50):
            agent.train_step()
        assert loss() < initial

    def test_zero_tau_keeps_targets_bitwise(self):
        settings = DdpgSettings(tau=0.0)
        agent = DdpgAgent(2, 3, quick_schedule(), settings, np.random.default_rng(7))
        self.fill(agent)
        snapshot = [w.copy() for w in agent.target_critic.weights]
        agent.train_step()
        for a, b in zip(snapshot, agent.target_critic.weights):
            np.testing.assert_array_equal(a, b)

    def test_actor_follows_synthetic_critic(self):
        # critic replaced by Q(s, a) = -||a - a*||^2; the actor should land
        # on the encoded target
        from irsambc.neural import RmspropState, rmsprop_step

        rng = np.random.default_rng(9)
        n = 6
        a_star = encode_action(rng.standard_normal(2 * n))
        actor = MlpNetwork.create([10, 20, 20, 2 * n], rng)
        opt = RmspropState.for_network(actor)
        state = rng.standard_normal((1, 10))
        for _ in range(500):
            acts = actor.forward(state)
            a = encode_action(acts[-1])
            grad_q = -2.0 * (a - a_star)
            raw_grad = encode_action_backward(acts[-1], -grad_q)
            ws, bs, _ = actor.backward(acts, raw_grad)
            rmsprop_step(actor, opt, ws, bs, 0.002)
        final = encode_action(actor.forward(state)[-1])
        assert np.linalg.norm(final - a_star) < 1e-10


class TestRunEpisode:
    def test_smoke_single_antenna_single_reflector(self):
        ch = small_channels(m=1, n=1, seed=10)
        params = system_parameters(default_config())
        result = run_episode(ch, params, quick_schedule(), DdpgSettings(),
                             np.random.default_rng(0))
        assert result.grcd_sample >= 1.0
        assert result.grcd_true >= 1.0
        assert 0.0 < result.ber <= 0.5

    def test_no_ambient_signal_gives_unit_true_ratio(self):
        ch = small_channels(seed=11)
        params = system_parameters(default_config())
        params = params.__class__(p_s=0.0, p_w=params.p_w, alpha=params.alpha,
                                  l_t=50, l_d=params.l_d)
        result = run_episode(ch, params, quick_schedule(), DdpgSettings(),
                             np.random.default_rng(1))
        assert result.grcd_true == 1.0
        # rewards come from pure estimation noise on a flat channel pair
        assert np.median(result.trace["sample_grcd"]) < 1.5

    def test_replay_holds_all_steps_with_valid_states(self, monkeypatch):
        ch = small_channels(seed=12)
        params = system_parameters(default_config())
        schedule = quick_schedule()
        captured = {}

        import irsambc.agent as agent_mod
        original = agent_mod.DdpgAgent

        class Spy(original):
            def __init__(self, *a, **kw):
                super().__init__(*a, **kw)
                captured["agent"] = self

        monkeypatch.setattr(agent_mod, "DdpgAgent", Spy)
        run_episode(ch, params, schedule, DdpgSettings(), np.random.default_rng(2))
        replay = captured["agent"].replay
        assert len(replay) == schedule.total
        for state, action, _, next_state in replay._items:
            # combiner block is unit norm, reflection blocks unit modulus
            assert np.sum(state[:4] ** 2) == pytest.approx(1.0, abs=1e-9)
            np.testing.assert_allclose(
                np.abs(decode_theta(state[4:])), 1.0, atol=1e-9)
            np.testing.assert_allclose(np.abs(decode_theta(action)), 1.0, atol=1e-9)
            assert np.sum(next_state[:4] ** 2) == pytest.approx(1.0, abs=1e-9)

    def test_actor_deterministic_without_noise(self):
        settings = DdpgSettings(ou_sigma=0.0)
        agent = DdpgAgent(2, 3, quick_schedule(), settings, np.random.default_rng(3))
        state = np.random.default_rng(4).standard_normal(10)
        a1 = agent.act(state)
        a2 = agent.act(state)
        np.testing.assert_array_equal(a1, a2)

    def test_variant_switches_run(self):
        ch = small_channels(seed=13)
        params = system_parameters(default_config())
        for settings in (DdpgSettings(reward_combiner="carried"),
                         DdpgSettings(final_selection="last"),
                         DdpgSettings(refinement_noise="known")):
            result = run_episode(ch, params, quick_schedule(6, 4), settings,
                                 np.random.default_rng(5))
            assert result.grcd_sample >= 1.0

    def test_trace_records_all_steps(self):
        ch = small_channels(seed=14)
        params = system_parameters(default_config())
        schedule = quick_schedule()
        result = run_episode(ch, params, schedule, DdpgSettings(),
                             np.random.default_rng(6), record_true=True)
        assert result.trace["step"].shape == (schedule.total,)
        assert np.all(result.trace["sample_grcd"] >= 1.0)
        assert np.all(np.isfinite(result.trace["true_grcd"]))
        assert np.all(result.trace["true_grcd"] >= 1.0)

    def test_settings_validation(self):
        with pytest.raises(InvalidInputError):
            DdpgSettings(reward_combiner="other")
        with pytest.raises(InvalidInputError):
            DdpgSettings(final_selection="median")
        with pytest.raises(InvalidInputError):
            TrainingSchedule(t_random=-1)
        with pytest.raises(InvalidInputError):
            TrainingSchedule(t_random=0, t_actor=0)
