"""Per-episode deep reinforcement learning of the reflection pattern.

One agent lives for exactly one channel realization. Each step it estimates
the symbol-conditioned covariances from pilots, derives a combiner, picks the
next reflection pattern (random phases early, actor network later), observes
the resulting sample GRCD as reward, and trains actor and critic from a
replay memory. Nothing here touches the channel vectors directly; the system
is observed only through received pilot samples.
"""
from dataclasses import dataclass, field

import numpy as np

from .detection import eigen_combiner, estimate_covariance, refine_covariance, sample_grcd
from .errors import InvalidInputError, StateError
from .neural import MlpNetwork, OuProcess, RmspropState, rmsprop_step, soft_update
from .signal_model import ber_from_grcd, composite_channels, draw_received_samples, true_grcd

DEGENERATE_PAIR = 1e-12


@dataclass
class TrainingSchedule:
    """Two-phase step budget: random exploration, then actor-driven steps."""

    t_random: int = 1000
    t_actor: int = 500
    batch_size: int = 16
    gamma: float = 0.0
    update_period: int = 1

    def __post_init__(self):
        if self.t_random < 0 or self.t_actor < 0:
            raise InvalidInputError("phase lengths must be non-negative")
        if self.total < 1:
            raise InvalidInputError("schedule must contain at least one step")
        if self.batch_size < 1:
            raise InvalidInputError(f"batch size must be positive, got {self.batch_size}")
        if not 0.0 <= self.gamma <= 1.0:
            raise InvalidInputError(f"discount must be in [0, 1], got {self.gamma}")
        if self.update_period < 1:
            raise InvalidInputError("target update period must be >= 1")

    @property
    def total(self):
        return self.t_random + self.t_actor


@dataclass
class DdpgSettings:
    """Learning-rate, noise, and variant switches for one agent."""

    actor_rate: float = 0.002
    critic_rate: float = 0.002
    tau: float = 0.0005
    ou_theta: float = 0.15
    ou_sigma: float = 0.05
    ou_dt: float = 1.0
    rms_momentum: float = 0.8
    rms_smoothing: float = 0.99
    rms_eps: float = 1e-8
    nesterov: bool = False
    reward_scale: float = 100.0
    reward_combiner: str = "refreshed"
    final_selection: str = "best"
    refinement_noise: str = "estimated"

    def __post_init__(self):
        if self.reward_combiner not in ("refreshed", "carried"):
            raise InvalidInputError(f"unknown reward combiner '{self.reward_combiner}'")
        if self.final_selection not in ("best", "last"):
            raise InvalidInputError(f"unknown final selection '{self.final_selection}'")
        if self.refinement_noise not in ("estimated", "known"):
            raise InvalidInputError(f"unknown refinement noise mode '{self.refinement_noise}'")


def encode_state(g, theta):
    """Real state vector [Re g, Im g, Re theta, Im theta]."""
    return np.concatenate([g.real, g.imag, theta.real, theta.imag])


def encode_action(raw):
    """Normalize each (Re_n, Im_n) pair of a raw 2N vector to unit modulus.

    The layout is halves: pair n is (raw[n], raw[n + N]). A pair below the
    degeneracy threshold maps to phase zero, (1, 0).
    """
    raw = np.asarray(raw, dtype=float)
    n = raw.shape[-1] // 2
    if raw.shape[-1] != 2 * n or n == 0:
        raise InvalidInputError(f"action length must be even and positive, got {raw.shape[-1]}")
    re = raw[..., :n]
    im = raw[..., n:]
    nrm = np.hypot(re, im)
    ok = nrm >= DEGENERATE_PAIR
    safe = np.where(ok, nrm, 1.0)
    out_re = np.where(ok, re / safe, 1.0)
    out_im = np.where(ok, im / safe, 0.0)
    return np.concatenate([out_re, out_im], axis=-1)


def encode_action_backward(raw, grad):
    """Exact Jacobian-transpose product of encode_action at raw.

    Per pair the map is x / ||x||, whose Jacobian is (I - v v^T) / ||x|| with
    v = x / ||x||; degenerate pairs pass no gradient.
    """
    raw = np.asarray(raw, dtype=float)
    grad = np.asarray(grad, dtype=float)
    n = raw.shape[-1] // 2
    re = raw[..., :n]
    im = raw[..., n:]
    nrm = np.hypot(re, im)
    ok = nrm >= DEGENERATE_PAIR
    safe = np.where(ok, nrm, 1.0)
    vre = re / safe
    vim = im / safe
    gre = grad[..., :n]
    gim = grad[..., n:]
    dot = vre * gre + vim * gim
    out_re = np.where(ok, (gre - vre * dot) / safe, 0.0)
    out_im = np.where(ok, (gim - vim * dot) / safe, 0.0)
    return np.concatenate([out_re, out_im], axis=-1)


def decode_theta(action):
    """Complex reflection vector from its encoded re/im halves."""
    action = np.asarray(action, dtype=float)
    n = action.shape[-1] // 2
    return action[..., :n] + 1j * action[..., n:]


def reward_from_grcd(dg, scale=100.0):
    """r = scale * (dg - 1); zero exactly at dg = 1."""
    if dg < 1.0:
        raise InvalidInputError(f"sample GRCD must be >= 1, got {dg}")
    return scale * (dg - 1.0)


class ReplayMemory:
    """Bounded experience buffer with uniform minibatch sampling."""

    def __init__(self, capacity):
        if capacity < 1:
            raise InvalidInputError(f"capacity must be positive, got {capacity}")
        self.capacity = capacity
        self._items = []

    def __len__(self):
        return len(self._items)

    def clear(self):
        self._items = []

    def store(self, state, action, reward, next_state):
        if len(self._items) >= self.capacity:
            self._items.pop(0)
        self._items.append((state, action, reward, next_state))

    def sample(self, batch_size, rng):
        """Uniform minibatch without replacement, stacked into arrays."""
        if batch_size > len(self._items):
            raise StateError(f"cannot sample {batch_size} from {len(self._items)} experiences")
        idx = rng.choice(len(self._items), size=batch_size, replace=False)
        states = np.stack([self._items[i][0] for i in idx])
        actions = np.stack([self._items[i][1] for i in idx])
        rewards = np.array([self._items[i][2] for i in idx])
        next_states = np.stack([self._items[i][3] for i in idx])
        return states, actions, rewards, next_states


def critic_targets(rewards, next_states, target_actor, target_critic, gamma):
    """y_i = r_i + gamma * Q'(s_{i+1}, mu'(s_{i+1})); exactly r_i at gamma 0."""
    if gamma == 0.0:
        return np.asarray(rewards, dtype=float).copy()
    raw = target_actor.forward(next_states)[-1]
    next_actions = encode_action(raw)
    q_next = target_critic.forward(np.concatenate([next_states, next_actions], axis=1))[-1][:, 0]
    return np.asarray(rewards, dtype=float) + gamma * q_next


class DdpgAgent:
    """Actor/critic pair with targets, optimizer state, noise, and replay."""

    def __init__(self, m, n, schedule, settings, rng):
        self.m = m
        self.n = n
        self.schedule = schedule
        self.settings = settings
        self.rng = rng
        state_dim = 2 * m + 2 * n
        action_dim = 2 * n
        self.actor = MlpNetwork.create(
            [state_dim, 2 * state_dim, 2 * state_dim, action_dim], rng)
        critic_in = state_dim + action_dim
        self.critic = MlpNetwork.create([critic_in, 2 * critic_in, 2 * critic_in, 1], rng)
        self.target_actor = self.actor.copy()
        self.target_critic = self.critic.copy()
        self.actor_opt = RmspropState.for_network(self.actor)
        self.critic_opt = RmspropState.for_network(self.critic)
        self.noise = OuProcess(action_dim, rng, theta=settings.ou_theta,
                               sigma=settings.ou_sigma, dt=settings.ou_dt)
        self.replay = ReplayMemory(schedule.total)
        self.updates = 0

    def act(self, state):
        """Noisy actor action for one state, already pair-normalized."""
        raw = self.actor.forward(state[None, :])[-1][0]
        return encode_action(raw + self.noise.sample())

    def train_step(self):
        """One critic step, one actor step, then soft target updates."""
        batch = self.schedule.batch_size
        if len(self.replay) < batch:
            return
        states, actions, rewards, next_states = self.replay.sample(batch, self.rng)
        settings = self.settings

        targets = critic_targets(rewards, next_states, self.target_actor,
                                 self.target_critic, self.schedule.gamma)
        acts = self.critic.forward(np.concatenate([states, actions], axis=1))
        q = acts[-1][:, 0]
        grad_q = (2.0 / batch) * (q - targets)
        w_grads, b_grads, _ = self.critic.backward(acts, grad_q[:, None])
        rmsprop_step(self.critic, self.critic_opt, w_grads, b_grads,
                     settings.critic_rate, momentum=settings.rms_momentum,
                     smoothing=settings.rms_smoothing, eps=settings.rms_eps,
                     nesterov=settings.nesterov)

        actor_acts = self.actor.forward(states)
        raw = actor_acts[-1]
        encoded = encode_action(raw)
        critic_acts = self.critic.forward(np.concatenate([states, encoded], axis=1))
        ones = np.full((batch, 1), -1.0 / batch)
        _, _, input_grad = self.critic.backward(critic_acts, ones)
        action_grad = input_grad[:, states.shape[1]:]
        raw_grad = encode_action_backward(raw, action_grad)
        w_grads, b_grads, _ = self.actor.backward(actor_acts, raw_grad)
        rmsprop_step(self.actor, self.actor_opt, w_grads, b_grads,
                     settings.actor_rate, momentum=settings.rms_momentum,
                     smoothing=settings.rms_smoothing, eps=settings.rms_eps,
                     nesterov=settings.nesterov)

        self.updates += 1
        if self.updates % self.schedule.update_period == 0:
            soft_update(self.target_actor, self.actor, settings.tau)
            soft_update(self.target_critic, self.critic, settings.tau)


@dataclass
class EpisodeResult:
    """Outcome of one training episode on one channel realization."""

    grcd_true: float
    grcd_sample: float
    ber: float
    combiner: np.ndarray
    theta: np.ndarray
    rewards: np.ndarray
    trace: dict = field(default_factory=dict)


def _random_phases(n, rng):
    return np.exp(2j * np.pi * rng.random(n))


def _pilot_covariances(comp, params, length, noise_power, rng):
    # one pilot pair: the tag holds each symbol for L samples
    c = []
    for bit in (0, 1):
        y = draw_received_samples(comp, params, bit, length, rng)
        c.append(refine_covariance(estimate_covariance(y), noise_power))
    return c[0], c[1]


def run_episode(ch, params, schedule, settings, rng, record_true=False):
    """Full training episode; returns the frozen operating point and metrics.

    Per step: pilot pair under the previous reflection pattern, combiner from
    the refined covariance pencil, action (random phases before t_random,
    noisy actor after), second pilot pair under the new pattern for the
    reward, experience storage, and one training step. The reported operating
    point is the best-reward (g, theta) seen, or the last one when
    final_selection is "last".
    """
    m, n = ch.m, ch.n
    agent = DdpgAgent(m, n, schedule, settings, rng)
    noise_power = None
    if settings.refinement_noise == "known" or m == 1:
        noise_power = params.p_w

    theta = _random_phases(n, rng)
    g = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    g = g / np.linalg.norm(g)

    steps = np.arange(1, schedule.total + 1)
    rewards = np.zeros(schedule.total)
    sample_dgs = np.zeros(schedule.total)
    true_dgs = np.full(schedule.total, np.nan)
    best = None
    last = None

    for t in steps:
        comp_prev = composite_channels(ch, theta, params.alpha)
        c0, c1 = _pilot_covariances(comp_prev, params, params.l_t, noise_power, rng)
        g = eigen_combiner(c0, c1)
        state = encode_state(g, theta)

        if t < schedule.t_random:
            theta_new = _random_phases(n, rng)
            action = np.concatenate([theta_new.real, theta_new.imag])
        else:
            action = agent.act(state)
            theta_new = decode_theta(action)

        comp_new = composite_channels(ch, theta_new, params.alpha)
        c0p, c1p = _pilot_covariances(comp_new, params, params.l_t, noise_power, rng)
        if settings.reward_combiner == "refreshed":
            g_reward = eigen_combiner(c0p, c1p)
        else:
            g_reward = g
        dg = sample_grcd(c0p, c1p, g_reward)
        r = reward_from_grcd(dg, settings.reward_scale)

        i = t - 1
        rewards[i] = r
        sample_dgs[i] = dg
        if record_true:
            true_dgs[i] = true_grcd(comp_new, g_reward, params)

        candidate = (r, dg, g_reward, theta_new)
        if best is None or r > best[0]:
            best = candidate
        last = candidate

        next_state = encode_state(g, action)
        agent.replay.store(state, action, r, next_state)
        agent.train_step()

        theta = theta_new

    _, dg_final, g_final, theta_final = best if settings.final_selection == "best" else last
    comp_final = composite_channels(ch, theta_final, params.alpha)
    grcd_final = true_grcd(comp_final, g_final, params)
    return EpisodeResult(
        grcd_true=grcd_final,
        grcd_sample=dg_final,
        ber=ber_from_grcd(grcd_final, params.l_d),
        combiner=g_final,
        theta=theta_final,
        rewards=rewards,
        trace={"step": steps, "reward": rewards, "sample_grcd": sample_dgs,
               "true_grcd": true_dgs},
    )
