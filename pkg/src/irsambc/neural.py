"""Dense networks with explicit backprop, RMSprop, and exploration noise.

The actor update needs the gradient of the critic with respect to its action
input, not just its parameters, so the forward/backward passes are written
out by hand instead of going through an autodiff framework. Everything is
real-valued float64; complex quantities are split into re/im halves before
they reach a network.
"""
from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from .errors import InvalidInputError, SchemaError, ShapeError


@dataclass
class MlpNetwork:
    """Fully connected layers, ReLU on hidden layers, linear output."""

    weights: list
    biases: list

    @classmethod
    def create(cls, sizes, rng):
        """Uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)], zero biases."""
        if len(sizes) < 2:
            raise InvalidInputError("need at least an input and an output layer")
        weights = []
        biases = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            bound = 1.0 / sqrt(fan_in)
            weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            biases.append(np.zeros(fan_out))
        return cls(weights=weights, biases=biases)

    @property
    def sizes(self):
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    def copy(self):
        return MlpNetwork(
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
        )

    def forward(self, x):
        """Returns the list of layer activations, input first, output last."""
        x = np.asarray(x, dtype=float)
        if x.ndim != 2:
            raise ShapeError(f"input must be 2-D (batch, features), got shape {x.shape}")
        if x.shape[1] != self.weights[0].shape[0]:
            raise ShapeError(
                f"input has {x.shape[1]} features, network expects {self.weights[0].shape[0]}"
            )
        acts = [x]
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = acts[-1] @ w + b
            acts.append(z if i == last else np.maximum(z, 0.0))
        return acts

    def backward(self, acts, grad_out):
        """Backprop a gradient at the output through the stored activations.

        Returns (weight grads, bias grads, gradient at the input).
        """
        g = np.asarray(grad_out, dtype=float)
        weight_grads = [None] * len(self.weights)
        bias_grads = [None] * len(self.biases)
        for i in range(len(self.weights) - 1, -1, -1):
            if i < len(self.weights) - 1:
                g = g * (acts[i + 1] > 0.0)
            weight_grads[i] = acts[i].T @ g
            bias_grads[i] = g.sum(axis=0)
            g = g @ self.weights[i].T
        return weight_grads, bias_grads, g


@dataclass
class RmspropState:
    """Per-parameter accumulators for one network."""

    acc: list = field(default_factory=list)
    mom: list = field(default_factory=list)

    @classmethod
    def for_network(cls, net):
        params = net.weights + net.biases
        return cls(
            acc=[np.zeros_like(p) for p in params],
            mom=[np.zeros_like(p) for p in params],
        )


def rmsprop_step(net, state, weight_grads, bias_grads, rate,
                 momentum=0.8, smoothing=0.99, eps=1e-8, nesterov=False):
    """One RMSprop-with-momentum update, in place.

    acc <- smoothing * acc + (1 - smoothing) * g^2
    mom <- momentum * mom + rate * g / sqrt(acc + eps)
    and the parameter moves by mom, or by momentum * mom + step when the
    Nesterov variant is switched on.
    """
    params = net.weights + net.biases
    grads = weight_grads + bias_grads
    for p, g, acc, mom in zip(params, grads, state.acc, state.mom):
        acc *= smoothing
        acc += (1.0 - smoothing) * g * g
        step = rate * g / np.sqrt(acc + eps)
        mom *= momentum
        mom += step
        p -= (momentum * mom + step) if nesterov else mom


def soft_update(target, source, tau):
    """target <- (1 - tau) * target + tau * source, in place."""
    if not 0.0 <= tau <= 1.0:
        raise InvalidInputError(f"tau must be in [0, 1], got {tau}")
    for t, s in zip(target.weights + target.biases, source.weights + source.biases):
        t *= 1.0 - tau
        t += tau * s


class OuProcess:
    """Ornstein-Uhlenbeck exploration noise, zero mean.

    Discretized as x <- x + theta * (-x) * dt + sigma * sqrt(dt) * N(0, 1),
    started from zero. Stationary standard deviation is
    sigma / sqrt(2 * theta - theta^2 * dt).
    """

    def __init__(self, size, rng, theta=0.15, sigma=0.05, dt=1.0):
        if theta <= 0.0 or sigma < 0.0 or dt <= 0.0:
            raise InvalidInputError("OU parameters must satisfy theta > 0, sigma >= 0, dt > 0")
        self.size = size
        self.rng = rng
        self.theta = theta
        self.sigma = sigma
        self.dt = dt
        self.state = np.zeros(size)

    def reset(self):
        self.state = np.zeros(self.size)

    def sample(self):
        self.state = (
            self.state
            - self.theta * self.state * self.dt
            + self.sigma * sqrt(self.dt) * self.rng.standard_normal(self.size)
        )
        return self.state.copy()


def save_checkpoint(path, networks):
    """Write named networks as layer shapes plus row-major parameters.

    Plain text: one header line per network (name and layer sizes), then one
    line per parameter value. Readable with any text tool and stable across
    platforms.
    """
    with open(path, "w") as fh:
        fh.write(f"networks {len(networks)}\n")
        for name, net in networks.items():
            sizes = " ".join(str(s) for s in net.sizes)
            fh.write(f"network {name} {sizes}\n")
            for arr in net.weights + net.biases:
                for value in arr.reshape(-1):
                    fh.write(f"{float(value)!r}\n")


def load_checkpoint(path):
    """Inverse of save_checkpoint; returns {name: MlpNetwork}."""
    with open(path) as fh:
        lines = fh.read().split("\n")
    pos = 0

    def take():
        nonlocal pos
        if pos >= len(lines):
            raise SchemaError(f"truncated checkpoint file {path}")
        line = lines[pos]
        pos += 1
        return line

    header = take().split()
    if len(header) != 2 or header[0] != "networks":
        raise SchemaError(f"not a checkpoint file: {path}")
    networks = {}
    for _ in range(int(header[1])):
        fields = take().split()
        if len(fields) < 4 or fields[0] != "network":
            raise SchemaError(f"malformed network header in {path}")
        name = fields[1]
        sizes = [int(s) for s in fields[2:]]
        shapes = [(a, b) for a, b in zip(sizes[:-1], sizes[1:])]
        shapes += [(b,) for b in sizes[1:]]
        arrays = []
        for shape in shapes:
            count = int(np.prod(shape))
            try:
                flat = np.array([float(take()) for _ in range(count)])
            except ValueError as exc:
                raise SchemaError(f"bad parameter value in {path}: {exc}") from exc
            arrays.append(flat.reshape(shape))
        half = len(arrays) // 2
        networks[name] = MlpNetwork(weights=arrays[:half], biases=arrays[half:])
    return networks
