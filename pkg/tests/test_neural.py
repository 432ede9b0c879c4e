"""Network forward/backward, optimizer dynamics, noise, checkpoints."""
import numpy as np
import pytest

from irsambc.errors import InvalidInputError, SchemaError, ShapeError
from irsambc.neural import (MlpNetwork, OuProcess, RmspropState, load_checkpoint,
                            rmsprop_step, save_checkpoint, soft_update)


def small_net(seed=0, sizes=(3, 5, 2)):
    return MlpNetwork.create(list(sizes), np.random.default_rng(seed))


def test_create_init_ranges():
    net = MlpNetwork.create([9, 4, 2], np.random.default_rng(1))
    assert net.sizes == [9, 4, 2]
    assert np.all(np.abs(net.weights[0]) <= 1.0 / 3.0)
    assert np.all(np.abs(net.weights[1]) <= 0.5)
    assert np.all(net.biases[0] == 0.0)
    assert np.all(net.biases[1] == 0.0)


def test_forward_requires_batch_dim():
    net = small_net()
    with pytest.raises(ShapeError):
        net.forward(np.zeros(3))
    with pytest.raises(ShapeError):
        net.forward(np.zeros((2, 4)))


def test_forward_relu_then_linear():
    net = MlpNetwork(weights=[np.array([[1.0], [-1.0]]), np.array([[2.0]])],
                     biases=[np.array([0.0]), np.array([0.5])])
    acts = net.forward(np.array([[1.0, 3.0], [3.0, 1.0]]))
    # first row: 1 - 3 = -2 clips to 0; second row: 3 - 1 = 2 stays
    np.testing.assert_allclose(acts[1], [[0.0], [2.0]])
    np.testing.assert_allclose(acts[2], [[0.5], [4.5]])


def test_backward_gradcheck_parameters_and_input():
    net = small_net(seed=2, sizes=(4, 6, 3))
    x = np.random.default_rng(3).standard_normal((5, 4))
    w_out = np.random.default_rng(4).standard_normal((5, 3))

    def loss():
        return float(np.sum(net.forward(x)[-1] * w_out))

    acts = net.forward(x)
    gws, gbs, gx = net.backward(acts, w_out)
    eps = 1e-6
    for arr, grad in list(zip(net.weights, gws)) + list(zip(net.biases, gbs)):
        flat = arr.reshape(-1)
        for idx in range(0, flat.size, 3):
            keep = flat[idx]
            flat[idx] = keep + eps
            up = loss()
            flat[idx] = keep - eps
            down = loss()
            flat[idx] = keep
            assert grad.reshape(-1)[idx] == pytest.approx((up - down) / (2 * eps), abs=1e-4)
    for idx in np.ndindex(x.shape):
        keep = x[idx]
        x[idx] = keep + eps
        up = loss()
        x[idx] = keep - eps
        down = loss()
        x[idx] = keep
        assert gx[idx] == pytest.approx((up - down) / (2 * eps), abs=1e-4)


def test_copy_is_independent():
    net = small_net()
    dup = net.copy()
    dup.weights[0][0, 0] += 1.0
    assert net.weights[0][0, 0] != dup.weights[0][0, 0]


def test_rmsprop_quadratic_bowl_reference():
    # scalar recurrence frozen from an independent implementation
    net = MlpNetwork(weights=[np.array([[1.0]])], biases=[np.array([0.0])])
    state = RmspropState.for_network(net)
    for _ in range(200):
        g = 2.0 * net.weights[0]
        rmsprop_step(net, state, [g], [np.zeros(1)], 0.002)
    assert abs(float(net.weights[0][0, 0])) == pytest.approx(3.500632270071869e-07, rel=1e-9)


def test_rmsprop_nesterov_differs():
    plain = MlpNetwork(weights=[np.array([[1.0]])], biases=[np.array([0.0])])
    nest = plain.copy()
    s1 = RmspropState.for_network(plain)
    s2 = RmspropState.for_network(nest)
    for _ in range(10):
        rmsprop_step(plain, s1, [2.0 * plain.weights[0]], [np.zeros(1)], 0.002)
        rmsprop_step(nest, s2, [2.0 * nest.weights[0]], [np.zeros(1)], 0.002,
                     nesterov=True)
    assert plain.weights[0][0, 0] != nest.weights[0][0, 0]


def test_soft_update_blend_and_endpoints():
    target = small_net(seed=5)
    source = small_net(seed=6)
    before = [w.copy() for w in target.weights]
    soft_update(target, source, 0.0)
    for b, w in zip(before, target.weights):
        np.testing.assert_array_equal(b, w)
    soft_update(target, source, 0.25)
    np.testing.assert_allclose(target.weights[0],
                               0.75 * before[0] + 0.25 * source.weights[0])
    soft_update(target, source, 1.0)
    np.testing.assert_allclose(target.weights[0], source.weights[0])
    with pytest.raises(InvalidInputError):
        soft_update(target, source, 1.5)


def test_ou_process_stationary_spread():
    ou = OuProcess(1, np.random.default_rng(11))
    xs = np.array([ou.sample()[0] for _ in range(200000)])
    closed_form = 0.05 / np.sqrt(2 * 0.15 - 0.15 ** 2)
    assert np.std(xs[1000:]) == pytest.approx(closed_form, rel=0.1)


def test_ou_reset_and_start_at_zero():
    ou = OuProcess(3, np.random.default_rng(0))
    assert np.all(ou.state == 0.0)
    ou.sample()
    ou.reset()
    assert np.all(ou.state == 0.0)
    with pytest.raises(InvalidInputError):
        OuProcess(2, np.random.default_rng(0), theta=0.0)


def test_checkpoint_roundtrip(tmp_path):
    nets = {"actor": small_net(seed=7, sizes=(4, 8, 8, 2)),
            "critic": small_net(seed=8, sizes=(6, 3, 1))}
    path = tmp_path / "nets.txt"
    save_checkpoint(path, nets)
    loaded = load_checkpoint(path)
    assert set(loaded) == {"actor", "critic"}
    for name in nets:
        for a, b in zip(nets[name].weights + nets[name].biases,
                        loaded[name].weights + loaded[name].biases):
            np.testing.assert_array_equal(a, b)


def test_checkpoint_rejects_malformed(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("not a checkpoint\n")
    with pytest.raises(SchemaError):
        load_checkpoint(path)
    path.write_text("networks 1\nnetwork actor 2 3\n1.0\n")
    with pytest.raises(SchemaError):
        load_checkpoint(path)
