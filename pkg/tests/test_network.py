import numpy as np
import pytest

from ctsc.nnengine import (
    Adam,
    BatchNorm1D,
    Conv1D,
    Dense,
    Network,
    ReLU,
    Softmax,
    adam_step,
    gradient_check,
    softmax_xent,
)
from ctsc.zoo import (
    ARCHITECTURES,
    build,
    build_fcn,
    build_lkcnn,
    build_mlp,
    build_resnet,
    build_shallownet,
)


class TestSoftmaxXent:
    def test_symmetric_logits(self):
        loss, probs, _ = softmax_xent(np.array([[0.0, 0.0]]), np.array([0]))
        assert probs.tolist() == [[0.5, 0.5]]
        assert loss == pytest.approx(np.log(2.0), abs=1e-12)

    def test_saturated_correct(self):
        loss, probs, grad = softmax_xent(np.array([[100.0, -100.0]]), np.array([0]))
        assert loss == pytest.approx(0.0, abs=1e-12)
        assert np.max(np.abs(grad)) < 1e-12

    def test_probabilities_complementary(self):
        rng = np.random.default_rng(0)
        logits = rng.normal(scale=4.0, size=(16, 2))
        _, probs, _ = softmax_xent(logits, np.zeros(16, dtype=int))
        assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-12)
        assert np.all((probs > 0) & (probs < 1))

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(1)
        logits = rng.normal(size=(4, 2))
        labels = np.array([0, 1, 1, 0])
        _, _, grad = softmax_xent(logits, labels)
        h = 1e-6
        for i in range(4):
            for j in range(2):
                lp = logits.copy()
                lp[i, j] += h
                lm = logits.copy()
                lm[i, j] -= h
                num = (softmax_xent(lp, labels)[0] - softmax_xent(lm, labels)[0]) / (2 * h)
                assert abs(num - grad[i, j]) < 1e-7


class TestAdam:
    def test_zero_gradient_keeps_params(self):
        p = np.array([1.0, -2.0])
        opt = Adam([p])
        opt.step([np.zeros(2)])
        assert p.tolist() == [1.0, -2.0]
        # moments decayed but stay zero for zero grads
        assert np.all(opt.m[0] == 0.0) and np.all(opt.v[0] == 0.0)

    def test_hand_traced_first_step(self):
        # f(w) = w^2 at w0=1: g=2, m=0.2, v=0.004, m^=2, v^=4,
        # w1 = 1 - 1e-3*2/(sqrt(4)+1e-8)
        w = np.array([1.0])
        m = np.zeros(1)
        v = np.zeros(1)
        adam_step(w, np.array([2.0]), m, v, t=1)
        expected = 1.0 - 1e-3 * 2.0 / (2.0 + 1e-8)
        assert w[0] == pytest.approx(expected, abs=1e-15)

    def test_converges_on_quadratic(self):
        w = np.array([0.0])
        opt = Adam([w], lr=1e-1)
        for _ in range(200):
            opt.step([2.0 * (w - 3.0)])
        assert abs(w[0] - 3.0) < 0.05

    def test_length_mismatch(self):
        opt = Adam([np.zeros(2)])
        with pytest.raises(ValueError):
            opt.step([np.zeros(2), np.zeros(3)])


def forward_all(net, x):
    net.eval()
    return net.forward(x)


class TestZooBuilders:
    def test_shallownet_parameter_count(self):
        net = build_shallownet(1000)
        assert net.parameter_count() == 1000 * 100 + 100 + 100 * 2 + 2

    def test_mlp_parameter_count(self):
        net = build_mlp(1000)
        expected = (1000 * 500 + 500) + 2 * (500 * 500 + 500) + (500 * 2 + 2)
        assert net.parameter_count() == expected

    def test_fcn_parameter_count(self):
        net = build_fcn(1000)
        convs = (1 * 8 * 64 + 64) + (64 * 5 * 128 + 128) + (128 * 3 * 64 + 64)
        bns = 2 * (64 + 128 + 64)
        assert net.parameter_count() == convs + bns + (64 * 2 + 2)

    def test_resnet_parameter_count(self):
        def block(c_in, c):
            convs = (c_in * 8 * c + c) + (c * 5 * c + c) + (c * 3 * c + c)
            bns = 3 * 2 * c
            proj = (c_in * 1 * c + c) if c_in != c else 0
            return convs + bns + proj

        net = build_resnet(1000)
        expected = block(1, 64) + block(64, 128) + block(128, 128) + (128 * 2 + 2)
        assert net.parameter_count() == expected

    def test_lkcnn_parameter_count_and_shapes(self):
        net = build_lkcnn(1000)
        convs = (1 * 100 * 5 + 5) + (5 * 100 * 5 + 5)
        dense = (2005 * 100 + 100) + (100 * 2 + 2)
        assert net.parameter_count() == convs + dense
        assert net.hyperparams == {"kernel": 100, "channels": 5}

    def test_lkcnn_length_trace(self):
        net = build_lkcnn(1000)
        x = np.zeros((2, 1, 1000))
        net.eval()
        h = net.layers[0].forward(x)
        assert h.shape == (2, 5, 901)
        h = net.layers[2].forward(net.layers[1].forward(h))
        assert h.shape == (2, 5, 802)
        h = net.layers[4].forward(net.layers[3].forward(h))
        assert h.shape == (2, 5, 401)

    def test_lkcnn_input_floor(self):
        with pytest.raises(ValueError, match="too short"):
            build_lkcnn(150)
        build_lkcnn(200)  # exactly 2*kernel fits

    def test_lkcnn_kernel_sweep_builds(self):
        for kernel in (5, 25, 50, 75, 100):
            net = build_lkcnn(1000, kernel=kernel)
            out = forward_all(net, np.zeros((1, 1, 1000)))
            assert out.shape == (1, 2)

    def test_batchnorm_structure(self):
        from ctsc.nnengine.network import iter_leaf_layers

        def count_bn(net):
            return sum(isinstance(l, BatchNorm1D) for l in iter_leaf_layers(net.layers))

        assert count_bn(build_lkcnn(300)) == 0
        assert count_bn(build_fcn(300)) >= 3
        assert count_bn(build_resnet(300)) >= 3

    def test_resnet_projection_placement(self):
        net = build_resnet(300)
        blocks = net.layers[:3]
        assert blocks[0].projection is not None
        assert blocks[1].projection is not None
        assert blocks[2].projection is None

    def test_all_forward_shapes(self):
        x = np.random.default_rng(0).random((3, 1, 300))
        for arch in ARCHITECTURES:
            net = build(arch, 300)
            probs = forward_all(net, x)
            assert probs.shape == (3, 2)
            assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-12)

    def test_build_dispatch_validation(self):
        with pytest.raises(ValueError, match="unknown architecture"):
            build("vgg", 300)
        with pytest.raises(ValueError):
            build("mlp", 300, kernel=5)

    def test_builders_deterministic(self):
        a = build_lkcnn(300, seed=5)
        b = build_lkcnn(300, seed=5)
        for pa, pb in zip(a.parameters(), b.parameters()):
            assert np.array_equal(pa, pb)
        c = build_lkcnn(300, seed=6)
        assert any(not np.array_equal(pa, pc)
                   for pa, pc in zip(a.parameters(), c.parameters()))


class TestNetworkForwardBackward:
    def test_two_relus_equal_one(self):
        rng = np.random.default_rng(2)
        d1 = Dense(8, 4, rng)
        net1 = Network([Dense(8, 4, rng), ReLU(), Softmax()], 8, "t1")
        x = np.random.default_rng(3).normal(size=(5, 8))
        net2 = Network([Dense(8, 4, rng), ReLU(), ReLU(), Softmax()], 8, "t2")
        net2.layers[0].params[0][:] = net1.layers[0].params[0]
        net2.layers[0].params[1][:] = net1.layers[0].params[1]
        assert np.array_equal(net1.forward(x), net2.forward(x))

    def test_fcn_shape_trace(self):
        net = build_fcn(1000)
        net.eval()
        x = np.zeros((2, 1, 1000))
        h = x
        widths = []
        for layer in net.layers[:-3]:
            h = layer.forward(h)
            widths.append(h.shape)
        assert widths[0] == (2, 64, 1000)
        assert widths[3] == (2, 128, 1000)
        assert widths[6] == (2, 64, 1000)
        gap = net.layers[-3].forward(h)
        assert gap.shape == (2, 64)

    def test_shape_error_names_layer(self):
        net = build_shallownet(100)
        with pytest.raises(ValueError, match="layer 1"):
            net.forward(np.zeros((2, 1, 50)))

    def test_zero_gradients_at_saturated_minimum(self):
        net = build_shallownet(20)
        net.train()
        x = np.random.default_rng(4).random((2, 1, 20))
        logits = net.forward_logits(x)
        # force saturated-correct logits through the loss directly
        sat = np.array([[60.0, -60.0], [60.0, -60.0]])
        _, _, grad = softmax_xent(sat, np.array([0, 0]))
        net.backward_from_logits(grad)
        assert all(np.max(np.abs(g)) < 1e-12 for g in net.gradients())

    def test_backward_deterministic_with_seeded_dropout(self):
        x = np.random.default_rng(5).random((4, 1, 200))
        labels = np.array([0, 1, 0, 1])

        def grads_once():
            net = build_lkcnn(200, seed=3)
            net.train()
            net.seed_rng(11)
            logits = net.forward_logits(x)
            _, _, g = softmax_xent(logits, labels)
            net.backward_from_logits(g)
            return [g.copy() for g in net.gradients()]

        ga = grads_once()
        gb = grads_once()
        assert all(np.array_equal(a, b) for a, b in zip(ga, gb))

    def test_eval_forward_pure(self):
        net = build_mlp(50, seed=1)
        net.eval()
        x = np.random.default_rng(6).random((3, 1, 50))
        a = net.forward(x)
        b = net.forward(x)
        assert np.array_equal(a, b)


class TestGradientCheck:
    def test_linear_dense_network_tight(self):
        rng = np.random.default_rng(7)
        net = Network([Dense(10, 2, rng), Softmax()], 10, "linear")
        x = np.random.default_rng(8).normal(size=(4, 10))
        labels = np.array([0, 1, 0, 1])
        assert gradient_check(net, x, labels, h=1e-5) < 1e-9

    def test_truncation_grows_with_h(self):
        net = build_shallownet(30, seed=2)
        x = np.random.default_rng(9).random((4, 1, 30))
        labels = np.array([0, 1, 1, 0])
        e_small = gradient_check(net, x, labels, h=1e-5, max_per_tensor=50)
        e_large = gradient_check(net, x, labels, h=1e-3, max_per_tensor=50)
        assert e_large >= e_small

    def test_h_range_enforced(self):
        net = build_shallownet(10)
        with pytest.raises(ValueError):
            gradient_check(net, np.zeros((1, 1, 10)), np.array([0]), h=1e-2)

    @pytest.mark.parametrize("arch", ARCHITECTURES)
    def test_all_architectures_small(self, arch):
        # reduced-size variant of the acceptance criterion, for fast feedback
        kwargs = {"kernel": 10} if arch == "lkcnn" else {}
        net = build(arch, 40, seed=1, **kwargs)
        x = np.random.default_rng(10).random((2, 1, 40))
        labels = np.array([0, 1])
        assert gradient_check(net, x, labels, h=1e-5, max_per_tensor=25) < 1e-4
