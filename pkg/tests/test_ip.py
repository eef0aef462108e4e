import logging

import numpy as np
import pytest

from deepesn.ip import IpConfig, activation_statistics, ip_update, pretrain_ip
from deepesn.reservoir import ReservoirConfig, init_deep_reservoir

# one update with defaults at g=1, b=0, net=0.5, y=tanh(0.5)
ORACLE_Y = 0.46211715726000974
ORACLE_DB = -0.037267333383699384
ORACLE_DG = -0.01763366669184969


def small_reservoir(seed=0, n_layers=2):
    return init_deep_reservoir(
        ReservoirConfig(
            input_dim=3,
            n_layers=n_layers,
            units_per_layer=30,
            leaky_rate=1.0,
            spectral_radius_target=0.9,
            input_scaling=1.0,
            connectivity=0.2,
            seed=seed,
        )
    )


class TestIpUpdate:
    def test_scalar_oracle(self):
        gain, bias = ip_update(
            np.array([1.0]),
            np.array([0.0]),
            np.array([0.5]),
            np.array([ORACLE_Y]),
            IpConfig(),
        )
        assert bias[0] == pytest.approx(ORACLE_DB, abs=1e-15)
        assert gain[0] == pytest.approx(1.0 + ORACLE_DG, abs=1e-15)

    def test_vector_matches_elementwise(self):
        rng = np.random.default_rng(0)
        net = rng.uniform(-2, 2, size=8)
        g0 = rng.uniform(0.5, 1.5, size=8)
        b0 = rng.uniform(-0.2, 0.2, size=8)
        y = np.tanh(g0 * net + b0)
        cfg = IpConfig()
        g_vec, b_vec = ip_update(g0, b0, net, y, cfg)
        for i in range(8):
            g_i, b_i = ip_update(
                g0[i : i + 1], b0[i : i + 1], net[i : i + 1], y[i : i + 1], cfg
            )
            assert g_vec[i] == g_i[0]
            assert b_vec[i] == b_i[0]

    def test_inputs_not_mutated(self):
        g0 = np.ones(3)
        b0 = np.zeros(3)
        ip_update(g0, b0, np.ones(3), np.tanh(np.ones(3)), IpConfig())
        assert np.array_equal(g0, np.ones(3))
        assert np.array_equal(b0, np.zeros(3))

    def test_gain_clamped_with_warning(self, caplog):
        # a huge learning rate drives the gain negative in one step
        cfg = IpConfig(learning_rate=10.0)
        with caplog.at_level(logging.WARNING, logger="deepesn.ip"):
            gain, _ = ip_update(
                np.array([1.0]), np.array([0.0]), np.array([2.0]),
                np.array([np.tanh(2.0)]), cfg,
            )
        assert gain[0] == 1e-6
        assert any("clamped" in r.message for r in caplog.records)


class TestIpConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"target_std": 0.0},
            {"target_std": -0.1},
            {"learning_rate": 0.0},
            {"epochs": 0},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            IpConfig(**kwargs)

    def test_defaults(self):
        cfg = IpConfig()
        assert cfg.target_mean == 0.0
        assert cfg.target_std == 0.1
        assert cfg.learning_rate == 1e-3
        assert cfg.epochs == 5


class TestPretrain:
    def corpus(self, seed=1, n=2, steps=600):
        rng = np.random.default_rng(seed)
        return [rng.uniform(-1, 1, size=(steps, 3)) for _ in range(n)]

    def test_moves_std_toward_target(self):
        res = small_reservoir()
        seqs = self.corpus()
        _, std_before = activation_statistics(res, seqs)
        pretrain_ip(res, seqs, IpConfig())
        _, std_after = activation_statistics(res, seqs)
        for layer in range(res.config.n_layers):
            before = np.mean(np.abs(std_before[layer] - 0.1))
            after = np.mean(np.abs(std_after[layer] - 0.1))
            assert after < before

    def test_weights_untouched(self):
        res = small_reservoir()
        feed_before = [layer.feed.copy() for layer in res.layers]
        rec_before = [layer.recurrent.copy() for layer in res.layers]
        pretrain_ip(res, self.corpus(steps=50), IpConfig(epochs=1))
        for layer, feed, rec in zip(res.layers, feed_before, rec_before):
            assert np.array_equal(layer.feed, feed)
            assert (layer.recurrent != rec).nnz == 0

    def test_deterministic(self):
        seqs = self.corpus(steps=100)
        res_a = small_reservoir()
        res_b = small_reservoir()
        pretrain_ip(res_a, seqs, IpConfig(epochs=2))
        pretrain_ip(res_b, seqs, IpConfig(epochs=2))
        for la, lb in zip(res_a.layers, res_b.layers):
            assert np.array_equal(la.gain, lb.gain)
            assert np.array_equal(la.bias, lb.bias)

    def test_returns_same_reservoir(self):
        res = small_reservoir()
        assert pretrain_ip(res, self.corpus(steps=20), IpConfig(epochs=1)) is res


class TestActivationStatistics:
    def test_shapes_per_unit(self):
        res = small_reservoir(n_layers=3)
        seqs = [np.random.default_rng(2).uniform(-1, 1, size=(40, 3))]
        means, stds = activation_statistics(res, seqs)
        assert means.shape == (3, 30)
        assert stds.shape == (3, 30)

    def test_does_not_adapt(self):
        res = small_reservoir()
        gains = [layer.gain.copy() for layer in res.layers]
        activation_statistics(
            res, [np.random.default_rng(3).uniform(-1, 1, size=(20, 3))]
        )
        for layer, gain in zip(res.layers, gains):
            assert np.array_equal(layer.gain, gain)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            activation_statistics(small_reservoir(), [])
