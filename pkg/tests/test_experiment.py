import numpy as np
import pytest

from deepesn.data import make_synthetic_dataset, to_dense
from deepesn.experiment import (
    THRESHOLD_GRID,
    choose_threshold,
    collect_pairs,
    run_model,
    sweep_ridges,
)
from deepesn.ip import IpConfig
from deepesn.reservoir import ReservoirConfig, init_deep_reservoir, run_sequence


def small_config(dim, **overrides):
    base = dict(
        input_dim=dim,
        n_layers=2,
        units_per_layer=30,
        leaky_rate=0.5,
        spectral_radius_target=0.9,
        input_scaling=1.0,
        connectivity=0.2,
        seed=0,
    )
    base.update(overrides)
    return ReservoirConfig(**base)


class TestCollectPairs:
    def test_alignment_and_washout(self):
        res = init_deep_reservoir(small_config(3))
        dense = to_dense([[0], [1], [2], [0], [1]], 3)
        pairs = collect_pairs(res, [dense], washout=1)
        assert len(pairs) == 1
        states, targets = pairs[0]
        assert states.shape == (3, 60)  # 4 input steps minus 1 washed out
        np.testing.assert_array_equal(targets, dense[2:])
        full = run_sequence(res, dense[:-1])
        np.testing.assert_array_equal(states, full[1:])

    def test_skips_too_short_sequences(self):
        res = init_deep_reservoir(small_config(3))
        dense_long = to_dense([[0], [1], [2]], 3)
        dense_short = to_dense([[0]], 3)
        pairs = collect_pairs(res, [dense_short, dense_long], washout=0)
        assert len(pairs) == 1
        pairs = collect_pairs(res, [dense_long], washout=2)
        assert pairs == []


class TestChooseThreshold:
    def test_picks_best_and_breaks_ties_low(self):
        # identity readout on one state feature; target on at 0.6
        weights = np.array([[1.0], [0.0]])
        states = np.array([[0.15], [0.35], [0.62], [0.85]])
        targets = np.array([[0], [0], [1], [1]])
        chosen = choose_threshold(weights, [(states, targets)])
        # thresholds 0.4, 0.5, 0.6 are all perfect; the smallest wins
        assert chosen == 0.4

    def test_grid_values(self):
        assert THRESHOLD_GRID == (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)


class TestRunModel:
    def test_deterministic_scores(self):
        ds = make_synthetic_dataset(seed=3)
        cfg = small_config(ds.dim)
        a = run_model(ds, cfg, ridge=1e-3)
        b = run_model(ds, cfg, ridge=1e-3)
        assert (a.train_acc, a.valid_acc, a.test_acc) == (
            b.train_acc, b.valid_acc, b.test_acc,
        )
        assert a.seconds > 0

    def test_learns_predictable_data(self):
        ds = make_synthetic_dataset(seed=3)
        result = run_model(ds, small_config(ds.dim), ridge=1e-3)
        assert result.test_acc > 0.8

    def test_ip_changes_scores(self):
        ds = make_synthetic_dataset(seed=3)
        cfg = small_config(ds.dim)
        plain = run_model(ds, cfg, ridge=1e-3)
        adapted = run_model(ds, cfg, ridge=1e-3, ip=IpConfig(epochs=1))
        assert (plain.train_acc, plain.valid_acc) != (
            adapted.train_acc, adapted.valid_acc,
        )

    def test_threshold_tuning_reported(self):
        ds = make_synthetic_dataset(seed=3)
        result = run_model(
            ds, small_config(ds.dim), ridge=1e-3, tune_threshold=True
        )
        assert result.threshold in THRESHOLD_GRID

    def test_fixed_threshold_respected(self):
        ds = make_synthetic_dataset(seed=3)
        result = run_model(ds, small_config(ds.dim), ridge=1e-3, threshold=0.3)
        assert result.threshold == 0.3


class TestSweepRidges:
    def test_matches_individual_runs(self):
        ds = make_synthetic_dataset(seed=4)
        cfg = small_config(ds.dim)
        ridges = (1e-3, 1e-1)
        swept = sweep_ridges(ds, cfg, ridges)
        assert len(swept) == 2
        for ridge, result in zip(ridges, swept):
            single = run_model(ds, cfg, ridge=ridge)
            assert result.train_acc == single.train_acc
            assert result.valid_acc == single.valid_acc
            assert result.test_acc == single.test_acc

    def test_each_trial_reports_full_cost(self):
        ds = make_synthetic_dataset(seed=4)
        swept = sweep_ridges(ds, small_config(ds.dim), (1e-3, 1e-2, 1e-1))
        assert all(r.seconds > 0 for r in swept)
