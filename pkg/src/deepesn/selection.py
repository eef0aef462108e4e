"""Hyper-parameter grid search and trained-parameter accounting.

The search protocol sweeps spectral radius, leaky rate, and input
scaling over a grid, crossed with a list of ridge strengths and
repeated over several independently seeded guesses. Guesses of the same
(radius, rate, scaling) cell share collected states across the ridge
sweep, since the regularizer only affects the solve. A model is
selected by the mean validation accuracy of its configuration across
guesses; failed runs are kept in the report but excluded from
selection.

The accounting helpers count trained parameters (reservoirs train only
the readout plus the adapted gains and biases; the reference recurrent
networks train everything) and size networks to a parameter budget.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from itertools import product
from multiprocessing import Pool

import numpy as np

from .data import PianoRollDataset
from .experiment import TrialResult, sweep_ridges
from .ip import IpConfig
from .reservoir import ReservoirConfig

logger = logging.getLogger(__name__)

__all__ = [
    "GridSpec",
    "TrialReport",
    "BestConfig",
    "SelectionResult",
    "grid_search",
    "clip_radius_target",
    "deep_trained_parameters",
    "srn_parameters",
    "lstm_parameters",
    "gru_parameters",
    "units_for_budget",
]

# A radius target of exactly 1 sits on the stability boundary; run it
# just inside so the contraction condition still holds. The margin must
# dominate the radius estimator's relative tolerance (1e-6), or the
# achieved radius could land on the wrong side of 1.
_RADIUS_MARGIN = 1e-6


def clip_radius_target(value: float) -> float:
    """Map a grid radius in (0, 1] to a valid target in (0, 1)."""
    if value >= 1.0:
        logger.info(
            "spectral radius %g is on the stability boundary; using %g",
            value,
            1.0 - _RADIUS_MARGIN,
        )
        return 1.0 - _RADIUS_MARGIN
    return value


@dataclass(frozen=True)
class GridSpec:
    """Grid values and guess count for the search protocol."""

    spectral_radii: tuple = (0.1, 0.3, 0.5, 0.7, 0.9, 1.0)
    leaky_rates: tuple = (0.1, 0.3, 0.5, 0.7, 0.9, 1.0)
    input_scalings: tuple = (0.5, 1.5, 2.5)
    ridges: tuple = (1e-4, 1e-3, 1e-2, 1e-1)
    n_guesses: int = 5

    def __post_init__(self):
        for name in ("spectral_radii", "leaky_rates", "input_scalings", "ridges"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
            if not getattr(self, name):
                raise ValueError(f"{name} must not be empty")
        for rho in self.spectral_radii:
            if not 0.0 < rho <= 1.0:
                raise ValueError(f"spectral radii must be in (0, 1], got {rho}")
        for a in self.leaky_rates:
            if not 0.0 < a <= 1.0:
                raise ValueError(f"leaky rates must be in (0, 1], got {a}")
        for s in self.input_scalings:
            if s <= 0.0:
                raise ValueError(f"input scalings must be > 0, got {s}")
        for r in self.ridges:
            if r < 0.0:
                raise ValueError(f"ridges must be >= 0, got {r}")
        if self.n_guesses < 1:
            raise ValueError(f"n_guesses must be >= 1, got {self.n_guesses}")

    @property
    def n_configs(self) -> int:
        return (
            len(self.spectral_radii)
            * len(self.leaky_rates)
            * len(self.input_scalings)
            * len(self.ridges)
        )


@dataclass(frozen=True)
class TrialReport:
    """Outcome of one (configuration, guess) training run.

    `config_index` enumerates the (radius, rate, scaling, ridge)
    product with ridge varying fastest; `seed` is the derived reservoir
    seed shared by every ridge of the same configuration cell and
    guess. Failed runs carry an error string and no scores.
    """

    config_index: int
    spectral_radius: float
    leaky_rate: float
    input_scaling: float
    ridge: float
    guess: int
    seed: int
    status: str
    error: str | None = None
    train_acc: float | None = None
    valid_acc: float | None = None
    test_acc: float | None = None
    threshold: float | None = None
    seconds: float | None = None

    def to_dict(self) -> dict:
        """JSON-ready record; wall-clock time sits under 'timing'."""
        return {
            "config_index": self.config_index,
            "spectral_radius": self.spectral_radius,
            "leaky_rate": self.leaky_rate,
            "input_scaling": self.input_scaling,
            "ridge": self.ridge,
            "guess": self.guess,
            "seed": self.seed,
            "status": self.status,
            "error": self.error,
            "train_acc": self.train_acc,
            "valid_acc": self.valid_acc,
            "test_acc": self.test_acc,
            "threshold": self.threshold,
            "timing": {"seconds": self.seconds},
        }


@dataclass(frozen=True)
class BestConfig:
    """The selected configuration with its across-guess statistics."""

    config_index: int
    spectral_radius: float
    leaky_rate: float
    input_scaling: float
    ridge: float
    mean_valid_acc: float
    mean_test_acc: float
    std_test_acc: float
    n_guesses_ok: int

    def to_dict(self) -> dict:
        return {
            "config_index": self.config_index,
            "spectral_radius": self.spectral_radius,
            "leaky_rate": self.leaky_rate,
            "input_scaling": self.input_scaling,
            "ridge": self.ridge,
            "mean_valid_acc": self.mean_valid_acc,
            "mean_test_acc": self.mean_test_acc,
            "std_test_acc": self.std_test_acc,
            "n_guesses_ok": self.n_guesses_ok,
        }


@dataclass(frozen=True)
class SelectionResult:
    """All trial reports plus the selected configuration, if any."""

    trials: list
    best: BestConfig | None


def guess_seed(master_seed: int, arch_index: int, guess: int) -> int:
    """Derive one reservoir seed per (search cell, guess).

    The derivation is position-based, so adding grid values or guesses
    never changes the seeds of existing cells.
    """
    seq = np.random.SeedSequence((master_seed, arch_index, guess))
    return int(seq.generate_state(1, dtype=np.uint32)[0])


def _run_work(item):
    """Run one (configuration cell, guess) ridge sweep; never raises."""
    dataset, config, ridges, ip, washout, threshold, tune = item
    try:
        results = sweep_ridges(
            dataset,
            config,
            ridges,
            ip=ip,
            washout=washout,
            threshold=threshold,
            tune_threshold=tune,
        )
        return "ok", results
    except Exception as exc:  # report the failure, keep the search going
        return "failed", f"{type(exc).__name__}: {exc}"


def _select_best(trials, grid: GridSpec) -> BestConfig | None:
    by_config = {}
    for trial in trials:
        if trial.status == "ok":
            by_config.setdefault(trial.config_index, []).append(trial)
    best = None
    best_mean = -1.0
    for config_index in sorted(by_config):
        group = by_config[config_index]
        mean_valid = float(np.mean([t.valid_acc for t in group]))
        if mean_valid > best_mean:  # ties keep the earlier grid index
            best_mean = mean_valid
            first = group[0]
            best = BestConfig(
                config_index=config_index,
                spectral_radius=first.spectral_radius,
                leaky_rate=first.leaky_rate,
                input_scaling=first.input_scaling,
                ridge=first.ridge,
                mean_valid_acc=mean_valid,
                mean_test_acc=float(np.mean([t.test_acc for t in group])),
                std_test_acc=float(np.std([t.test_acc for t in group])),
                n_guesses_ok=len(group),
            )
    return best


def grid_search(
    dataset: PianoRollDataset,
    base: ReservoirConfig,
    grid: GridSpec = GridSpec(),
    master_seed: int = 0,
    ip: IpConfig | None = None,
    washout: int = 0,
    threshold: float = 0.5,
    tune_threshold: bool = False,
    workers: int = 1,
) -> SelectionResult:
    """Search the grid around a base architecture on one dataset.

    `base` fixes layers, units, and connectivity; its radius, rate,
    scaling, and seed fields are overwritten per cell. Work is split by
    (cell, guess) and optionally spread over worker processes; results
    come back in deterministic order either way.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    arch_cells = list(
        product(grid.spectral_radii, grid.leaky_rates, grid.input_scalings)
    )
    work_meta = []
    work_items = []
    for arch_index, (rho, rate, scaling) in enumerate(arch_cells):
        for guess in range(grid.n_guesses):
            seed = guess_seed(master_seed, arch_index, guess)
            config = replace(
                base,
                input_dim=dataset.dim,
                spectral_radius_target=clip_radius_target(rho),
                leaky_rate=rate,
                input_scaling=scaling,
                seed=seed,
            )
            work_meta.append((arch_index, rho, rate, scaling, guess, seed))
            work_items.append(
                (dataset, config, grid.ridges, ip, washout, threshold, tune_threshold)
            )
    if workers == 1:
        outcomes = [_run_work(item) for item in work_items]
    else:
        with Pool(processes=workers) as pool:
            outcomes = pool.map(_run_work, work_items)

    trials = []
    for (arch_index, rho, rate, scaling, guess, seed), (status, payload) in zip(
        work_meta, outcomes
    ):
        for ridge_index, ridge in enumerate(grid.ridges):
            config_index = arch_index * len(grid.ridges) + ridge_index
            common = dict(
                config_index=config_index,
                spectral_radius=rho,
                leaky_rate=rate,
                input_scaling=scaling,
                ridge=ridge,
                guess=guess,
                seed=seed,
            )
            if status == "ok":
                result: TrialResult = payload[ridge_index]
                trials.append(
                    TrialReport(
                        status="ok",
                        train_acc=result.train_acc,
                        valid_acc=result.valid_acc,
                        test_acc=result.test_acc,
                        threshold=result.threshold,
                        seconds=result.seconds,
                        **common,
                    )
                )
            else:
                trials.append(TrialReport(status="failed", error=payload, **common))
    trials.sort(key=lambda t: (t.config_index, t.guess))
    return SelectionResult(trials=trials, best=_select_best(trials, grid))


def deep_trained_parameters(
    output_dim: int, n_layers: int, units_per_layer: int
) -> int:
    """Trained parameters of a deep reservoir model.

    The readout maps the concatenated state plus a bias to the outputs;
    adaptation trains one gain and one bias per unit. Reservoir weights
    are fixed and not counted.
    """
    total_units = n_layers * units_per_layer
    return output_dim * (total_units + 1) + 2 * total_units


def srn_parameters(input_dim: int, output_dim: int, units: int) -> int:
    """Trained parameters of a simple recurrent network."""
    return (
        input_dim * units + units * units + units + output_dim * (units + 1)
    )


def lstm_parameters(input_dim: int, output_dim: int, units: int) -> int:
    """Trained parameters of an LSTM: four gated blocks plus readout."""
    return 4 * (input_dim * units + units * units + units) + output_dim * (
        units + 1
    )


def gru_parameters(input_dim: int, output_dim: int, units: int) -> int:
    """Trained parameters of a GRU: three gated blocks plus readout."""
    return 3 * (input_dim * units + units * units + units) + output_dim * (
        units + 1
    )


def units_for_budget(param_fn, budget: int) -> int:
    """Largest unit count whose parameter total stays within `budget`.

    `param_fn` maps a unit count to a parameter total and must be
    nondecreasing; the search is by doubling plus bisection.
    """
    if param_fn(1) > budget:
        raise ValueError(f"budget {budget} is below the one-unit size {param_fn(1)}")
    hi = 1
    while param_fn(hi) <= budget:
        hi *= 2
    lo = hi // 2  # param_fn(lo) <= budget < param_fn(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if param_fn(mid) <= budget:
            lo = mid
        else:
            hi = mid
    return lo
