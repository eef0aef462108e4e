"""Linear readout trained by ridge regression in streaming form.

States never need to be held in one giant design matrix: an accumulator
keeps the normal-equation blocks X^T X and X^T Y (with a constant bias
feature appended to X) and grows them batch by batch. Solving for a
given ridge strength is then a single symmetric solve, so sweeping
several strengths reuses the same accumulated blocks. Predictions are
affine maps of the state, binarized at a threshold for on/off targets.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

logger = logging.getLogger(__name__)

__all__ = ["RidgeAccumulator", "RidgeReadout", "ridge_solve", "binarize"]


def ridge_solve(xtx: np.ndarray, xty: np.ndarray, ridge: float) -> np.ndarray:
    """Solve (X^T X + ridge I) W = X^T Y for W.

    The regularizer is added to every diagonal entry, the bias feature
    included. The system is symmetrized before factorization to shed
    accumulation round-off; if the Cholesky factorization still fails,
    a least-squares solve is used instead.
    """
    if ridge < 0.0:
        raise ValueError(f"ridge must be >= 0, got {ridge}")
    a = xtx + ridge * np.eye(xtx.shape[0])
    a = 0.5 * (a + a.T)
    try:
        return cho_solve(cho_factor(a), xty)
    except np.linalg.LinAlgError:
        logger.warning(
            "normal equations not positive definite at ridge=%g; "
            "falling back to least squares",
            ridge,
        )
        return np.linalg.lstsq(a, xty, rcond=None)[0]


def binarize(values: np.ndarray, threshold: float = 0.5) -> np.ndarray:
    """Map continuous outputs to {0, 1}; values at the threshold are on."""
    return (np.asarray(values) >= threshold).astype(np.int8)


class RidgeAccumulator:
    """Streaming accumulator for the ridge normal equations.

    Feature vectors are reservoir states of length `state_dim` with an
    implicit constant 1 appended, so the solved weights carry an output
    bias in their last row.
    """

    def __init__(self, state_dim: int, output_dim: int):
        if state_dim < 1 or output_dim < 1:
            raise ValueError(
                f"state_dim and output_dim must be >= 1, got "
                f"{state_dim} and {output_dim}"
            )
        self.state_dim = state_dim
        self.output_dim = output_dim
        self.xtx = np.zeros((state_dim + 1, state_dim + 1))
        self.xty = np.zeros((state_dim + 1, output_dim))
        self.n_samples = 0

    def add(self, states: np.ndarray, targets: np.ndarray) -> None:
        """Accumulate a batch of (state, target) rows.

        `states` has shape (T, state_dim) and `targets` (T, output_dim).
        The bias blocks are updated without materializing the augmented
        design matrix.
        """
        states = np.asarray(states, dtype=float)
        targets = np.asarray(targets, dtype=float)
        if states.ndim != 2 or states.shape[1] != self.state_dim:
            raise ValueError(
                f"states must have shape (T, {self.state_dim}), got {states.shape}"
            )
        if targets.shape != (states.shape[0], self.output_dim):
            raise ValueError(
                f"targets must have shape ({states.shape[0]}, {self.output_dim}), "
                f"got {targets.shape}"
            )
        d = self.state_dim
        col_sums = states.sum(axis=0)
        self.xtx[:d, :d] += states.T @ states
        self.xtx[:d, d] += col_sums
        self.xtx[d, :d] += col_sums
        self.xtx[d, d] += states.shape[0]
        self.xty[:d] += states.T @ targets
        self.xty[d] += targets.sum(axis=0)
        self.n_samples += states.shape[0]

    def solve(self, ridge: float, threshold: float = 0.5) -> "RidgeReadout":
        """Solve the accumulated system into a ready-to-use readout."""
        if self.n_samples == 0:
            raise ValueError("cannot solve a readout from zero samples")
        return RidgeReadout(
            weights=ridge_solve(self.xtx, self.xty, ridge), threshold=threshold
        )


@dataclass
class RidgeReadout:
    """Trained affine readout with a binarization threshold.

    `weights` has shape (state_dim + 1, output_dim); the last row is the
    output bias.
    """

    weights: np.ndarray
    threshold: float = 0.5

    @property
    def state_dim(self) -> int:
        return self.weights.shape[0] - 1

    @property
    def output_dim(self) -> int:
        return self.weights.shape[1]

    def predict_continuous(self, states: np.ndarray) -> np.ndarray:
        """Affine outputs before binarization, shape (T, output_dim)."""
        states = np.asarray(states, dtype=float)
        if states.ndim != 2 or states.shape[1] != self.state_dim:
            raise ValueError(
                f"states must have shape (T, {self.state_dim}), got {states.shape}"
            )
        return states @ self.weights[:-1] + self.weights[-1]

    def predict(self, states: np.ndarray) -> np.ndarray:
        """Binary outputs, thresholding the continuous predictions."""
        return binarize(self.predict_continuous(states), self.threshold)
