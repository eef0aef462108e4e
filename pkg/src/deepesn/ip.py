"""Intrinsic-plasticity pre-training of reservoir gains and biases.

Adapts the per-unit gain g and bias b inside tanh(g * net + b) so that
each unit's output distribution approaches a Gaussian with a chosen
mean and standard deviation, by gradient descent on the KL divergence
between the two. Reservoir weights are never touched. For a tanh unit
the updates at one step are

    db = -eta * (-mu / s^2 + (y / s^2) * (2 s^2 + 1 - y^2 + mu * y))
    dg = eta / g + db * net

with target mean mu, target standard deviation s, and learning rate
eta. Updates are applied online: at every time step each layer first
computes its output with its current parameters, then adjusts them.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .reservoir import DeepReservoir

logger = logging.getLogger(__name__)

__all__ = ["IpConfig", "ip_update", "pretrain_ip", "activation_statistics"]

# Gains this small would effectively disconnect a unit, and eta / g in
# the gain update would blow up; clamp and report instead.
_MIN_GAIN = 1e-6


@dataclass(frozen=True)
class IpConfig:
    """Targets and schedule for intrinsic-plasticity adaptation."""

    target_mean: float = 0.0
    target_std: float = 0.1
    learning_rate: float = 1e-3
    epochs: int = 5

    def __post_init__(self):
        if self.target_std <= 0.0:
            raise ValueError(f"target_std must be > 0, got {self.target_std}")
        if self.learning_rate <= 0.0:
            raise ValueError(
                f"learning_rate must be > 0, got {self.learning_rate}"
            )
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")


def ip_update(
    gain: np.ndarray,
    bias: np.ndarray,
    net: np.ndarray,
    y: np.ndarray,
    config: IpConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """One online update of (gain, bias) given net input and tanh output.

    Returns new arrays; the inputs are not modified. Gains are clamped
    from below so a unit can shrink but never vanish or change sign.
    """
    mu = config.target_mean
    var = config.target_std**2
    eta = config.learning_rate
    db = -eta * (-mu / var + (y / var) * (2.0 * var + 1.0 - y * y + mu * y))
    dg = eta / gain + db * net
    new_gain = gain + dg
    clamped = new_gain < _MIN_GAIN
    if np.any(clamped):
        logger.warning(
            "clamped %d gain(s) at %g during intrinsic-plasticity update",
            int(np.sum(clamped)),
            _MIN_GAIN,
        )
        new_gain = np.maximum(new_gain, _MIN_GAIN)
    return new_gain, bias + db


def pretrain_ip(
    reservoir: DeepReservoir,
    sequences: list[np.ndarray],
    config: IpConfig = IpConfig(),
) -> DeepReservoir:
    """Adapt every layer's gain and bias on the given input sequences.

    Runs `config.epochs` passes over the sequences in the order given.
    Each sequence starts from the zero state. Within a time step the
    layers are processed bottom-up: a layer computes its output with
    its current parameters, passes its fresh state upward, and only
    then updates. The reservoir is modified in place and returned.
    """
    for _ in range(config.epochs):
        for inputs in sequences:
            inputs = np.asarray(inputs, dtype=float)
            states = reservoir.initial_states()
            for t in range(inputs.shape[0]):
                drive = inputs[t]
                for i, layer in enumerate(reservoir.layers):
                    net = layer.preactivation(states[i], drive)
                    y = np.tanh(layer.gain * net + layer.bias)
                    states[i] = (1.0 - layer.leaky_rate) * states[i] + (
                        layer.leaky_rate * y
                    )
                    layer.gain, layer.bias = ip_update(
                        layer.gain, layer.bias, net, y, config
                    )
                    drive = states[i]
    return reservoir


def activation_statistics(
    reservoir: DeepReservoir, sequences: list[np.ndarray]
) -> tuple[np.ndarray, np.ndarray]:
    """Per-unit mean and standard deviation of the tanh outputs.

    Pools every time step of every sequence, without adapting anything.
    Useful to check how close each unit's output distribution is to the
    adaptation targets. Returns (means, stds), each of shape
    (n_layers, units_per_layer).
    """
    shape = (reservoir.config.n_layers, reservoir.config.units_per_layer)
    sums = np.zeros(shape)
    sq_sums = np.zeros(shape)
    count = 0
    for inputs in sequences:
        inputs = np.asarray(inputs, dtype=float)
        states = reservoir.initial_states()
        for t in range(inputs.shape[0]):
            drive = inputs[t]
            for i, layer in enumerate(reservoir.layers):
                y = np.tanh(
                    layer.gain * layer.preactivation(states[i], drive) + layer.bias
                )
                states[i] = (1.0 - layer.leaky_rate) * states[i] + (
                    layer.leaky_rate * y
                )
                sums[i] += y
                sq_sums[i] += y * y
                drive = states[i]
        count += inputs.shape[0]
    if count == 0:
        raise ValueError("no time steps to compute activation statistics from")
    means = sums / count
    stds = np.sqrt(np.maximum(sq_sums / count - means**2, 0.0))
    return means, stds
