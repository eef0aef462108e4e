"""Stacking reservoirs: what the layers see and what that costs.

A deep reservoir feeds each layer with the same-step state of the layer
below and hands the concatenation of all layers to the readout. Two
networks with the same total number of units can therefore differ a lot
in update cost: a stack of small layers multiplies several small
matrices, one wide layer multiplies a huge one.
"""

import time

import numpy as np

from deepesn import ReservoirConfig, init_deep_reservoir, run_sequence, step_deep


def build(n_layers, units, connectivity):
    return init_deep_reservoir(
        ReservoirConfig(
            input_dim=8,
            n_layers=n_layers,
            units_per_layer=units,
            leaky_rate=0.5,
            spectral_radius_target=0.9,
            input_scaling=1.0,
            connectivity=connectivity,
            seed=7,
        )
    )


def per_step_ms(reservoir, steps=2000):
    rng = np.random.default_rng(1)
    inputs = rng.uniform(-1, 1, size=(steps, 8))
    states = reservoir.initial_states()
    start = time.perf_counter()
    for t in range(steps):
        states = step_deep(reservoir, states, inputs[t])
    return (time.perf_counter() - start) / steps * 1e3


def main():
    print("== the global state is the concatenation of the layers ==")
    deep = build(n_layers=10, units=50, connectivity=0.2)
    rng = np.random.default_rng(2)
    states = run_sequence(deep, rng.uniform(-1, 1, size=(20, 8)))
    print(f"10 layers x 50 units -> state rows of length {states.shape[1]}")
    print(f"layer 3 occupies columns {2 * 50}..{3 * 50 - 1}")

    print()
    print("== same total units, very different update cost ==")
    wide_dense = build(n_layers=1, units=500, connectivity=1.0)
    deep_dense = build(n_layers=10, units=50, connectivity=1.0)
    wide_sparse = build(n_layers=1, units=500, connectivity=0.05)
    print(f"10 x 50 dense layers : {per_step_ms(deep_dense):8.4f} ms/step")
    print(f"1 x 500 dense layer  : {per_step_ms(wide_dense):8.4f} ms/step")
    print(f"1 x 500 sparse layer : {per_step_ms(wide_sparse):8.4f} ms/step")
    print("the stack pays for 10 small products, the wide layer for one")
    print("large product; sparsity buys the wide layer most of that back")


if __name__ == "__main__":
    main()
