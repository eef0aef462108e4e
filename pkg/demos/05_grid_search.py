"""The selection protocol: grid search with repeated random guesses.

Every combination of spectral radius, leaky rate, input scaling, and
ridge strength is trained several times with independently derived
seeds; a configuration is judged by its mean validation accuracy across
those guesses, and failures are recorded rather than aborting the
search. This demo runs a reduced grid; the `deepesn grid` command runs
the same machinery from a JSON config.
"""

from deepesn import GridSpec, ReservoirConfig, grid_search, make_synthetic_dataset


def main():
    dataset = make_synthetic_dataset(seed=3)
    base = ReservoirConfig(
        input_dim=dataset.dim,
        n_layers=2,
        units_per_layer=30,
        connectivity=0.2,
        seed=0,
    )
    grid = GridSpec(
        spectral_radii=(0.3, 0.9),
        leaky_rates=(0.5, 1.0),
        input_scalings=(1.0,),
        ridges=(1e-3, 1e-1),
        n_guesses=3,
    )
    print(f"searching {grid.n_configs} configurations x {grid.n_guesses} guesses")

    result = grid_search(dataset, base, grid=grid, master_seed=0)

    print()
    print(f"{'idx':>4} {'rho':>4} {'a':>4} {'ridge':>6} {'guess':>5} "
          f"{'valid':>7} {'test':>7}")
    for trial in result.trials:
        print(f"{trial.config_index:4d} {trial.spectral_radius:4.1f} "
              f"{trial.leaky_rate:4.1f} {trial.ridge:6.0e} {trial.guess:5d} "
              f"{trial.valid_acc:7.3f} {trial.test_acc:7.3f}")

    best = result.best
    print()
    print(f"selected configuration {best.config_index}: "
          f"rho={best.spectral_radius}, a={best.leaky_rate}, "
          f"scaling={best.input_scaling}, ridge={best.ridge}")
    print(f"mean valid ACC {best.mean_valid_acc:.3f}, "
          f"test ACC {best.mean_test_acc:.3f} "
          f"(std {best.std_test_acc:.3f} over {best.n_guesses_ok} guesses)")
    print()
    print("the same search from the command line:")
    print("  deepesn grid dataset.json --config config.json --seed 0 --out report.json")


if __name__ == "__main__":
    main()
