"""Monte-Carlo identification campaign on the four-story benchmark chain.

Each run draws a fresh synthetic motion (seed base_seed + k), corrupts
the measured accelerations and the measured input with 10% RMS noise,
runs the constrained unscented filter, and closes the loop with a
forward simulation at the identified parameters.  Prints the campaign
summary: stiffness recovery, state tracking, the stiffness-vs-shape
spread signature, damage-index accuracy, and forward force errors.

Usage:
    python3 scripts/mc_campaign.py [--runs 20] [--seed 0] [--jobs 4]
                                   [--out out/campaign]
"""
import argparse
import os
import time

import numpy as np

from bwlab import estimation, fileio, groundmotion, simulate


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=4)
    ap.add_argument("--out", default="out/campaign")
    args = ap.parse_args(argv)
    os.makedirs(args.out, exist_ok=True)

    system = simulate.benchmark_chain()
    spectrum = groundmotion.SpectrumParams.medium_soil()
    start = time.perf_counter()
    camp = estimation.monte_carlo(
        system, spectrum, groundmotion.SynthesisConfig(seed=args.seed),
        n_runs=args.runs, base_seed=args.seed, jobs=args.jobs,
    )
    elapsed = time.perf_counter() - start

    alive = ~camp.diverged
    print(f"{camp.n_runs} runs, {int(np.sum(~alive))} diverged, {elapsed:.0f}s")

    ns = camp.n_stories
    norm = camp.normalized_params()[alive]
    k_cols = norm[:, 0:ns]
    beta_cols = norm[:, 2 * ns:3 * ns]
    frac_k = np.mean(np.all(np.abs(k_cols - 1.0) <= 0.03, axis=1))
    print(f"stiffness within 3% on every story: {frac_k:.0%} of runs")
    print("  k  mean " + np.array2string(k_cols.mean(axis=0), precision=4)
          + "  sd " + np.array2string(k_cols.std(axis=0, ddof=1), precision=4))
    print("  beta mean " + np.array2string(beta_cols.mean(axis=0), precision=3)
          + "  sd " + np.array2string(beta_cols.std(axis=0, ddof=1), precision=3))

    # The identifiability signature: shape-parameter scatter dwarfs
    # stiffness scatter while everything downstream stays accurate.
    ratios = beta_cols.std(axis=0, ddof=1) / k_cols.std(axis=0, ddof=1)
    print("  spread ratio sd(beta)/sd(k) per story: "
          + np.array2string(ratios, precision=1))

    state = camp.state_nrmse_matrix()[alive]
    print(f"state NRMSE: worst {np.max(state):.4f}%, "
          f"median {np.median(state):.4f}%")

    di_ratio = camp.di_ratio()[alive]
    frac_di = np.mean(np.all(np.abs(di_ratio - 1.0) <= 0.05, axis=1))
    print(f"damage index within 5% on every story: {frac_di:.0%} of runs "
          f"(worst story error {100 * np.max(np.abs(di_ratio - 1.0)):.2f}%)")

    fr = camp.fr_nrmse_matrix()[alive]
    print(f"forward-simulated force NRMSE at identified parameters: "
          f"worst {np.nanmax(fr):.4f}%")

    # Observation, not a target: the top-story true damage stays well
    # below 1 for every draw under the 0.4 g cap.
    di4 = np.array([rec.di_true[-1] for rec in camp.records])[alive]
    print(f"true top-story DI across motions: median {np.median(di4):.3f}, "
          f"range [{np.min(di4):.3f}, {np.max(di4):.3f}], "
          f"{np.mean(di4 > 1.0):.0%} above 1")

    fileio.write_json(os.path.join(args.out, "campaign.json"), camp.to_dict())
    fileio.write_csv(
        os.path.join(args.out, "normalized_params.csv"),
        ["seed", *estimation.theta_names(ns)],
        ([rec.seed, *rec.normalized_theta] for rec in camp.records),
    )
    print(f"artifacts -> {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
