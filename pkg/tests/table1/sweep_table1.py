"""
Strike planning for one incoming ball and four targets, each with its own
secondary objective, swept over seeds. Every row is also planned without
its secondary term for comparison.
"""

# MIT License


import argparse
import os

import numpy as np
import pandas as pd

from CRSP.cli import run
from CRSP.data.scenario import load_scenario


parser = argparse.ArgumentParser()
parser.add_argument("--n_seeds", type=int, default=20)
parser.add_argument("--seed_base", type=int, default=0)
parser.add_argument("--outdir", type=str, default="./")
parser.add_argument("--verbose", type=bool, default=False)
args = parser.parse_args()

out_dir = args.outdir
os.makedirs(out_dir, exist_ok=True)

rows = ["table1_row1", "table1_row2", "table1_row3", "table1_row4"]

main_df = pd.DataFrame()

for name in rows:
    scenario = load_scenario(name)
    baseline = scenario._replace(
        cost_spec=scenario.cost_spec._replace(terms=())
    )

    for seed in range(args.seed_base, args.seed_base + args.n_seeds):
        for variant, sc in (("with_term", scenario), ("no_term", baseline)):
            row, result = run(sc, seed=seed, verbose=args.verbose)
            row["variant"] = variant
            row["success"] = bool(
                row["feasible"] and row["distance"] <= scenario.tolerance
            )
            main_df = pd.concat([main_df, pd.DataFrame([row])])

        if args.verbose:
            print(f"{name} seed {seed} done")

main_df.to_csv(os.path.join(out_dir, "sweep_table1.csv"), index=False)

summary = main_df.groupby(["scenario", "variant"]).agg(
    success_rate=("success", "mean"),
    median_distance=("distance", "median"),
    median_spin_x=("spin_x", lambda v: np.median(np.abs(v))),
    median_max_height=("max_height", "median"),
    median_plan_time_s=("plan_time_s", "median"),
)
summary.to_csv(os.path.join(out_dir, "sweep_table1_summary.csv"))
print(summary)
