"""Command line front end.

    crsp plan <scenario> [--seed N] [--out DIR] [--plot] [--no-refine] [--verbose]
    crsp suite <dir or scenarios...> [--reps N] [--seed-base N] [--out DIR] [--jobs N]
    crsp replay <trajectory.csv>

Exit status: 0 success, 2 infeasible plan or a replayed segment that
never lands, 3 invalid scenario or a replayed landing that disagrees
with report.json, 4 unreadable scenario or trajectory file.
"""

# License: MIT

import argparse
import glob
import json
import math
import os
import sys
import time

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from tqdm import tqdm

from CRSP.data.data_class import BallState, PhysicsParams
from CRSP.data.scenario import (
    bundled_scenarios,
    load_scenario,
    resolve_path,
    scenario_to_dict,
)
from CRSP.exceptions import CRSPError, ScenarioParseError, ValidationError
from CRSP.models.physics.flight import (
    T_MAX,
    TRAJECTORY_COLUMNS,
    find_descending_crossing,
    sample_trajectory,
)
from CRSP.models.planner.strike import plan_strike

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_INVALID = 3
EXIT_PARSE = 4

FLOAT_FORMAT = "%.9g"
REPLAY_TOL = 1e-6


def _report_row(scenario, result, plan_time):
    target = scenario.cost_spec.target
    row = {
        "scenario": scenario.name,
        "seed": scenario.pso.seed,
        "feasible": result.feasible,
        "target_x": target[0],
        "target_y": target[1],
        "reached_x": math.nan,
        "reached_y": math.nan,
        "distance": math.nan,
        "cost": result.cost,
        "T": math.nan,
        "v_xr": math.nan,
        "v_yr": math.nan,
        "v_zr": math.nan,
        "landing_speed": math.nan,
        "spin_x": math.nan,
        "spin_xy": math.nan,
        "max_height": math.nan,
        "evaluations": result.evaluations,
        "refined": result.refined,
        "refine_evaluations": result.refine_evaluations,
        "plan_time_s": plan_time,
    }
    if result.feasible:
        post = result.post_impact
        row.update(
            reached_x=result.landing[0],
            reached_y=result.landing[1],
            distance=result.cost_breakdown["distance"],
            T=result.strike.T,
            v_xr=result.strike.racket.v_xr,
            v_yr=result.strike.racket.v_yr,
            v_zr=result.strike.racket.v_zr,
            landing_speed=result.landing_state.vel.norm(),
            spin_x=post.spin.x,
            spin_xy=math.hypot(post.spin.x, post.spin.y),
            max_height=result.max_height,
        )
        for kind, value in result.cost_breakdown.items():
            if kind != "distance":
                row[f"term_{kind}"] = value
    return row


def export_trajectories(scenario, result, out_dir):
    """Write pre_impact.csv and post_impact.csv at 1 ms cadence."""
    os.makedirs(out_dir, exist_ok=True)
    params = scenario.physics
    incoming = scenario.incoming
    pre = sample_trajectory(incoming, result.strike.T - incoming.t, params)
    post_state = result.post_impact
    post = sample_trajectory(
        post_state, result.landing_state.t - post_state.t, params
    )
    pre.to_csv(
        os.path.join(out_dir, "pre_impact.csv"),
        index=False,
        float_format=FLOAT_FORMAT,
    )
    post.to_csv(
        os.path.join(out_dir, "post_impact.csv"),
        index=False,
        float_format=FLOAT_FORMAT,
    )
    return pre, post


def plot_trajectories(pre, post, table, path):
    """Top (x-y) and side (y-z) views of both flight segments."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    half_l, half_w = table.length / 2, table.width / 2
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(12, 5))

    ax1.plot(
        [-half_w, half_w, half_w, -half_w, -half_w],
        [-half_l, -half_l, half_l, half_l, -half_l],
        color="blue",
    )
    ax1.plot([-half_w, half_w], [0, 0], color="red")
    ax1.plot(pre["x"], pre["y"], color="gray", label="before impact")
    ax1.plot(post["x"], post["y"], color="orange", label="after impact")
    ax1.set_xlabel("x (m)")
    ax1.set_ylabel("y (m)")
    ax1.set_aspect("equal")
    ax1.set_title("Top view")
    ax1.legend()

    ax2.plot([-half_l, half_l], [0, 0], color="blue", lw=3)
    ax2.plot([0, 0], [0, table.net_height], color="red", lw=2)
    ax2.plot(pre["y"], pre["z"], color="gray")
    ax2.plot(post["y"], post["z"], color="orange")
    ax2.set_xlabel("y (m)")
    ax2.set_ylabel("z (m)")
    ax2.set_title("Side view")

    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def write_report(df, out_dir, scenario=None, name="report"):
    """Write `<name>.csv` and the `<name>.json` sidecar."""
    os.makedirs(out_dir, exist_ok=True)
    df.to_csv(
        os.path.join(out_dir, f"{name}.csv"),
        index=False,
        float_format=FLOAT_FORMAT,
    )
    sidecar = {"rows": json.loads(df.to_json(orient="records"))}
    if scenario is not None:
        sidecar["scenario"] = scenario_to_dict(scenario)
    with open(os.path.join(out_dir, f"{name}.json"), "w") as f:
        json.dump(sidecar, f, indent=4)


def format_report(df):
    return df.to_string(index=False, float_format=lambda v: f"{v:.4g}")


def run(
    scenario, out_dir=None, seed=None, plot=False, verbose=False, refine=True
):
    """Plan one scenario and optionally export its artifacts.

    Returns:
        (report row dict, PlanResult)
    """
    if seed is not None:
        scenario = scenario._replace(
            seed=seed, pso=scenario.pso._replace(seed=seed)
        )

    start = time.perf_counter()
    result = plan_strike(
        scenario.incoming,
        scenario.cost_spec,
        ws=scenario.workspace,
        table=scenario.table,
        params=scenario.physics,
        pso_config=scenario.pso,
        verbose=verbose,
        refine=refine,
    )
    plan_time = time.perf_counter() - start

    row = _report_row(scenario, result, plan_time)
    if out_dir is not None:
        if result.feasible:
            pre, post = export_trajectories(scenario, result, out_dir)
            if plot:
                plot_trajectories(
                    pre,
                    post,
                    scenario.table,
                    os.path.join(out_dir, "trajectory.png"),
                )
        write_report(pd.DataFrame([row]), out_dir, scenario)
    return row, result


def _suite_job(path, seed, out_dir):
    scenario = load_scenario(path)
    run_dir = None
    if out_dir is not None:
        run_dir = os.path.join(out_dir, scenario.name, f"seed_{seed}")
    row, _ = run(scenario, out_dir=run_dir, seed=seed)
    row["success"] = bool(
        row["feasible"] and row["distance"] <= scenario.tolerance
    )
    row["tolerance"] = scenario.tolerance
    return row


def _error_row(path, seed, err):
    return {
        "scenario": os.path.splitext(os.path.basename(path))[0],
        "seed": seed,
        "feasible": False,
        "success": False,
        "error": str(err),
    }


def _safe_job(path, seed, out_dir):
    try:
        return _suite_job(path, seed, out_dir)
    except (CRSPError, RuntimeError) as err:
        # parse and validation errors, divergence, failed verification
        return _error_row(path, seed, err)


def aggregate(rows):
    """Per-scenario success rate, median planning time and objectives."""
    if rows.empty:
        return pd.DataFrame(
            columns=["scenario", "runs", "success_rate", "median_plan_time_s"]
        )
    value_cols = [
        c
        for c in rows.columns
        if c in ("cost", "distance", "landing_speed", "spin_x", "spin_xy", "max_height")
        or c.startswith("term_")
    ]
    grouped = rows.groupby("scenario", sort=False)
    summary = grouped.agg(
        runs=("seed", "size"),
        success_rate=("success", "mean"),
        feasible_rate=("feasible", "mean"),
    )
    if "plan_time_s" in rows:
        summary["median_plan_time_s"] = grouped["plan_time_s"].median()
    for col in value_cols:
        summary[f"median_{col}"] = grouped[col].median()
    return summary.reset_index()


def run_suite(
    paths, repetitions=1, seed_base=0, out_dir=None, n_jobs=1, verbose=False
):
    """Run every scenario `repetitions` times with consecutive seeds.

    Returns:
        (rows DataFrame in input order, aggregate DataFrame)
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    jobs = [
        (path, seed_base + k) for path in paths for k in range(repetitions)
    ]
    if verbose:
        jobs_iter = tqdm(jobs, desc="suite")
    else:
        jobs_iter = jobs

    if n_jobs == 1:
        rows = [_safe_job(p, s, out_dir) for p, s in jobs_iter]
    else:
        rows = Parallel(n_jobs=n_jobs)(
            delayed(_safe_job)(p, s, out_dir) for p, s in jobs_iter
        )
    rows = pd.DataFrame(rows)
    summary = aggregate(rows)
    if out_dir is not None:
        write_report(rows, out_dir, name="suite_runs")
        write_report(summary, out_dir, name="suite_summary")
    return rows, summary


def _replay_params(csv_path):
    sidecar = os.path.join(os.path.dirname(csv_path), "report.json")
    if not os.path.exists(sidecar):
        return PhysicsParams(), None
    with open(sidecar, "r") as f:
        doc = json.load(f)
    params = PhysicsParams(**doc["scenario"]["physics"])
    rows = doc.get("rows") or [None]
    return params, rows[0]


def replay(csv_path, params=None):
    """Re-derive the landing point of an exported flight segment.

    The first row of the file is taken as the initial state.

    Returns:
        (x_f, y_f) or None if the segment never comes down on z = 0
    """
    df = pd.read_csv(csv_path)
    if list(df.columns) != TRAJECTORY_COLUMNS:
        raise ValueError(f"unexpected trajectory columns {list(df.columns)}")
    if df.empty:
        raise ValueError(f"{csv_path} holds no samples")
    if params is None:
        params, _ = _replay_params(csv_path)
    first = df.iloc[0]
    initial = BallState.create(
        pos=first[["x", "y", "z"]].to_numpy(),
        vel=first[["vx", "vy", "vz"]].to_numpy(),
        spin=first[["wx", "wy", "wz"]].to_numpy(),
        t=first["t"],
    )
    duration = df["t"].iloc[-1] - df["t"].iloc[0] + T_MAX
    hit = find_descending_crossing(initial, 0.0, duration, params)
    if hit is None:
        return None
    return hit[1].pos.x, hit[1].pos.y


def _scenario_paths(items):
    paths = []
    for item in items:
        if os.path.isdir(item):
            paths.extend(sorted(glob.glob(os.path.join(item, "*.json"))))
        else:
            paths.append(resolve_path(item))
    return paths


def build_parser():
    parser = argparse.ArgumentParser(
        prog="crsp",
        description="Strike planning for a Cartesian ping-pong robot.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    plan = sub.add_parser("plan", help="plan one scenario")
    plan.add_argument(
        "scenario",
        help=f"scenario file or bundled name ({', '.join(bundled_scenarios())})",
    )
    plan.add_argument("--seed", type=int, default=None)
    plan.add_argument("--out", type=str, default=None)
    plan.add_argument("--plot", action="store_true")
    plan.add_argument(
        "--no-refine",
        dest="refine",
        action="store_false",
        help="keep the swarm best without the SLSQP stages",
    )
    plan.add_argument("--verbose", action="store_true")

    suite = sub.add_parser("suite", help="run scenarios over many seeds")
    suite.add_argument("paths", nargs="*", help="directories or scenario files")
    suite.add_argument("--reps", type=int, default=1)
    suite.add_argument("--seed-base", type=int, default=0)
    suite.add_argument("--out", type=str, default=None)
    suite.add_argument("--jobs", type=int, default=1)
    suite.add_argument("--verbose", action="store_true")

    rep = sub.add_parser("replay", help="re-derive the landing of a trajectory file")
    rep.add_argument("trajectory")
    return parser


def _cmd_plan(args):
    try:
        scenario = load_scenario(args.scenario)
    except ScenarioParseError as err:
        print(f"Parse error: {err}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as err:
        print(f"Invalid scenario: {err}", file=sys.stderr)
        return EXIT_INVALID

    out_dir = args.out
    if out_dir is not None:
        out_dir = os.path.join(out_dir, scenario.name)
    row, result = run(
        scenario,
        out_dir=out_dir,
        seed=args.seed,
        plot=args.plot,
        verbose=args.verbose,
        refine=args.refine,
    )
    print(format_report(pd.DataFrame([row])))
    return EXIT_OK if result.feasible else EXIT_INFEASIBLE


def _cmd_suite(args):
    paths = _scenario_paths(args.paths)
    rows, summary = run_suite(
        paths,
        repetitions=args.reps,
        seed_base=args.seed_base,
        out_dir=args.out,
        n_jobs=args.jobs,
        verbose=args.verbose,
    )
    if not summary.empty:
        print(format_report(summary))
    return EXIT_OK


def _cmd_replay(args):
    try:
        params, row = _replay_params(args.trajectory)
        landing = replay(args.trajectory, params)
        start = float(pd.read_csv(args.trajectory, nrows=1)["t"].iloc[0])
    except (OSError, ValueError, KeyError, IndexError, TypeError) as err:
        print(f"Unreadable trajectory: {err}", file=sys.stderr)
        return EXIT_PARSE
    if landing is None:
        print("The trajectory never comes down on the table.")
        return EXIT_INFEASIBLE
    print(f"landing: ({landing[0]:.9g}, {landing[1]:.9g})")

    if row is None or not row.get("feasible"):
        return EXIT_OK
    if abs(start - row["T"]) > REPLAY_TOL:
        # only the segment that starts at the strike ends at the reported landing
        print("segment does not start at the strike, nothing to compare")
        return EXIT_OK
    reported = np.array([row["reached_x"], row["reached_y"]], dtype=float)
    error = float(np.max(np.abs(reported - np.array(landing))))
    print(f"reported: ({reported[0]:.9g}, {reported[1]:.9g}), error {error:.3g} m")
    if error > REPLAY_TOL:
        return EXIT_INVALID
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "plan":
        return _cmd_plan(args)
    if args.command == "suite":
        return _cmd_suite(args)
    return _cmd_replay(args)


if __name__ == "__main__":
    sys.exit(main())
