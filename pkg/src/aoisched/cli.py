"""Command line harness: generate instances, run solvers, sweep ensembles.

Sweeps and solve reports write delimited data (CSV/JSON) and render the
matching figures next to them. Exit codes: 0 success, 1 failure, 2 bad
usage. Set AOISCHED_WORKERS to parallelize sweep points across
processes; results are merged by (point, seed) so the output does not
depend on scheduling.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import checks
from .greedy import greedy_solve
from .instances import parse_edge_list, random_instance, reduction_instance
from .labeling import solve as gla_solve
from .model import Instance, load_instance, save_instance, validate
from .oracle import OracleLimitError, oracle_solve
from .symmetric import SymmetricInstance, optimal_policy, trip_cost
from .model import cost_fn_from_dict

SWEEP_POINTS = {
    "t": (25, 50, 75, 100, 125, 150),
    "s": (5, 10, 15, 20, 25),
    "k": (1, 2, 4, 6, 8, 10, 12),
}
SWEEP_ALGOS = {"t": ("gla", "greedy"), "s": ("gla", "greedy"), "k": ("gla",)}


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


def _load_valid_instance(path) -> Instance:
    instance = load_instance(path)
    problems = validate(instance)
    if problems:
        raise ValueError("invalid instance:\n  " + "\n  ".join(problems))
    return instance


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------


def _cmd_gen(args) -> int:
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.kind == "random":
        instance = random_instance(
            seed=args.seed,
            num_sns=args.sns,
            horizon_slots=args.horizon,
            slot_len=args.slot_len,
            radius_m=args.radius_m,
            battery_capacity=args.battery,
        )
        save_instance(instance, out)
    elif args.kind == "reduction":
        edges = parse_edge_list(args.edges) if args.edges else []
        instance = reduction_instance(args.nodes, edges)
        save_instance(instance, out)
    else:  # symmetric
        departures = [args.first_departure + k * args.gap for k in range(args.trips)]
        sym = SymmetricInstance(
            num_sns=args.sns,
            radius=args.radius,
            cost_fn=cost_fn_from_dict(json.loads(args.cost_fn)),
            departures=tuple(departures),
            end_time=departures[-1] + args.gap,
            recharge_time=args.recharge_time,
        )
        payload = {
            "symmetric": True,
            "num_sns": sym.num_sns,
            "radius_min": sym.radius,
            "cost_fn": sym.cost_fn.to_dict(),
            "departures": list(sym.departures),
            "end_time": sym.end_time,
            "initial_ages": list(sym.initial_ages),
            "recharge_time": sym.recharge_time,
        }
        out.write_text(json.dumps(payload, indent=2) + "\n")
    print(f"wrote {out}")
    return 0


def _load_symmetric(path) -> SymmetricInstance:
    payload = json.loads(Path(path).read_text())
    if not payload.get("symmetric"):
        raise ValueError(f"{path} is not a symmetric instance file")
    return SymmetricInstance(
        num_sns=int(payload["num_sns"]),
        radius=float(payload["radius_min"]),
        cost_fn=cost_fn_from_dict(payload["cost_fn"]),
        departures=tuple(payload["departures"]),
        end_time=float(payload["end_time"]),
        initial_ages=tuple(payload.get("initial_ages", ())),
        recharge_time=float(payload.get("recharge_time", 0.0)),
    )


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------


def _cmd_solve(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    if args.algo == "symmetric":
        sym = _load_symmetric(args.instance)
        t0 = time.perf_counter()
        policy = optimal_policy(sym)
        elapsed = time.perf_counter() - t0
        trips = []
        ages = sym.initial_ages
        from .symmetric import ages_after_trip

        for visit, duration in zip(policy.visits, sym.windows()):
            trips.append(trip_cost(visit, ages, duration, sym.radius, sym.cost_fn))
            ages = ages_after_trip(ages, visit, duration, sym.radius)
        report = {
            "visits": list(policy.visits),
            "total_cost": policy.total_cost,
            "average_cost": policy.average_cost,
            "trip_costs": trips,
            "runtime_s": elapsed,
        }
        (out_dir / "report.json").write_text(json.dumps(report, indent=2) + "\n")
        if not args.no_figure:
            from .figures import trip_figure

            trip_figure(policy.visits, trips, out_dir / "run_symmetric.png")
        print(f"symmetric: visits {list(policy.visits)}, total cost {policy.total_cost:.6g}")
        return 0

    instance = _load_valid_instance(args.instance)
    t0 = time.perf_counter()
    if args.algo == "gla":
        result = gla_solve(instance, capacity=args.k)
    elif args.algo == "greedy":
        result = greedy_solve(instance)
    else:
        result = oracle_solve(instance)
    elapsed = time.perf_counter() - t0

    schedule_path = out_dir / "schedule.json"
    schedule_path.write_text(json.dumps(result.schedule.to_dict(), indent=2) + "\n")
    payload = result.report.to_dict()
    payload["algo"] = args.algo
    payload["runtime_s"] = elapsed
    (out_dir / "report.json").write_text(json.dumps(payload, indent=2) + "\n")
    result.report.write_trace_csv(out_dir / "trace.csv")
    if not args.no_figure:
        from .figures import trace_figure

        trace_figure(result.report, out_dir / f"run_{args.algo}.png",
                     title=f"{args.algo}: normalized cost {result.report.normalized_cost:.4f}")
    print(
        f"{args.algo}: cost {result.report.cumulative_cost:.6g} "
        f"(normalized {result.report.normalized_cost:.6g}), "
        f"{len(result.schedule.actions)} actions, {elapsed:.2f}s"
    )
    return 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def _sweep_task(task: tuple) -> tuple:
    vary, point, seed, algo = task
    if vary == "t":
        instance = random_instance(seed, 20, point)
    elif vary == "s":
        instance = random_instance(seed, point, 100)
    else:
        instance = random_instance(seed, 20, 100)
    t0 = time.perf_counter()
    if algo == "greedy":
        result = greedy_solve(instance)
    elif vary == "k":
        result = gla_solve(instance, capacity=point)
    else:
        result = gla_solve(instance, capacity=1)
    elapsed = time.perf_counter() - t0
    if abs(result.cost - result.report.cumulative_cost) > 1e-9:
        raise RuntimeError(f"replay mismatch on {task}")
    return (point, seed, algo, result.report.normalized_cost, elapsed)


def _cmd_sweep(args) -> int:
    points = tuple(int(p) for p in args.points.split(",")) if args.points else SWEEP_POINTS[args.vary]
    algos = tuple(args.algos.split(",")) if args.algos else SWEEP_ALGOS[args.vary]
    tasks = [(args.vary, point, seed, algo)
             for point in points for seed in range(args.seeds) for algo in algos]

    workers = int(os.environ.get("AOISCHED_WORKERS", "1"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            raw = list(pool.map(_sweep_task, tasks))
    else:
        raw = [_sweep_task(t) for t in tasks]
    raw.sort(key=lambda r: (r[0], r[2], r[1]))

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for point in points:
        for algo in sorted(set(algos)):
            costs = [r[3] for r in raw if r[0] == point and r[2] == algo]
            times = [r[4] for r in raw if r[0] == point and r[2] == algo]
            mean = sum(costs) / len(costs)
            std = math.sqrt(sum((c - mean) ** 2 for c in costs) / len(costs))
            rows.append({
                "point": point,
                "algo": algo,
                "mean_cost": mean,
                "std_cost": std,
                "mean_runtime_ms": sum(times) / len(times) * 1000.0,
            })

    csv_path = out_dir / f"sweep_{args.vary}.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([args.vary, "algo", "mean_cost", "std", "mean_runtime_ms"])
        for row in rows:
            writer.writerow([
                row["point"], row["algo"],
                f"{row['mean_cost']:.12g}", f"{row['std_cost']:.12g}",
                f"{row['mean_runtime_ms']:.3f}",
            ])
    print(f"wrote {csv_path}")
    if not args.no_figure:
        from .figures import sweep_figure

        fig_path = out_dir / f"sweep_{args.vary}.png"
        sweep_figure(rows, args.vary, fig_path)
        print(f"wrote {fig_path}")
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _cmd_verify(args) -> int:
    results = checks.run_all(quick=args.quick)
    failures = 0
    for result in results:
        print(result.line())
        if not result.passed:
            failures += 1
    if failures:
        print(f"{failures} of {len(results)} checks failed", file=sys.stderr)
        return 1
    print(f"all {len(results)} checks passed")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aoisched",
        description="Age-of-information aware UAV route scheduling toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance file")
    gen_sub = gen.add_subparsers(dest="kind", required=True)
    g_random = gen_sub.add_parser("random", help="random disk layout")
    g_random.add_argument("--seed", type=int, required=True)
    g_random.add_argument("--sns", type=int, required=True)
    g_random.add_argument("--horizon", type=int, required=True, help="horizon in slots")
    g_random.add_argument("--slot-len", type=float, default=1.0)
    g_random.add_argument("--radius-m", type=float, default=5000.0)
    g_random.add_argument("--battery", type=float, default=25.0)
    g_random.add_argument("--out", required=True)
    g_reduction = gen_sub.add_parser("reduction", help="Hamiltonian-path gadget")
    g_reduction.add_argument("--nodes", type=int, required=True)
    g_reduction.add_argument("--edges", help="edge list file, one '<i> <j>' per line, 1-indexed")
    g_reduction.add_argument("--out", required=True)
    g_symmetric = gen_sub.add_parser("symmetric", help="uniform-radius instance")
    g_symmetric.add_argument("--sns", type=int, required=True)
    g_symmetric.add_argument("--radius", type=float, required=True)
    g_symmetric.add_argument("--trips", type=int, required=True)
    g_symmetric.add_argument("--gap", type=float, required=True,
                             help="time between consecutive departures")
    g_symmetric.add_argument("--first-departure", type=float, default=0.0)
    g_symmetric.add_argument("--recharge-time", type=float, default=0.0)
    g_symmetric.add_argument("--cost-fn", default='{"kind": "linear", "alpha": 1.0}',
                             help="cost function as JSON")
    g_symmetric.add_argument("--out", required=True)

    solve = sub.add_parser("solve", help="solve an instance file")
    solve.add_argument("--algo", choices=("gla", "greedy", "oracle", "symmetric"), required=True)
    solve.add_argument("--instance", required=True)
    solve.add_argument("--k", type=lambda v: None if v in ("inf", "none") else int(v),
                       default=1, help="labels per cell for gla ('inf' for unbounded)")
    solve.add_argument("--out-dir", default="out")
    solve.add_argument("--no-figure", action="store_true")

    sweep = sub.add_parser("sweep", help="ensemble sweep with CSV and figure output")
    sweep.add_argument("--vary", choices=("t", "s", "k"), required=True)
    sweep.add_argument("--seeds", type=int, required=True)
    sweep.add_argument("--points", help="comma-separated override of the sweep points")
    sweep.add_argument("--algos", help="comma-separated override of the algorithms")
    sweep.add_argument("--out-dir", default="out")
    sweep.add_argument("--no-figure", action="store_true")

    verify = sub.add_parser("verify", help="run the verification checks")
    verify.add_argument("--quick", action="store_true", help="smaller ensembles")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return _cmd_verify(args)
    except OracleLimitError as exc:
        return _fail(str(exc))
    except (ValueError, OSError) as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
