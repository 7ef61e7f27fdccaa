"""Command-line entry point.

    cuavplan scenario gen   --n 100 --seed 7 --out net.json
    cuavplan solve csop     --case 1 --seed 0 --out plan.json
    cuavplan solve ctop     --plan plan.json --tour psod2p --seed 0 --out tour.json
    cuavplan experiment run --case 1 --seed 0 --reps 30 --out results/
    cuavplan report stats   --runs results/runs.csv

Exit status: 0 on success, 2 on a configuration error, 3 on an I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import baselines, harness, psofkp
from . import scenario as scenario_mod
from .errors import CuavPlanError, ScenarioFormatError
from .objective import HoverPlan, evaluate_coverage, f_csop, tour_length

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3

log = logging.getLogger("cuavplan")


def _add_scenario_source(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--case", type=int, choices=sorted(scenario_mod.PRESETS), help="preset scenario")
    g.add_argument("--scenario", type=Path, help="scenario JSON file")


def _scenario_src(args) -> dict:
    if args.case is not None:
        return {"preset": args.case}
    return {"file": str(args.scenario)}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cuavplan", description="Charging-UAV hover point and tour planning.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="group", required=True)

    # scenario
    sc = sub.add_parser("scenario", help="scenario files").add_subparsers(dest="verb", required=True)
    gen = sc.add_parser("gen", help="generate a random sensor layout")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--width", type=float, default=scenario_mod.PRESET_REGION[0])
    gen.add_argument("--height", type=float, default=scenario_mod.PRESET_REGION[1])
    gen.add_argument("--altitude", type=float, default=scenario_mod.PRESET_ALTITUDE)
    gen.add_argument("--dmax", type=float, default=scenario_mod.PRESET_D_MAX)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", type=Path, required=True)

    # solve
    sv = sub.add_parser("solve", help="solve one problem instance").add_subparsers(dest="verb", required=True)
    cs = sv.add_parser("csop", help="choose hover points")
    _add_scenario_source(cs)
    cs.add_argument("--solver", choices=harness.CSOP_SOLVERS, default="psofkp")
    cs.add_argument("--seed", type=int, default=0)
    cs.add_argument("--population", type=int)
    cs.add_argument("--iters", type=int)
    cs.add_argument("--k", type=int, help="hover count for --solver random (default: smallest feasible)")
    cs.add_argument("--count", type=int, default=baselines.UNIFORM_GRID_COUNT, help="grid size for --solver uniform")
    cs.add_argument("--out", type=Path, required=True)
    cs.add_argument("--trace", type=Path, help="write the per-iteration convergence CSV here")

    ct = sv.add_parser("ctop", help="order the hover points of a plan")
    ct.add_argument("--plan", type=Path, required=True)
    ct.add_argument("--tour", choices=harness.TOUR_SOLVERS, default="psod2p")
    ct.add_argument("--config", type=Path, help="config file supplying [psod2p]/[sa] parameters")
    ct.add_argument("--seed", type=int, default=0)
    ct.add_argument("--population", type=int)
    ct.add_argument("--iters", type=int)
    ct.add_argument("--out", type=Path, required=True)

    # experiment
    ex = sub.add_parser("experiment", help="repeated seeded runs").add_subparsers(dest="verb", required=True)
    run = ex.add_parser("run", help="run an experiment and write CSV/plot outputs")
    run.add_argument("--config", type=Path)
    _add_scenario_source(run, required=False)
    run.add_argument("--seed", type=int, required=True, help="base seed; repetition r uses seed + r")
    run.add_argument("--reps", type=int, required=True)
    run.add_argument("--out", type=Path, required=True)
    run.add_argument("--solver", choices=harness.CSOP_SOLVERS)
    run.add_argument("--tour", choices=harness.TOUR_SOLVERS, action="append", help="repeatable; first one drives the energy report")
    run.add_argument("--iters", type=int, help="iteration budget for both swarm solvers")
    run.add_argument("--population", type=int, help="swarm size for both swarm solvers")
    run.add_argument("--jobs", type=int, default=1)

    # report
    rp = sub.add_parser("report", help="post-process results").add_subparsers(dest="verb", required=True)
    st = rp.add_parser("stats", help="recompute the summary table from runs.csv")
    st.add_argument("--runs", type=Path, required=True)
    st.add_argument("--out", type=Path, help="also write the summary CSV here")
    return ap


def _override(params, **kw):
    kw = {k: v for k, v in kw.items() if v is not None}
    return replace(params, **kw) if kw else params


def _write_json(path: Path, doc) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=1) + "\n")


def cmd_scenario_gen(args) -> int:
    sc = scenario_mod.generate_random(args.n, (args.width, args.height), args.altitude, args.dmax, args.seed)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    scenario_mod.save(sc, args.out)
    print(f"wrote {sc.n} nodes to {args.out}")
    return EXIT_OK


def cmd_solve_csop(args) -> int:
    sc = harness.resolve_scenario(_scenario_src(args))
    trace = None
    if args.solver == "psofkp":
        params = _override(psofkp.PsofkpParams(), population=args.population, iters=args.iters)
        plan, _, trace = psofkp.run(sc, params, args.seed)
    elif args.solver == "uniform":
        plan = baselines.uniform_grid(sc, args.count)
    else:
        k = args.k if args.k is not None else baselines.min_feasible_random_k(sc, args.seed)
        plan = baselines.random_schedule(sc, k, args.seed)
    cov = evaluate_coverage(plan, sc)
    value = f_csop(plan, sc)
    doc = {"solver": args.solver, "seed": args.seed, "feasible": cov.feasible, "s_rc": cov.s_rc,
           "value": value.value, **plan.to_dict()}
    _write_json(args.out, doc)
    if args.trace and trace:
        harness.write_csv(args.trace, ["iter", "best_value", "best_k", "feasible"],
                           [(t.iteration, t.best_value, t.best_k, t.feasible) for t in trace])
    print(f"k={plan.k} s_rc={cov.s_rc} feasible={cov.feasible} -> {args.out}")
    return EXIT_OK


def _load_plan(path: Path) -> HoverPlan:
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict) or "points" not in doc:
        raise ScenarioFormatError(f"{path}: expected an object with a 'points' list")
    return HoverPlan(doc["points"])


def cmd_solve_ctop(args) -> int:
    plan = _load_plan(args.plan)
    cfg = harness.load_config(args.config) if args.config else harness.ExperimentConfig()
    cfg = replace(cfg, psod2p=_override(cfg.psod2p, population=args.population, iters=args.iters))
    tour, _ = harness.solve_tour(args.tour, plan.array, cfg, args.seed)
    length = tour_length(tour.order, plan.array)
    _write_json(args.out, {"solver": args.tour, "seed": args.seed, "order": list(tour.order), "length": length})
    print(f"length={length:.2f} m -> {args.out}")
    return EXIT_OK


def cmd_experiment_run(args) -> int:
    cfg = harness.load_config(args.config) if args.config else harness.ExperimentConfig()
    changes: dict = {"repetitions": args.reps, "base_seed": args.seed, "out": str(args.out)}
    if args.case is not None or args.scenario is not None:
        changes["scenario"] = _scenario_src(args)
    if args.solver:
        changes["csop_solver"] = args.solver
    if args.tour:
        changes["tour_solvers"] = tuple(args.tour)
    changes["psofkp"] = _override(cfg.psofkp, population=args.population, iters=args.iters)
    changes["psod2p"] = _override(cfg.psod2p, population=args.population, iters=args.iters)
    cfg = replace(cfg, **changes)

    def progress(rec):
        lengths = " ".join(f"{k}={v:.1f}" for k, v in rec.tour_lengths.items())
        log.info("rep %d seed %d: k=%d s_rc=%d feasible=%s %s (%.1fs)",
                 rec.rep, rec.seed, rec.k, rec.s_rc, rec.feasible, lengths, rec.wall_time)

    records, summary = harness.run_experiment(cfg, jobs=args.jobs, progress=progress)
    harness.write_outputs(cfg, records, summary, args.out)
    print(harness.format_summary(summary))
    print(f"results written to {args.out}")
    return EXIT_OK


def cmd_report_stats(args) -> int:
    summary = harness.summary_from_csv(args.runs)
    print(harness.format_summary(summary))
    if args.out:
        harness.emit_summary(summary, args.out)
    return EXIT_OK


COMMANDS = {
    ("scenario", "gen"): cmd_scenario_gen,
    ("solve", "csop"): cmd_solve_csop,
    ("solve", "ctop"): cmd_solve_ctop,
    ("experiment", "run"): cmd_experiment_run,
    ("report", "stats"): cmd_report_stats,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[(args.group, args.verb)](args)
    except CuavPlanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
