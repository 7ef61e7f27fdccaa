"""Experiment orchestration: repeated seeded runs, statistics and result files.

A config file is a JSON object with optional sections::

    {
      "scenario":   {"preset": 1} | {"file": "net.json"} | {"generate": {"n": 100, "seed": 7, ...}},
      "psofkp":     {"population": 20, "iters": 200, "c1": 2, "c2": 2, "w": 0.73, "rho_pc": 0.5, "kt": 20, "seed": 0},
      "psod2p":     {"population": 20, "iters": 200, "c1": 0.8, "c2": 0.8, "w": 1, "local_search_period": 20},
      "sa":         {"t0": 500, "moves_per_temp": 200, "cooling": 0.98, "levels": 200, "chains": 20},
      "energy":     {"charge_time": 60, "hover_mode": "per_stop", "propulsion": {...}, "charging": {...}},
      "experiment": {"repetitions": 30, "base_seed": 0, "csop_solver": "psofkp",
                     "tour_solvers": ["psod2p"], "random_k": null, "uniform_count": 1301}
    }

Repetition ``r`` uses seed ``base_seed + r``. Each run solves the hover-point
problem, then every requested tour solver on the resulting hover set, then
an energy report for the first tour solver.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import baselines, psod2p, psofkp
from . import scenario as scenario_mod
from .energy import ChargingParams, PropulsionParams, charging_efficiency, mission_energy
from .errors import ConfigError
from .geometry import slant_distances
from .objective import HoverPlan, Tour, evaluate_coverage, f_csop, tour_length

CSOP_SOLVERS = ("psofkp", "uniform", "random")
TOUR_SOLVERS = ("psod2p", "nn", "sa", "brute")


@dataclass(frozen=True)
class EnergySettings:
    charge_time: float = 60.0  # s of charging per hover stop (or per node)
    hover_mode: str = "per_stop"
    propulsion: PropulsionParams = PropulsionParams()
    charging: ChargingParams = ChargingParams()


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: dict = field(default_factory=lambda: {"preset": 1})
    csop_solver: str = "psofkp"
    tour_solvers: tuple[str, ...] = ("psod2p",)
    psofkp: psofkp.PsofkpParams = psofkp.PsofkpParams()
    psod2p: psod2p.Psod2pParams = psod2p.Psod2pParams()
    sa: baselines.SAParams = baselines.SAParams()
    energy: EnergySettings = EnergySettings()
    repetitions: int = 30
    base_seed: int = 0
    random_k: int | None = None
    uniform_count: int = baselines.UNIFORM_GRID_COUNT
    out: str | None = None
    # optional per-solver base seeds ("psofkp", "psod2p", "sa"); default base_seed
    solver_seeds: dict = field(default_factory=dict)

    def seed_for(self, solver: str, rep: int) -> int:
        return self.solver_seeds.get(solver, self.base_seed) + rep

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if self.csop_solver not in CSOP_SOLVERS:
            raise ConfigError(f"unknown CSOP solver {self.csop_solver!r}; choose from {CSOP_SOLVERS}")
        object.__setattr__(self, "tour_solvers", tuple(self.tour_solvers))
        if not self.tour_solvers:
            raise ConfigError("at least one tour solver is required")
        for t in self.tour_solvers:
            if t not in TOUR_SOLVERS:
                raise ConfigError(f"unknown tour solver {t!r}; choose from {TOUR_SOLVERS}")
        if len(set(self.tour_solvers)) != len(self.tour_solvers):
            raise ConfigError("tour solvers must be distinct")
        if self.energy.hover_mode not in ("per_stop", "per_node"):
            raise ConfigError(f"unknown hover_mode {self.energy.hover_mode!r}")
        _scenario_source(self.scenario)

    def _section_doc(self, name: str, params) -> dict[str, Any]:
        doc = asdict(params)
        if name in self.solver_seeds:
            doc["seed"] = self.solver_seeds[name]
        return doc

    def to_dict(self) -> dict[str, Any]:
        return {
            "scenario": dict(self.scenario),
            "psofkp": self._section_doc("psofkp", self.psofkp),
            "psod2p": self._section_doc("psod2p", self.psod2p),
            "sa": self._section_doc("sa", self.sa),
            "energy": {
                "charge_time": self.energy.charge_time,
                "hover_mode": self.energy.hover_mode,
                "propulsion": asdict(self.energy.propulsion),
                "charging": asdict(self.energy.charging),
            },
            "experiment": {
                "repetitions": self.repetitions,
                "base_seed": self.base_seed,
                "csop_solver": self.csop_solver,
                "tour_solvers": list(self.tour_solvers),
                "random_k": self.random_k,
                "uniform_count": self.uniform_count,
            },
        }


def _section(cls, doc: Any, name: str):
    if doc is None:
        return cls()
    if not isinstance(doc, dict):
        raise ConfigError(f"section [{name}] must be an object")
    known = {f.name for f in fields(cls)}
    unknown = set(doc) - known - {"seed"}
    if unknown:
        raise ConfigError(f"section [{name}]: unknown keys {sorted(unknown)}")
    kwargs = dict(doc)
    kwargs.pop("seed", None)
    if "weights" in kwargs:
        kwargs["weights"] = tuple(kwargs["weights"])
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"section [{name}]: {exc}") from exc


def config_from_dict(doc: dict[str, Any]) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - {"scenario", "psofkp", "psod2p", "sa", "energy", "experiment"}
    if unknown:
        raise ConfigError(f"unknown config sections {sorted(unknown)}")
    energy_doc = dict(doc.get("energy") or {})
    prop = PropulsionParams.from_dict(energy_doc.pop("propulsion", {}) or {})
    charging = _section(ChargingParams, energy_doc.pop("charging", None), "energy.charging")
    energy = _section(EnergySettings, energy_doc, "energy")
    energy = replace(energy, propulsion=prop, charging=charging)
    exp = dict(doc.get("experiment") or {})
    allowed = {"repetitions", "base_seed", "csop_solver", "tour_solvers", "random_k", "uniform_count", "out"}
    if set(exp) - allowed:
        raise ConfigError(f"section [experiment]: unknown keys {sorted(set(exp) - allowed)}")
    seeds = {}
    for name in ("psofkp", "psod2p", "sa"):
        sec = doc.get(name)
        if isinstance(sec, dict) and "seed" in sec:
            if not isinstance(sec["seed"], int):
                raise ConfigError(f"section [{name}]: seed must be an integer")
            seeds[name] = sec["seed"]
    return ExperimentConfig(
        scenario=doc.get("scenario") or {"preset": 1},
        solver_seeds=seeds,
        psofkp=_section(psofkp.PsofkpParams, doc.get("psofkp"), "psofkp"),
        psod2p=_section(psod2p.Psod2pParams, doc.get("psod2p"), "psod2p"),
        sa=_section(baselines.SAParams, doc.get("sa"), "sa"),
        energy=energy,
        **exp,
    )


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return config_from_dict(doc)


def _scenario_source(src: dict) -> None:
    if not isinstance(src, dict) or len(src) != 1 or next(iter(src)) not in ("preset", "file", "generate"):
        raise ConfigError("scenario section needs exactly one of 'preset', 'file' or 'generate'")
    if "file" in src and not Path(src["file"]).exists():
        raise ConfigError(f"scenario file {src['file']!r} does not exist")


def resolve_scenario(src: dict) -> scenario_mod.Scenario:
    _scenario_source(src)
    if "preset" in src:
        return scenario_mod.preset(src["preset"])
    if "file" in src:
        return scenario_mod.load(src["file"])
    gen = dict(src["generate"])
    if "region" in gen:
        gen["region"] = tuple(gen["region"])
    try:
        return scenario_mod.generate_random(**gen)
    except TypeError as exc:
        raise ConfigError(f"scenario.generate: {exc}") from exc


# ---------------------------------------------------------------------------
# Runs


@dataclass
class RunRecord:
    rep: int
    seed: int
    wall_time: float
    k: int
    s_rc: int
    feasible: bool
    csop_value: float
    tour_lengths: dict[str, float]
    energy: dict[str, float]
    eta_mean: float
    csop_trace: list[psofkp.TraceRow] | None = None
    tour_traces: dict[str, list[float]] = field(default_factory=dict)
    plan: HoverPlan | None = None
    tours: dict[str, Tour] = field(default_factory=dict)

    def metrics(self) -> dict[str, float]:
        out = {
            "k": float(self.k),
            "s_rc": float(self.s_rc),
            "feasible": 1.0 if self.feasible else 0.0,
            "csop_value": float(self.csop_value),
        }
        for name, length in self.tour_lengths.items():
            out[f"length_{name}"] = length
        out.update({name: float(v) for name, v in self.energy.items()})
        out["eta_mean"] = self.eta_mean
        return out


@dataclass(frozen=True)
class StatsSummary:
    mean: float
    std: float
    max: float
    min: float
    count: int


def summarize(values: Sequence[float]) -> StatsSummary:
    """Mean, sample std (divisor N-1; 0 for a single value), max and min."""
    arr = np.asarray(values, dtype=float)
    if len(arr) == 0:
        raise ConfigError("cannot summarise an empty series")
    std = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
    return StatsSummary(float(arr.mean()), std, float(arr.max()), float(arr.min()), len(arr))


def summarize_records(records: Sequence[RunRecord]) -> dict[str, StatsSummary]:
    if not records:
        raise ConfigError("no run records")
    names = list(records[0].metrics())
    return {m: summarize([r.metrics()[m] for r in records]) for m in names}


def _mean_eta(plan: HoverPlan, sc, charging: ChargingParams) -> float:
    # efficiency of each node at its nearest hover point
    d = slant_distances(plan.array, sc.xy, sc.altitude_h).min(axis=0)
    return float(np.mean([charging_efficiency(float(x), charging) for x in d]))


def _solve_csop(cfg: ExperimentConfig, sc, seed: int):
    if cfg.csop_solver == "psofkp":
        plan, value, trace = psofkp.run(sc, cfg.psofkp, seed)
        return plan, trace
    if cfg.csop_solver == "uniform":
        return baselines.uniform_grid(sc, cfg.uniform_count), None
    k = cfg.random_k if cfg.random_k is not None else sc.n
    return baselines.random_schedule(sc, k, seed), None


def solve_tour(name: str, points: np.ndarray, cfg: ExperimentConfig, seed: int) -> tuple[Tour, list[float]]:
    if len(points) == 1:
        return Tour((0,)), []
    if name == "psod2p":
        tour, _, trace = psod2p.run(points, cfg.psod2p, seed)
        return tour, trace
    if name == "nn":
        return baselines.nearest_neighbor_tour(points), []
    if name == "sa":
        return baselines.sim_anneal_tour(points, cfg.sa, seed)
    if name == "brute":
        tour, _ = baselines.brute_tsp(points)
        return tour, []
    raise ConfigError(f"unknown tour solver {name!r}")


def run_single(cfg: ExperimentConfig, rep: int, sc=None) -> RunRecord:
    """One repetition; reproducible in isolation from ``(cfg, rep)``."""
    sc = sc if sc is not None else resolve_scenario(cfg.scenario)
    seed = cfg.base_seed + rep
    t0 = time.perf_counter()
    plan, csop_trace = _solve_csop(cfg, sc, cfg.seed_for("psofkp", rep))
    cov = evaluate_coverage(plan, sc)
    value = f_csop(plan, sc, cfg.psofkp.weights)

    lengths: dict[str, float] = {}
    traces: dict[str, list[float]] = {}
    tours: dict[str, Tour] = {}
    for name in cfg.tour_solvers:
        tour, trace = solve_tour(name, plan.array, cfg, cfg.seed_for(name, rep))
        tours[name] = tour
        lengths[name] = tour_length(tour.order, plan.array)
        traces[name] = trace

    primary = tours[cfg.tour_solvers[0]]
    en = mission_energy(
        plan, primary, cfg.energy.charge_time, cfg.energy.propulsion,
        hover_mode=cfg.energy.hover_mode, n_nodes=sc.n,
    )
    energy = {k: v for k, v in en.as_dict().items() if k != "hover_mode"}
    wall = time.perf_counter() - t0
    return RunRecord(
        rep=rep, seed=seed, wall_time=wall, k=plan.k, s_rc=cov.s_rc, feasible=cov.feasible,
        csop_value=value.value, tour_lengths=lengths, energy=energy,
        eta_mean=_mean_eta(plan, sc, cfg.energy.charging), csop_trace=csop_trace,
        tour_traces=traces, plan=plan, tours=tours,
    )


def _run_rep(args):
    cfg, rep = args
    return run_single(cfg, rep)


def run_experiment(cfg: ExperimentConfig, jobs: int = 1, progress=None) -> tuple[list[RunRecord], dict[str, StatsSummary]]:
    """All repetitions, ordered by repetition index, plus their summary."""
    sc = resolve_scenario(cfg.scenario)
    reps = range(cfg.repetitions)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_rep, [(cfg, r) for r in reps]))
    else:
        records = []
        for r in reps:
            records.append(run_single(cfg, r, sc))
            if progress:
                progress(records[-1])
    return records, summarize_records(records)


# ---------------------------------------------------------------------------
# Output


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for row in rows:
            wr.writerow([_fmt(v) for v in row])


RUN_FIXED_COLUMNS = ("rep", "seed")


def emit_csv(records: Sequence[RunRecord], path: str | Path) -> None:
    """One row per repetition: seed plus every metric (no wall time, so output is reproducible)."""
    if not records:
        raise ConfigError("no run records to write")
    names = list(records[0].metrics())
    rows = ([r.rep, r.seed, *[r.metrics()[m] for m in names]] for r in records)
    write_csv(Path(path), [*RUN_FIXED_COLUMNS, *names], rows)


def emit_summary(summary: dict[str, StatsSummary], path: str | Path) -> None:
    rows = ([m, s.mean, s.std, s.max, s.min, s.count] for m, s in summary.items())
    write_csv(Path(path), ["metric", "mean", "std", "max", "min", "count"], rows)


def read_runs_csv(path: str | Path) -> dict[str, list[float]]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ConfigError(f"{path}: no data rows")
    metrics = [c for c in rows[0] if c not in RUN_FIXED_COLUMNS]
    return {m: [float(r[m]) for r in rows] for m in metrics}


def summary_from_csv(path: str | Path) -> dict[str, StatsSummary]:
    return {m: summarize(v) for m, v in read_runs_csv(path).items()}


def emit_traces(records: Sequence[RunRecord], out_dir: Path) -> list[Path]:
    written = []
    csop_rows = [
        (r.rep, t.iteration, t.best_value, t.best_k, t.feasible)
        for r in records if r.csop_trace for t in r.csop_trace
    ]
    if csop_rows:
        p = out_dir / "convergence_csop.csv"
        write_csv(p, ["rep", "iter", "best_value", "best_k", "feasible"], csop_rows)
        written.append(p)
    ctop_rows = [
        (r.rep, name, i + 1, v)
        for r in records for name, tr in r.tour_traces.items() for i, v in enumerate(tr)
    ]
    if ctop_rows:
        p = out_dir / "convergence_ctop.csv"
        write_csv(p, ["rep", "solver", "iter", "best_length"], ctop_rows)
        written.append(p)
    return written


def mean_series(records: Sequence[RunRecord]) -> dict[str, list[tuple[int, float]]]:
    """Per-algorithm convergence series averaged over repetitions."""
    series: dict[str, list[tuple[int, float]]] = {}
    csop = [[t.best_value for t in r.csop_trace] for r in records if r.csop_trace]
    if csop and all(len(c) == len(csop[0]) for c in csop):
        series["psofkp"] = [(i + 1, float(v)) for i, v in enumerate(np.mean(csop, axis=0))]
    for name in records[0].tour_traces:
        trs = [r.tour_traces[name] for r in records if r.tour_traces.get(name)]
        if trs and all(len(t) == len(trs[0]) for t in trs):
            series[name] = [(i + 1, float(v)) for i, v in enumerate(np.mean(trs, axis=0))]
    return series


def emit_plotdata(records: Sequence[RunRecord], path: str | Path, svg_path: str | Path | None = None) -> None:
    """Long-format ``algorithm,iter,value`` convergence data, plus an optional SVG chart."""
    if not records:
        raise ConfigError("no run records to plot")
    series = mean_series(records)
    rows = ((name, it, v) for name, pts in series.items() for it, v in pts)
    write_csv(Path(path), ["algorithm", "iter", "value"], rows)
    if svg_path is not None:
        _svg_chart(series, Path(svg_path))


def _svg_chart(series: dict[str, list[tuple[int, float]]], path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    names = list(series)
    # fixed salt keeps the generated element ids, and so the file, reproducible
    matplotlib.rcParams["svg.hashsalt"] = "cuavplan"
    fig, axes = plt.subplots(1, max(1, len(names)), figsize=(4.5 * max(1, len(names)), 3.5), squeeze=False)
    for ax, name in zip(axes[0], names):
        its, vals = zip(*series[name]) if series[name] else ((), ())
        ax.plot(its, vals, lw=1.5)
        ax.set_title(name)
        ax.set_xlabel("iteration")
        ax.set_ylabel("mean best value")
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def write_outputs(cfg: ExperimentConfig, records: Sequence[RunRecord], summary: dict[str, StatsSummary], out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [out / "runs.csv", out / "summary.csv", out / "plotdata.csv", out / "convergence.svg"]
    emit_csv(records, written[0])
    emit_summary(summary, written[1])
    emit_plotdata(records, written[2], written[3])
    written += emit_traces(records, out)
    (out / "config.json").write_text(json.dumps(cfg.to_dict(), indent=2) + "\n")
    # wall time is hardware dependent; kept out of the CSVs so they stay reproducible
    timings = {"wall_time_s": [r.wall_time for r in records]}
    (out / "timings.json").write_text(json.dumps(timings, indent=2) + "\n")
    written += [out / "config.json", out / "timings.json"]
    return written


def format_summary(summary: dict[str, StatsSummary]) -> str:
    lines = [f"{'metric':<16}{'mean':>14}{'std':>12}{'max':>14}{'min':>14}"]
    for m, s in summary.items():
        lines.append(f"{m:<16}{s.mean:>14.6g}{s.std:>12.6g}{s.max:>14.6g}{s.min:>14.6g}")
    return "\n".join(lines)
