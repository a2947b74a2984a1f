"""Experiment harness: JSON configs in, CSV/JSON artifacts and figures out.

Subcommands:
    run <config>      any experiment kind (dispatches on the config's "kind")
    verify <config>   kind "equivalence-verify" only
    compare <config>  kind "bound-sweep" only (multi-variant comparison)
    path <config>     kind "shortest-path" only

Every experiment writes per-round CSVs, a machine-readable summary.json that
echoes its config, a plot-ready regret-trajectory table, and rendered PNG
figures, all into the configured output directory. Exit status is 0 only if
every requested check passed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .adversary import adversary_from_config
from .analytics import (
    EquivalenceReport,
    RegretReport,
    check_run_against_bounds,
    equivalence_corpus,
    verify_gumbel_hedge_equivalence,
)
from .core import RngStream, RoundRecord, records_to_csv, run_game
from .errors import ConfigurationError, DataError
from .fpl import FplForecaster, FplParams, FtlForecaster
from .hedge import HedgeForecaster, HedgeParams, rwm_forecaster
from .perturbation import PerturbationSpec, Sign
from .spath import (
    EdgeGraph,
    PathGameReport,
    edge_times_from_csv,
    ftl_killer_edge_times,
    run_online_path_game,
)

KINDS = ("expert-game", "shortest-path", "equivalence-verify", "bound-sweep")


class ConfigError(ConfigurationError):
    """Config file failed to parse or validate."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description; round-trips through to_dict/from_dict."""

    kind: str
    out_dir: str = "out"
    seeds: tuple[int, ...] = (0,)
    T: int | None = None
    samples: int = 100_000
    tol: float = 0.005
    figures: bool = True
    forecaster: dict | None = None
    adversary: dict | None = None
    variants: tuple[dict, ...] = ()
    bounds: tuple[str, ...] = ()
    graph: str | None = None
    perturbation: dict | None = None
    edge_times: dict | None = None
    beta: float | None = None
    corpus: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind, "out_dir": self.out_dir, "seeds": list(self.seeds)}
        if self.T is not None:
            d["T"] = self.T
        d["samples"] = self.samples
        d["tol"] = self.tol
        d["figures"] = self.figures
        if self.forecaster is not None:
            d["forecaster"] = self.forecaster
        if self.adversary is not None:
            d["adversary"] = self.adversary
        if self.variants:
            d["variants"] = list(self.variants)
        if self.bounds:
            d["bounds"] = list(self.bounds)
        if self.graph is not None:
            d["graph"] = self.graph
        if self.perturbation is not None:
            d["perturbation"] = self.perturbation
        if self.edge_times is not None:
            d["edge_times"] = self.edge_times
        if self.beta is not None:
            d["beta"] = self.beta
        if self.corpus:
            d["corpus"] = self.corpus
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        def require(key: str):
            if key not in d:
                raise ConfigError(f"missing required key {key!r} for kind {d.get('kind')!r}")
            return d[key]

        kind = require("kind")
        if kind not in KINDS:
            raise ConfigError(f"unknown kind {kind!r}; expected one of {KINDS}")
        seeds = tuple(int(s) for s in d.get("seeds", [0]))
        if not seeds:
            raise ConfigError("seeds must be a nonempty list")

        T = None
        if kind in ("expert-game", "shortest-path", "bound-sweep"):
            T = int(require("T"))
            if T < 1:
                raise ConfigError("T must be >= 1")

        cfg = cls(
            kind=kind,
            out_dir=str(d.get("out_dir", "out")),
            seeds=seeds,
            T=T,
            samples=int(d.get("samples", 100_000)),
            tol=float(d.get("tol", 0.005)),
            figures=bool(d.get("figures", True)),
            forecaster=require("forecaster") if kind == "expert-game" else d.get("forecaster"),
            adversary=require("adversary") if kind in ("expert-game", "bound-sweep") else d.get("adversary"),
            variants=tuple(require("variants")) if kind == "bound-sweep" else tuple(d.get("variants", [])),
            bounds=tuple(d.get("bounds", [])),
            graph=str(require("graph")) if kind == "shortest-path" else d.get("graph"),
            perturbation=require("perturbation") if kind == "shortest-path" else d.get("perturbation"),
            edge_times=require("edge_times") if kind == "shortest-path" else d.get("edge_times"),
            beta=float(require("beta")) if kind == "equivalence-verify" else d.get("beta"),
            corpus=dict(d.get("corpus", {})),
        )
        cfg.check_files()
        return cfg

    def check_files(self):
        for label, p in (
            ("adversary replay", (self.adversary or {}).get("path")),
            ("graph", self.graph),
            ("edge_times", (self.edge_times or {}).get("path")),
        ):
            if p is not None and not Path(p).exists():
                raise ConfigError(f"{label} file does not exist: {p}")

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: top level must be a JSON object")
        return cls.from_dict(raw)


def forecaster_from_config(d: dict, n: int):
    algo = d.get("algorithm")
    if algo == "hedge":
        if "beta" not in d:
            raise ConfigError("hedge forecaster needs key 'beta'")
        return HedgeForecaster(n, HedgeParams(float(d["beta"])))
    if algo == "rwm":
        if "gamma" not in d:
            raise ConfigError("rwm forecaster needs key 'gamma'")
        return rwm_forecaster(n, float(d["gamma"]))
    if algo == "ftl":
        return FtlForecaster(n)
    if algo == "fpl":
        spec = PerturbationSpec.from_dict({"sign": "subtract", **{k: d[k] for k in ("family", "scale", "location", "sign") if k in d}})
        params = FplParams(spec, fresh_noise_each_round=bool(d.get("fresh_noise", True)))
        return FplForecaster(n, params, mc_samples=int(d.get("mc_samples", 100_000)))
    raise ConfigError(f"unknown forecaster algorithm {d.get('algorithm')!r}")


def variant_label(d: dict) -> str:
    if "label" in d:
        return str(d["label"])
    algo = d.get("algorithm", "?")
    if algo == "hedge":
        return f"hedge(beta={d.get('beta')})"
    if algo == "rwm":
        return f"rwm(gamma={d.get('gamma')})"
    if algo == "fpl":
        return f"fpl({d.get('family')},scale={d.get('scale', 1.0)})"
    return str(algo)


# ---------------------------------------------------------------------------
# Experiment runners
# ---------------------------------------------------------------------------


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _summary(config: ExperimentConfig, results: dict, passed: bool) -> str:
    return json.dumps(
        {
            "tool": "hedgefpl",
            "version": __version__,
            "created_unix": time.time(),
            "config": config.to_dict(),
            "seeds": list(config.seeds),
            "passed": passed,
            "results": results,
        },
        indent=2,
    )


def _trajectory_table(trajectories: dict[str, np.ndarray]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    keys = list(trajectories)
    T = len(next(iter(trajectories.values())))
    writer.writerow(["t"] + [f"regret_{k}" for k in keys])
    for i in range(T):
        writer.writerow([i + 1] + [repr(float(trajectories[k][i])) for k in keys])
    return buf.getvalue()


def run_expert_game(config: ExperimentConfig, out_dir: Path) -> int:
    adversary = adversary_from_config(config.adversary)
    forecaster = forecaster_from_config(config.forecaster, adversary.n)
    per_seed: dict[int, RegretReport] = {}
    trajectories: dict[str, np.ndarray] = {}
    for seed in config.seeds:
        records = run_game(forecaster, adversary, config.T, RngStream(seed))
        report = check_run_against_bounds(records, forecaster, bounds=config.bounds)
        per_seed[seed] = report
        trajectories[f"seed{seed}"] = report.regret_trajectory
        _write(out_dir / f"rounds_seed{seed}.csv", records_to_csv(records))
    trajectories["mean"] = np.mean([per_seed[s].regret_trajectory for s in config.seeds], axis=0)
    _write(out_dir / "trajectory.csv", _trajectory_table(trajectories))
    passed = all(r.all_bounds_satisfied for r in per_seed.values())
    results = {
        "per_seed": {str(s): per_seed[s].to_dict() for s in config.seeds},
        "mean_regret": float(np.mean([per_seed[s].regret for s in config.seeds])),
    }
    _write(out_dir / "summary.json", _summary(config, results, passed))
    if config.figures:
        from .figures import save_regret_trajectories

        save_regret_trajectories(
            trajectories, out_dir / "regret_trajectory.png",
            title=f"{variant_label(config.forecaster)} vs {config.adversary.get('kind')}", mean_key="mean",
        )
    return 0 if passed else 1


@dataclass(frozen=True)
class ComparisonRow:
    label: str
    seed: str
    expected_cost: float
    regret: float
    bound_name: str = ""
    bound_value: float = float("nan")
    bound_satisfied: bool = True


def compare_forecasters(
    variants: Sequence[dict], adversary_cfg: dict, T: int, seeds: Sequence[int], shared_bounds: Sequence[str] = ()
) -> tuple[list[ComparisonRow], dict[str, np.ndarray], dict[tuple[str, int], list[RoundRecord]]]:
    """Run every variant on the shared adversary; one row per (variant, seed) plus a mean row.

    Bound names come from each variant's own "bounds" list merged with
    shared_bounds; requesting a bound a variant cannot satisfy the hypotheses
    of is an error, never a silent skip.
    """
    if len(variants) < 2:
        raise ConfigurationError("need at least two variants to compare")
    adversary = adversary_from_config(adversary_cfg)
    rows: list[ComparisonRow] = []
    mean_trajectories: dict[str, np.ndarray] = {}
    all_records: dict[tuple[str, int], list[RoundRecord]] = {}
    for variant in variants:
        label = variant_label(variant)
        forecaster = forecaster_from_config(variant, adversary.n)
        bounds = tuple(variant.get("bounds", ())) + tuple(shared_bounds)
        seed_rows: list[ComparisonRow] = []
        trajs = []
        for seed in seeds:
            records = run_game(forecaster, adversary, T, RngStream(seed))
            all_records[(label, seed)] = records
            report = check_run_against_bounds(records, forecaster, bounds=bounds)
            trajs.append(report.regret_trajectory)
            checks = report.bounds_checked or [None]
            for chk in checks:
                seed_rows.append(
                    ComparisonRow(
                        label=label,
                        seed=str(seed),
                        expected_cost=report.algorithm_expected_cost,
                        regret=report.regret,
                        bound_name=chk.name if chk else "",
                        bound_value=chk.value if chk else float("nan"),
                        bound_satisfied=chk.satisfied if chk else True,
                    )
                )
        rows.extend(seed_rows)
        rows.append(
            ComparisonRow(
                label=label,
                seed="mean",
                expected_cost=float(np.mean([r.expected_cost for r in seed_rows])),
                regret=float(np.mean([r.regret for r in seed_rows])),
                bound_satisfied=all(r.bound_satisfied for r in seed_rows),
            )
        )
        mean_trajectories[label] = np.mean(trajs, axis=0)
    return rows, mean_trajectories, all_records


def comparison_to_csv(rows: Sequence[ComparisonRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["variant", "seed", "expected_cost", "regret", "bound", "bound_value", "bound_satisfied"])
    for r in rows:
        writer.writerow(
            [r.label, r.seed, repr(r.expected_cost), repr(r.regret), r.bound_name, repr(r.bound_value), r.bound_satisfied]
        )
    return buf.getvalue()


def run_bound_sweep(config: ExperimentConfig, out_dir: Path) -> int:
    rows, mean_trajectories, _ = compare_forecasters(
        config.variants, config.adversary, config.T, config.seeds, config.bounds
    )
    _write(out_dir / "comparison.csv", comparison_to_csv(rows))
    _write(out_dir / "trajectory.csv", _trajectory_table(mean_trajectories))
    passed = all(r.bound_satisfied for r in rows)
    mean_rows = [r for r in rows if r.seed == "mean"]
    results = {
        "variants": [
            {"label": r.label, "mean_expected_cost": r.expected_cost, "mean_regret": r.regret,
             "all_bounds_satisfied": r.bound_satisfied}
            for r in mean_rows
        ],
    }
    _write(out_dir / "summary.json", _summary(config, results, passed))
    if config.figures:
        from .figures import save_regret_trajectories

        save_regret_trajectories(
            mean_trajectories, out_dir / "comparison.png",
            title=f"mean regret vs {config.adversary.get('kind')} ({len(config.seeds)} seeds)",
        )
    return 0 if passed else 1


def run_equivalence_verify(config: ExperimentConfig, out_dir: Path) -> int:
    corpus_cfg = config.corpus
    histories = equivalence_corpus(
        count=int(corpus_cfg.get("count", 50)),
        max_experts=int(corpus_cfg.get("max_experts", 6)),
        max_rounds=int(corpus_cfg.get("max_rounds", 4)),
        loss_total=float(corpus_cfg.get("loss_total", 10.0)),
        seed=int(corpus_cfg.get("seed", 20240801)),
    )
    report: EquivalenceReport = verify_gumbel_hedge_equivalence(
        histories, beta=config.beta, samples=config.samples, tol=config.tol, rng=RngStream(config.seeds[0])
    )
    _write(out_dir / "report.json", json.dumps(report.to_dict(), indent=2))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["case", "n", "rounds", "sampled_deviation", "exact_deviation", "passed"])
    for i, case in enumerate(report.cases):
        writer.writerow([i, case.n, case.rounds, repr(case.sampled_deviation), repr(case.exact_deviation), case.passed])
    _write(out_dir / "deviations.csv", buf.getvalue())
    results = {
        "max_sampled_deviation": report.max_sampled_deviation,
        "max_exact_deviation": report.max_exact_deviation,
        "cases": len(report.cases),
    }
    _write(out_dir / "summary.json", _summary(config, results, report.passed))
    if config.figures:
        from .figures import save_deviation_plot

        save_deviation_plot(
            [c.sampled_deviation for c in report.cases], config.tol, out_dir / "deviations.png",
            title=f"perturbed-leader vs exponential weights, beta={config.beta}, {config.samples} draws",
        )
    return 0 if report.passed else 1


def path_rounds_to_csv(report: PathGameReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    E = len(report.rounds[0].times)
    writer.writerow(["t", "path", "paid"] + [f"edge_{e}" for e in range(E)])
    for r in report.rounds:
        writer.writerow([r.t, "-".join(map(str, r.edges)), repr(r.paid)] + [repr(float(x)) for x in r.times])
    return buf.getvalue()


def _edge_time_source(cfg: dict, g: EdgeGraph, T: int, seed: int):
    kind = cfg.get("kind")
    if kind == "csv":
        times = edge_times_from_csv(Path(cfg["path"]).read_text(), g.num_edges)
        if times.shape[0] < T:
            raise DataError(f"edge-time CSV has {times.shape[0]} rounds, need {T}")
        return times
    if kind == "ftl-killer":
        return ftl_killer_edge_times(g)
    if kind == "uniform":
        low, high = float(cfg.get("low", 0.0)), float(cfg.get("high", 1.0))
        if not (0 <= low <= high):
            raise ConfigError("uniform edge times need 0 <= low <= high")
        gen = RngStream(seed).child(0xE).generator()
        return low + (high - low) * gen.random((T, g.num_edges))
    raise ConfigError(f"unknown edge_times kind {kind!r}")


def run_shortest_path(config: ExperimentConfig, out_dir: Path) -> int:
    g = EdgeGraph.from_file(config.graph)
    spec = PerturbationSpec.from_dict({"sign": Sign.ADD.value, **config.perturbation})
    per_seed: dict[int, PathGameReport] = {}
    trajectories: dict[str, np.ndarray] = {}
    for seed in config.seeds:
        source = _edge_time_source(config.edge_times, g, config.T, seed)
        report = run_online_path_game(g, spec, source, config.T, RngStream(seed))
        per_seed[seed] = report
        trajectories[f"seed{seed}"] = report.regret_trajectory
        _write(out_dir / f"rounds_seed{seed}.csv", path_rounds_to_csv(report))
    trajectories["mean"] = np.mean([per_seed[s].regret_trajectory for s in config.seeds], axis=0)
    _write(out_dir / "trajectory.csv", _trajectory_table(trajectories))
    results = {
        "per_seed": {str(s): per_seed[s].to_dict() for s in config.seeds},
        "mean_regret": float(np.mean([per_seed[s].regret for s in config.seeds])),
    }
    _write(out_dir / "summary.json", _summary(config, results, True))
    if config.figures:
        from .figures import save_regret_trajectories

        save_regret_trajectories(
            trajectories, out_dir / "regret_trajectory.png",
            title=f"online path game on {config.graph}", mean_key="mean",
        )
    return 0


def run_experiment(config: ExperimentConfig) -> int:
    """Dispatch on config.kind; writes artifacts and returns the exit status."""
    out_dir = Path(config.out_dir)
    runner = {
        "expert-game": run_expert_game,
        "bound-sweep": run_bound_sweep,
        "equivalence-verify": run_equivalence_verify,
        "shortest-path": run_shortest_path,
    }[config.kind]
    return runner(config, out_dir)


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _apply_overrides(config: ExperimentConfig, args) -> ExperimentConfig:
    d = config.to_dict()
    if args.seed_override:
        d["seeds"] = list(args.seed_override)
    if args.out_dir:
        d["out_dir"] = args.out_dir
    if args.samples:
        d["samples"] = args.samples
    if args.no_figures:
        d["figures"] = False
    return ExperimentConfig.from_dict(d)


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="hedgefpl", description=__doc__)
    parser.add_argument("--version", action="version", version=f"hedgefpl {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    expected_kind = {"run": None, "verify": "equivalence-verify", "compare": "bound-sweep", "path": "shortest-path"}
    for name in expected_kind:
        p = sub.add_parser(name)
        p.add_argument("config", help="path to a JSON experiment config")
        p.add_argument("--seed-override", type=int, nargs="+", default=None, help="replace the config's seed list")
        p.add_argument("--out-dir", default=None, help="replace the config's output directory")
        p.add_argument("--samples", type=int, default=None, help="replace the Monte Carlo sample count")
        p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")

    args = parser.parse_args(argv)
    try:
        config = ExperimentConfig.load(args.config)
        want = expected_kind[args.command]
        if want is not None and config.kind != want:
            raise ConfigError(f"subcommand {args.command!r} expects kind {want!r}, config has {config.kind!r}")
        config = _apply_overrides(config, args)
        status = run_experiment(config)
    except (ConfigurationError, DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"[hedgefpl] {config.kind}: {'PASS' if status == 0 else 'FAIL'} (artifacts in {config.out_dir}/)")
    return status


if __name__ == "__main__":
    sys.exit(main())
