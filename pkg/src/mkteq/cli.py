"""Config-driven command line for theory curves, exact games, dynamics sweeps.

Subcommands: ``theory``, ``exact``, ``dynamics``, ``bayes-risk``,
``gen-data``. Every run is reproducible: values resolve as
defaults < ``--config`` JSON < explicit flags, seeds derive deterministically
from the master seed, and output rows are sorted before writing so the same
config and seed always produce byte-identical CSV.

CSV output is UTF-8 with a header row, ``.`` decimal separator and floats
formatted to 12 significant digits. Grid flags accept either a comma list
(``0.1,0.2,0.3``) or an inclusive range (``0.1:0.5:0.1``).
"""

from __future__ import annotations

import argparse
import copy
import json
import os
import sys
from typing import List

import numpy as np

from .closed_form import theory_curve
from .dynamics import DynamicsConfig, SCHEDULE_NAME
from .errors import ReprFormatError
from .repr_io import write_repr
from .svg import Series, line_chart
from .sweeps import (
    SweepSource,
    regime_from,
    run_bayes_sweep,
    run_dynamics_sweep,
    run_exact_sweep,
)
from .synth import GaussianMixtureSpec, LabelNoiseSpec, NestedFeaturesSpec, generate

THREADS_ENV = "MKTEQ_THREADS"

DEFAULTS = {
    "axis": None,
    "grid": None,
    "repr_file": None,
    "kind": None,
    "alpha": 0.2,
    "mu": 1.0,
    "sigma": 1.0,
    "prior_y1": 0.4,
    "nested_sigma": 1.0,
    "dim": 4,
    "m": 3,
    "c": 0.3,
    "w_min": None,
    "n_points": 10_000,
    "n_samples": 100_000,
    "trials": 10,
    "seed": 0,
    "threads": None,
    "out_csv": None,
    "out_svg": None,
    "out_repr": None,
    "dynamics": {
        "tau": 0.1,
        "init_sigma": 0.1,
        "reinit_threshold": 0.3,
        "inner_iterations": 5000,
        "learning_rate": 0.1,
        "stop_epsilon": 0.01,
        "max_stages": 200,
    },
    "bayes": {
        "iterations": 10_000,
        "learning_rate": 1.0,
        "tau": 0.1,
    },
}

# Default sweep grids bracket the known discontinuities (1/m, w_min).
DEFAULT_GRIDS = {
    "alpha": [round(0.02 * k, 12) for k in range(1, 25)],
    "noise": [round(0.3 * k, 12) for k in range(1, 9)],
    "dimension": [0, 1, 2, 3, 4],
}


class ConfigError(ValueError):
    pass


def parse_grid(text: str) -> List[float]:
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"range grid must be start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ConfigError("grid step must be positive")
        count = int(round((stop - start) / step)) + 1
        values = [round(start + k * step, 12) for k in range(count)]
        return [v for v in values if v <= stop + 1e-12]
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse grid {text!r}") from None


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        if any(ch in value for ch in ',"\n'):
            return '"' + value.replace('"', '""') + '"'
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def write_csv(path, header: List[str], rows: List[List]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def _load_config_file(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return data


def resolve_config(args: argparse.Namespace) -> dict:
    """defaults < config file < flags, with light schema checking."""
    cfg = copy.deepcopy(DEFAULTS)
    explicit = set()
    if getattr(args, "config", None):
        file_cfg = _load_config_file(args.config)
        for key, value in file_cfg.items():
            if key == "mode":
                continue
            if key not in cfg:
                raise ConfigError(f"unknown config key {key!r}")
            if isinstance(cfg[key], dict) and isinstance(value, dict):
                for sub, subval in value.items():
                    if sub not in cfg[key]:
                        raise ConfigError(f"unknown config key {key}.{sub!r}")
                    cfg[key][sub] = subval
            else:
                cfg[key] = value
            explicit.add(key)

    for axis, flag in (("alpha", "alpha_grid"), ("noise", "sigma_grid"), ("dimension", "dim_grid")):
        text = getattr(args, flag, None)
        if text is not None:
            cfg["axis"] = axis
            cfg["grid"] = parse_grid(text)
    if getattr(args, "repr_file", None) is not None:
        cfg["repr_file"] = args.repr_file
        cfg["axis"] = "repr"
        cfg["grid"] = [0.0]
    flag_map = {
        "seed": "seed",
        "trials": "trials",
        "threads": "threads",
        "m": "m",
        "c": "c",
        "w_min": "w_min",
        "n_points": "n_points",
        "n_samples": "n_samples",
        "out_csv": "out_csv",
        "out_svg": "out_svg",
        "out_repr": "out_repr",
        "kind": "kind",
        "alpha": "alpha",
        "mu": "mu",
        "sigma": "sigma",
        "prior_y1": "prior_y1",
        "nested_sigma": "nested_sigma",
        "dim": "dim",
    }
    for attr, key in flag_map.items():
        value = getattr(args, attr, None)
        if value is not None:
            cfg[key] = value
            explicit.add(key)
    dyn_map = {
        "tau": "tau",
        "init_sigma": "init_sigma",
        "reinit_threshold": "reinit_threshold",
        "inner_iterations": "inner_iterations",
        "learning_rate": "learning_rate",
        "stop_epsilon": "stop_epsilon",
        "max_stages": "max_stages",
    }
    for attr, key in dyn_map.items():
        value = getattr(args, attr, None)
        if value is not None:
            cfg["dynamics"][key] = value
    for attr, key in (("bayes_iterations", "iterations"), ("bayes_learning_rate", "learning_rate")):
        value = getattr(args, attr, None)
        if value is not None:
            cfg["bayes"][key] = value

    if cfg["axis"] == "repr" and cfg["repr_file"]:
        cfg["grid"] = [0.0]
    if cfg["grid"] is None and cfg["axis"] in DEFAULT_GRIDS:
        cfg["grid"] = list(DEFAULT_GRIDS[cfg["axis"]])
    if cfg["threads"] is None:
        cfg["threads"] = int(os.environ.get(THREADS_ENV, 0)) or (os.cpu_count() or 1)
    lr = cfg["dynamics"]["learning_rate"]
    if isinstance(lr, str) and lr != SCHEDULE_NAME:
        try:
            cfg["dynamics"]["learning_rate"] = float(lr)
        except ValueError:
            raise ConfigError(
                f"learning_rate must be a number or {SCHEDULE_NAME!r}, got {lr!r}"
            ) from None
    cfg["_explicit"] = explicit
    return cfg


def _market_m(cfg: dict) -> int:
    """Provider count, reconciled with a two-provider w_min request."""
    if cfg["w_min"] is None:
        return int(cfg["m"])
    if "m" in cfg["_explicit"] and int(cfg["m"]) != 2:
        raise ConfigError("w_min selects the two-provider regime; m must be 2 or omitted")
    return 2


def _require(cfg: dict, *keys) -> None:
    for key in keys:
        value = cfg.get(key)
        if value is None or (key == "grid" and len(value) == 0):
            raise ConfigError(f"missing required setting {key!r}")


def _source(cfg: dict) -> SweepSource:
    _require(cfg, "axis", "grid")
    return SweepSource(
        axis=cfg["axis"],
        grid=tuple(cfg["grid"]),
        n_points=int(cfg["n_points"]),
        mixture=GaussianMixtureSpec(mu=(cfg["mu"],), sigma=cfg["sigma"], prior_y1=cfg["prior_y1"]),
        nested_sigma=cfg["nested_sigma"],
        repr_path=cfg["repr_file"],
    )


def cmd_theory(cfg: dict) -> int:
    _require(cfg, "axis", "grid", "out_csv")
    if cfg["axis"] == "repr":
        raise ConfigError("theory curves need a synthetic axis (alpha, noise or dimension)")
    regime = regime_from(_market_m(cfg), cfg["w_min"])
    mixture = GaussianMixtureSpec(mu=(cfg["mu"],), sigma=cfg["sigma"], prior_y1=cfg["prior_y1"])
    points = theory_curve(
        cfg["axis"],
        cfg["grid"],
        regime,
        n_samples=int(cfg["n_samples"]),
        seed=int(cfg["seed"]),
        mixture=mixture,
        nested_sigma=cfg["nested_sigma"],
    )
    regime_name = "two_providers" if cfg["w_min"] is not None else "equal_reputations"
    header = [
        "axis", "axis_value", "bayes_risk", "social_loss",
        "regime", "m", "w_min", "n_samples", "point_seed", "degenerate",
    ]
    rows = [
        [
            cfg["axis"], p.axis_value, p.bayes_risk, p.social_loss,
            regime_name, _market_m(cfg),
            cfg["w_min"], int(cfg["n_samples"]), int(cfg["seed"]) + k,
            p.error or "",
        ]
        for k, p in enumerate(points)
    ]
    write_csv(cfg["out_csv"], header, rows)
    if cfg["out_svg"]:
        chart = line_chart(
            [
                Series("bayes risk", [p.axis_value for p in points], [p.bayes_risk for p in points]),
                Series("equilibrium social loss", [p.axis_value for p in points], [p.social_loss for p in points]),
            ],
            x_label=cfg["axis"],
            y_label="loss",
            title="theory curve",
        )
        with open(cfg["out_svg"], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(chart)
    return 0


def cmd_exact(cfg: dict) -> int:
    _require(cfg, "grid", "out_csv")
    if cfg["axis"] not in (None, "alpha"):
        raise ConfigError("exact mode sweeps the alpha axis")
    rows = run_exact_sweep(cfg["grid"], _market_m(cfg), cfg["w_min"])
    header = [
        "grid_index", "alpha", "m", "w_min", "n_pure_equilibria",
        "pure_majority_counts", "p1", "p2", "social_loss", "degenerate",
    ]
    out = [
        [
            r.grid_index, r.alpha, r.m, r.w_min, r.n_pure_equilibria,
            r.pure_majority_counts, r.p1, r.p2, r.social_loss, r.degenerate,
        ]
        for r in rows
    ]
    write_csv(cfg["out_csv"], header, out)
    return 0


def cmd_dynamics(cfg: dict) -> int:
    _require(cfg, "axis", "grid", "out_csv")
    source = _source(cfg)
    reputations = None
    if cfg["w_min"] is not None:
        reputations = np.asarray([1.0 - cfg["w_min"], cfg["w_min"]])
    dyn = cfg["dynamics"]
    config = DynamicsConfig(
        m=_market_m(cfg),
        choice_noise=float(cfg["c"]),
        tau=float(dyn["tau"]),
        init_sigma=float(dyn["init_sigma"]),
        reinit_threshold=float(dyn["reinit_threshold"]),
        inner_iterations=int(dyn["inner_iterations"]),
        learning_rate=dyn["learning_rate"],
        stop_epsilon=float(dyn["stop_epsilon"]),
        max_stages=int(dyn["max_stages"]),
        reputations=reputations,
    )
    rows = run_dynamics_sweep(
        source,
        config,
        trials=int(cfg["trials"]),
        master_seed=int(cfg["seed"]),
        threads=int(cfg["threads"]),
        bayes_iterations=int(cfg["bayes"]["iterations"]),
        bayes_learning_rate=float(cfg["bayes"]["learning_rate"]),
    )
    header = [
        "grid_index", "axis_value", "trial", "seed", "social_loss", "bayes_risk_fit",
        "converged", "stages", "mean_social_loss", "two_se_social_loss",
    ]
    out = [
        [
            r.grid_index, r.axis_value, r.trial, r.seed, r.social_loss, r.bayes_risk_fit,
            r.converged, r.stages, r.mean_social_loss, r.two_se_social_loss,
        ]
        for r in rows
    ]
    write_csv(cfg["out_csv"], header, out)
    if cfg["out_svg"]:
        firsts = [r for r in rows if r.trial == 0]
        means = {}
        for r in rows:
            means.setdefault(r.grid_index, []).append(r.bayes_risk_fit)
        chart = line_chart(
            [
                Series(
                    "mean equilibrium social loss",
                    [r.axis_value for r in firsts],
                    [r.mean_social_loss for r in firsts],
                    errors=[r.two_se_social_loss or 0.0 for r in firsts],
                ),
                Series(
                    "mean fitted bayes risk",
                    [r.axis_value for r in firsts],
                    [float(np.mean(means[r.grid_index])) for r in firsts],
                ),
            ],
            x_label=source.axis,
            y_label="loss",
            title="best-response dynamics",
        )
        with open(cfg["out_svg"], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(chart)
    return 0


def cmd_bayes_risk(cfg: dict) -> int:
    _require(cfg, "axis", "grid", "out_csv")
    source = _source(cfg)
    rows = run_bayes_sweep(
        source,
        master_seed=int(cfg["seed"]),
        n_samples=int(cfg["n_samples"]),
        iterations=int(cfg["bayes"]["iterations"]),
        learning_rate=float(cfg["bayes"]["learning_rate"]),
        tau=float(cfg["bayes"]["tau"]),
    )
    header = ["grid_index", "axis_value", "analytic_bayes_risk", "fitted_risk", "seed"]
    out = [[r.grid_index, r.axis_value, r.analytic_bayes_risk, r.fitted_risk, r.seed] for r in rows]
    write_csv(cfg["out_csv"], header, out)
    return 0


def cmd_gen_data(cfg: dict) -> int:
    _require(cfg, "kind", "out_repr")
    kind = cfg["kind"]
    if kind == "label-noise":
        spec = LabelNoiseSpec(float(cfg["alpha"]))
    elif kind == "gaussian-mixture":
        spec = GaussianMixtureSpec(mu=(cfg["mu"],), sigma=cfg["sigma"], prior_y1=cfg["prior_y1"])
    elif kind == "nested-features":
        spec = NestedFeaturesSpec(sigma=cfg["nested_sigma"], dim=int(cfg["dim"]))
    else:
        raise ConfigError(
            f"unknown kind {kind!r}; expected label-noise, gaussian-mixture or nested-features"
        )
    population = generate(spec, int(cfg["n_points"]), int(cfg["seed"]))
    write_repr(population, cfg["out_repr"])
    print(f"wrote {population.n} points of dimension {population.dim} to {cfg['out_repr']}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mkteq",
        description="Market equilibria of competing classifiers: theory curves, "
        "exact games, best-response dynamics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, svg=False):
        p.add_argument("--config", help="JSON config file; flags override its values")
        p.add_argument("--out-csv", help="output CSV path")
        if svg:
            p.add_argument("--out-svg", help="output SVG chart path")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--threads", type=int, help=f"worker threads (env {THREADS_ENV})")

    def grids(p):
        p.add_argument("--alpha-grid", help="sweep label-noise level over this grid")
        p.add_argument("--sigma-grid", help="sweep mixture noise over this grid")
        p.add_argument("--dim-grid", help="sweep representation dimension over this grid")

    def market(p):
        p.add_argument("--m", type=int, help="number of providers")
        p.add_argument("--w-min", type=float, help="two-provider regime: smaller reputation")

    p = sub.add_parser("theory", help="closed-form equilibrium curves")
    common(p, svg=True)
    grids(p)
    market(p)
    p.add_argument("--n-samples", type=int, help="posterior-profile sample count")
    p.add_argument("--mu", type=float, help="mixture class-mean magnitude")
    p.add_argument("--prior-y1", type=float, help="mixture label-1 prior")
    p.add_argument("--nested-sigma", type=float, help="nested-features noise level")
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("exact", help="exact per-representation game analysis")
    common(p)
    p.add_argument("--alpha-grid", help="alpha grid to analyze")
    market(p)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("dynamics", help="best-response dynamics sweep")
    common(p, svg=True)
    grids(p)
    market(p)
    p.add_argument("--repr-file", help="run on a representation file instead of a generator")
    p.add_argument("--c", type=float, help="choice noise")
    p.add_argument("--n-points", type=int, help="synthetic dataset size")
    p.add_argument("--trials", type=int, help="dynamics trials per grid point")
    p.add_argument("--mu", type=float, help="mixture class-mean magnitude")
    p.add_argument("--prior-y1", type=float, help="mixture label-1 prior")
    p.add_argument("--nested-sigma", type=float, help="nested-features noise level")
    p.add_argument("--tau", type=float, help="prediction temperature")
    p.add_argument("--init-sigma", type=float, help="parameter init scale")
    p.add_argument("--reinit-threshold", type=float, help="risk above which a provider reinitializes")
    p.add_argument("--inner-iterations", type=int, help="gradient steps per provider turn")
    p.add_argument("--learning-rate", help=f"step size, or {SCHEDULE_NAME!r}")
    p.add_argument("--stop-epsilon", type=float, help="per-provider utility tolerance")
    p.add_argument("--max-stages", type=int, help="stage cap")
    p.add_argument("--bayes-iterations", type=int, help="bayes-fit gradient steps")
    p.add_argument("--bayes-learning-rate", type=float, help="bayes-fit step size")
    p.set_defaults(func=cmd_dynamics)

    p = sub.add_parser("bayes-risk", help="analytic vs fitted bayes risk")
    common(p)
    grids(p)
    p.add_argument("--repr-file", help="evaluate a representation file")
    p.add_argument("--n-points", type=int, help="synthetic dataset size")
    p.add_argument("--n-samples", type=int, help="posterior-profile sample count")
    p.add_argument("--mu", type=float, help="mixture class-mean magnitude")
    p.add_argument("--prior-y1", type=float, help="mixture label-1 prior")
    p.add_argument("--nested-sigma", type=float, help="nested-features noise level")
    p.add_argument("--bayes-iterations", type=int, help="bayes-fit gradient steps")
    p.add_argument("--bayes-learning-rate", type=float, help="bayes-fit step size")
    p.set_defaults(func=cmd_bayes_risk)

    p = sub.add_parser("gen-data", help="generate a synthetic population file")
    common(p)
    p.add_argument("--kind", help="label-noise | gaussian-mixture | nested-features")
    p.add_argument("--alpha", type=float, help="label-noise level")
    p.add_argument("--mu", type=float, help="mixture class-mean magnitude")
    p.add_argument("--sigma", type=float, help="mixture noise level")
    p.add_argument("--prior-y1", type=float, help="mixture label-1 prior")
    p.add_argument("--nested-sigma", type=float, help="nested-features noise level")
    p.add_argument("--dim", type=int, help="nested-features kept dimensions")
    p.add_argument("--n-points", type=int, help="points to generate")
    p.add_argument("--out-repr", help="output representation file")
    p.set_defaults(func=cmd_gen_data)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return args.func(cfg)
    except (ConfigError, ReprFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
