"""Command-line interface: simulate, estimate, confint.

``estimate`` reads a JSON run configuration (flags override individual
fields), prints a fit summary, and writes a JSON result file holding
every fitted quantity at full precision. ``confint`` recomputes a
confidence interval from a stored result. Exit codes: 0 success,
2 configuration error, 3 data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from scipy.stats import norm

from .dgp import DgpParams, make_plpr_data
from .dml_engine import PROCEDURES, SCORES, run_dml
from .errors import (
    ConfigError,
    DataError,
    MissingResult,
    NumericalError,
    PanelDmlError,
)
from .learners import LEARNER_KINDS, LearnerSpec, ParamGrid, ParamRange
from .panel_data import ColumnSpec, load_long_table, write_long_table
from .transform import APPROACHES, X_TRANSFORMS

_DELIMITERS = {"comma": ",", "tab": "\t"}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paneldml",
        description="Double machine learning for panel regression with fixed effects.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate a synthetic panel and write it to a file")
    sim.add_argument("--n-subjects", type=int, default=1000)
    sim.add_argument("--t-periods", type=int, default=10)
    sim.add_argument("--dim-x", type=int, default=20)
    sim.add_argument("--theta", type=float, default=0.5)
    sim.add_argument("--rho", type=float, default=0.8)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True, help="output file path")
    sim.add_argument("--delimiter", choices=sorted(_DELIMITERS), default="comma")

    est = sub.add_parser("estimate", help="run the estimation described by a config file")
    est.add_argument("--config", required=True, help="JSON run configuration")
    est.add_argument("--input", help="override: input data file")
    est.add_argument("--output", help="override: result file path")
    est.add_argument("--approach", choices=APPROACHES)
    est.add_argument("--transform-x", choices=X_TRANSFORMS)
    est.add_argument("--score", choices=SCORES)
    est.add_argument("--dml-procedure", choices=PROCEDURES)
    est.add_argument("--n-folds", type=int)
    est.add_argument("--seed", type=int)
    est.add_argument("--ci-level", type=float)
    est.add_argument("--delimiter", choices=sorted(_DELIMITERS))
    est.add_argument(
        "--no-cross-fitting",
        action="store_true",
        help="override: disable cross-fitting",
    )

    ci = sub.add_parser("confint", help="confidence interval from a stored result file")
    ci.add_argument("--result", required=True, help="result JSON from `estimate`")
    ci.add_argument("--level", type=float, default=0.95)
    return parser


def _require(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"missing config field {key!r}")
    return cfg[key]


def _enum(cfg: dict, key: str, allowed, default):
    value = cfg.get(key, default)
    if value not in allowed:
        raise ConfigError(f"config field {key!r}: got {value!r}, expected one of {allowed}")
    return value


def _columns(cfg: dict) -> ColumnSpec:
    raw = _require(cfg, "columns")
    if not isinstance(raw, dict):
        raise ConfigError("config field 'columns' must be an object")
    for key in ("y", "d", "x", "panel", "time"):
        if key not in raw:
            raise ConfigError(f"config field 'columns.{key}' is required")
    x = raw["x"]
    if not isinstance(x, list) or not all(isinstance(c, str) for c in x):
        raise ConfigError("config field 'columns.x' must be a list of column names")
    try:
        return ColumnSpec(
            y=raw["y"], d=raw["d"], x=tuple(x),
            panel=raw["panel"], time=raw["time"],
            cluster=raw.get("cluster"),
        )
    except ValueError as exc:
        raise ConfigError(f"config field 'columns': {exc}") from exc


def _learner(cfg: dict, name: str, default_kind: str = "boosting") -> LearnerSpec:
    raw = cfg.get("learners", {}).get(name)
    if raw is None:
        return LearnerSpec(default_kind)
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ConfigError(f"config field 'learners.{name}' must be an object with a 'kind'")
    kind = raw["kind"]
    if kind not in LEARNER_KINDS:
        raise ConfigError(
            f"config field 'learners.{name}.kind': got {kind!r}, expected one of {LEARNER_KINDS}"
        )
    params = {k: v for k, v in raw.items() if k not in ("kind", "lambda_grid")}
    try:
        return LearnerSpec(kind, params, lambda_grid=raw.get("lambda_grid"))
    except ValueError as exc:
        raise ConfigError(f"config field 'learners.{name}': {exc}") from exc


def _tuning(cfg: dict) -> ParamGrid | None:
    raw = cfg.get("tuning")
    if raw is None:
        return None
    if not isinstance(raw, dict) or "spaces" not in raw:
        raise ConfigError("config field 'tuning' must be an object with 'spaces'")
    spaces = {}
    for name, entries in raw["spaces"].items():
        if name not in ("ml_l", "ml_m", "ml_g"):
            raise ConfigError(f"config field 'tuning.spaces': unknown nuisance {name!r}")
        ranges = []
        for entry in entries:
            try:
                ranges.append(
                    ParamRange(
                        name=entry["name"],
                        lower=float(entry["lower"]),
                        upper=float(entry["upper"]),
                        integer=bool(entry.get("integer", False)),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(
                    f"config field 'tuning.spaces.{name}': each entry needs "
                    f"'name', 'lower', 'upper' ({exc})"
                ) from exc
        spaces[name] = tuple(ranges)
    try:
        return ParamGrid(
            spaces=spaces,
            resolution=int(raw.get("resolution", 10)),
            n_evals=int(raw.get("n_evals", 5)),
            cv_folds=int(raw.get("cv_folds", 5)),
            tune_on_folds=bool(raw.get("tune_on_folds", False)),
            tune_by_subject=bool(raw.get("tune_by_subject", False)),
        )
    except ValueError as exc:
        raise ConfigError(f"config field 'tuning': {exc}") from exc


def cmd_simulate(args) -> int:
    try:
        params = DgpParams(
            n_obs=args.n_subjects,
            t_per=args.t_periods,
            dim_x=args.dim_x,
            theta=args.theta,
            rho=args.rho,
            seed=args.seed,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    data = make_plpr_data(params)
    write_long_table(data, args.out, delimiter=_DELIMITERS[args.delimiter])
    print(f"wrote {data.n_obs} rows ({data.n_subjects} subjects) to {args.out}")
    return 0


def cmd_estimate(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file {args.config!r} not found") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {args.config!r} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")

    overrides = {
        "input": args.input,
        "output": args.output,
        "approach": args.approach,
        "transform_x": args.transform_x,
        "score": args.score,
        "dml_procedure": args.dml_procedure,
        "n_folds": args.n_folds,
        "seed": args.seed,
        "ci_level": args.ci_level,
        "delimiter": args.delimiter,
    }
    for key, value in overrides.items():
        if value is not None:
            cfg[key] = value
    if args.no_cross_fitting:
        cfg["apply_cross_fitting"] = False

    try:
        input_path = _require(cfg, "input")
        columns = _columns(cfg)
        approach = _enum(cfg, "approach", APPROACHES, "fd-exact")
        transform_x = _enum(cfg, "transform_x", X_TRANSFORMS, "no")
        score = _enum(cfg, "score", SCORES, "orth-PO")
        procedure = _enum(cfg, "dml_procedure", PROCEDURES, "dml2")
        delimiter = _enum(cfg, "delimiter", tuple(_DELIMITERS), "comma")
        n_folds = cfg.get("n_folds", 5)
        seed = cfg.get("seed", 0)
        apply_cf = bool(cfg.get("apply_cross_fitting", True))
        strict_gaps = bool(cfg.get("strict_time_gaps", False))
        ci_level = float(cfg.get("ci_level", 0.95))
        if not isinstance(n_folds, int) or isinstance(n_folds, bool) or n_folds < 1:
            raise ConfigError(f"config field 'n_folds': got {n_folds!r}, expected integer >= 1")
        if n_folds == 1 and apply_cf:
            raise ConfigError("config field 'n_folds': 1 requires apply_cross_fitting=false")
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise ConfigError(f"config field 'seed': got {seed!r}, expected integer")
        if not 0.0 < ci_level < 1.0:
            raise ConfigError(f"config field 'ci_level': got {ci_level!r}, expected value in (0, 1)")

        ml_l = _learner(cfg, "ml_l")
        ml_m = _learner(cfg, "ml_m")
        ml_g = _learner(cfg, "ml_g") if score == "orth-IV" else None
        tuning = _tuning(cfg)
    except ConfigError as exc:
        raise ConfigError(f"{args.config}: {exc}") from None

    try:
        data = load_long_table(input_path, columns, delimiter=_DELIMITERS[delimiter])
    except FileNotFoundError as exc:
        raise DataError(f"input file {input_path!r} not found") from exc
    except DataError as exc:
        raise DataError(f"{input_path}: {exc}") from exc

    fit = run_dml(
        data,
        approach=approach,
        transform_x=transform_x,
        score=score,
        dml_procedure=procedure,
        ml_l=ml_l,
        ml_m=ml_m,
        ml_g=ml_g,
        n_folds=n_folds,
        seed=seed,
        apply_cross_fitting=apply_cf,
        tuning=tuning,
        strict_gaps=strict_gaps,
    )

    lo, hi = fit.ci(ci_level)
    print(fit.summary())
    print()
    print(f"{ci_level * 100:g}% CI: [{lo:.7f}, {hi:.7f}]")

    out_path = cfg.get("output") or os.fspath(input_path) + ".fit.json"
    record = fit.to_dict()
    record.update(
        {"input": os.fspath(input_path), "ci_level": ci_level, "ci_lower": lo, "ci_upper": hi}
    )
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(record, fh, indent=2)
        fh.write("\n")
    print(f"result written to {out_path}")
    return 0


def cmd_confint(args) -> int:
    if not 0.0 < args.level < 1.0:
        raise ConfigError(f"--level: got {args.level!r}, expected value in (0, 1)")
    try:
        with open(args.result, "r", encoding="utf-8") as fh:
            record = json.load(fh)
    except (FileNotFoundError, json.JSONDecodeError) as exc:
        raise MissingResult(args.result) from exc
    try:
        theta = float(record["theta_hat"])
        se = float(record["se_theta"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MissingResult(args.result) from exc
    name = str(record.get("treatment", "d"))
    z = float(norm.ppf(0.5 + args.level / 2.0))
    lo, hi = theta - z * se, theta + z * se
    lo_pct = (1.0 - args.level) / 2.0 * 100.0
    hi_pct = (1.0 + args.level) / 2.0 * 100.0
    print(f"{'':{len(name)}}  {lo_pct:g} %      {hi_pct:g} %")
    print(f"{name}  {lo:.7f}  {hi:.7f}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {"simulate": cmd_simulate, "estimate": cmd_estimate, "confint": cmd_confint}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4
    except PanelDmlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
