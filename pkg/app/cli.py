# -*- coding: utf-8 -*-
"""Command-line front end.

    wraploss run <config.json> [--seed N] [--out-dir DIR]
    wraploss compare <grid.json | a.json b.json ...> [--jobs N]
    wraploss surface --o-range LO HI N --p-range LO HI N [--kind wrap|dof] [--out FILE]
    wraploss gradcheck [--instances N] [--seed N] [--out FILE]
    wraploss theorem1 --c C --L L [--delta D] [--trials N] [--slack S] [--out FILE]
    wraploss datagen {hetero,imbalance} [spec.json] --out DIR

Exit codes: 0 success, 1 validation (bad usage included), 2 numeric/assertion failure, 3 I/O.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from app.version import __version__
from core.errors import ConfigError
from core.keys import K
from core.models.data import DataSource
from domain.analysis import (
    check_theorem1,
    dof_output_surface,
    grid_axis,
    theorem1_delta_limit,
    wrap_error_surface,
)
from domain.datagen import gen_heteroscedastic_regression, gen_imbalanced_classification
from domain.gradcheck import run_gradcheck
from infra.paths import output_root
from services.compare_service import compare_files
from services.errors import ExitCode, exit_code_for
from services.experiment_service import run_experiment_file
from storage.artifacts import write_surface_csv
from storage.atomic import read_json, write_json_atomic
from storage.dataset_csv import write_csv_dataset
from storage.serializers.experiment_json import data_from_dict

log = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to the validation exit code."""

    def error(self, message: str):  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(int(ExitCode.VALIDATION), f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out-dir", type=str, default=None, help="Output root (default: $WRAPLOSS_OUT or ./runs)")
    p.add_argument("--log-level", type=str, default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wraploss", description="Wrapped-loss training and analysis.")
    parser.add_argument("--version", action="version", version=f"wraploss {__version__}")
    sub = parser.add_subparsers(dest="cmd", required=True)

    pr = sub.add_parser("run", help="Train one experiment config and write its artifacts")
    pr.add_argument("config", type=str)
    pr.add_argument("--seed", type=int, default=None, help="Override train.seed")
    _common(pr)

    pc = sub.add_parser("compare", help="Run a grid config (or several configs) and write a comparison")
    pc.add_argument("configs", nargs="+", type=str)
    pc.add_argument("--seed", type=int, default=None, help="Override train.seed in every run")
    pc.add_argument("--jobs", type=int, default=1, help="Runs executed concurrently")
    _common(pc)

    ps = sub.add_parser("surface", help="Emit a loss surface grid as CSV")
    ps.add_argument("--kind", choices=["wrap", "dof"], default="wrap")
    ps.add_argument("--o-range", nargs=3, type=float, metavar=("LO", "HI", "N"), default=[0.1, 3.0, 30],
                    help="wrap: o axis; dof: DoF axis")
    ps.add_argument("--p-range", nargs=3, type=float, metavar=("LO", "HI", "N"), default=[0.0, 20.0, 21],
                    help="wrap: P axis; dof: output-count axis")
    ps.add_argument("--no-pin", action="store_true", help="Do not pin o = 1/P^2 onto the o axis")
    ps.add_argument("--out", type=str, default=None)
    _common(ps)

    pg = sub.add_parser("gradcheck", help="Finite-difference check of every analytic gradient")
    pg.add_argument("--instances", type=int, default=100)
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--out", type=str, default=None)
    _common(pg)

    pt = sub.add_parser("theorem1", help="Monte-Carlo check of the near-one wrap approximation bound")
    pt.add_argument("--c", type=int, required=True)
    pt.add_argument("--L", type=float, required=True)
    pt.add_argument("--delta", type=float, default=None, help="Default: the largest admissible value (c(L+1))^-2")
    pt.add_argument("--trials", type=int, default=10000)
    pt.add_argument("--slack", type=float, default=1.05)
    pt.add_argument("--seed", type=int, default=0)
    pt.add_argument("--out", type=str, default=None)
    _common(pt)

    pd = sub.add_parser("datagen", help="Write a synthetic train/test pair as CSV")
    pd.add_argument("kind", choices=[DataSource.HETERO.value, DataSource.IMBALANCE.value])
    pd.add_argument("spec", nargs="?", default=None, help="JSON object with generator settings")
    pd.add_argument("--seed", type=int, default=None)
    pd.add_argument("--out", type=str, required=True, help="Directory for train.csv and test.csv")
    _common(pd)
    return parser


def _range(values: Sequence[float], flag: str):
    lo, hi, n = values
    if not float(n).is_integer() or n < 1:
        raise ConfigError(f"{flag}: N must be a positive integer, got {n}")
    return float(lo), float(hi), int(n)


def _default_out(args, name: str) -> Path:
    return Path(args.out) if args.out else output_root(args.out_dir) / name


def cmd_run(args) -> int:
    result = run_experiment_file(args.config, seed=args.seed, out_dir=args.out_dir)
    print(f"{result.label}: best {result.summary['metric']}={result.summary['best_metric']:.6g} "
          f"at epoch {result.summary['epoch_of_best']} -> {result.run_dir}")
    return ExitCode.OK


def cmd_compare(args) -> int:
    report = compare_files(args.configs, seed=args.seed, out_dir=args.out_dir, jobs=args.jobs)
    for row in report.rows:
        if row.ok:
            print(f"{row.label}: best {row.metric}={row.best_metric:.6g} at epoch {row.epoch_of_best}")
        else:
            print(f"{row.label}: FAILED ({row.error})")
    return report.exit_code


def cmd_surface(args) -> int:
    o_rng = _range(args.o_range, "--o-range")
    p_rng = _range(args.p_range, "--p-range")
    if args.kind == "wrap":
        grid = wrap_error_surface(o_rng, p_rng, pin_minimizers=not args.no_pin)
    else:
        grid = dof_output_surface(grid_axis(*o_rng), grid_axis(*p_rng))
    out = _default_out(args, f"surface_{args.kind}.csv")
    write_surface_csv(out, grid.axis1_name, grid.axis2_name, grid.axis1, grid.axis2, grid.values)
    print(out)
    return ExitCode.OK


def cmd_gradcheck(args) -> int:
    report = run_gradcheck(seed=args.seed, instances=args.instances)
    out = _default_out(args, "gradcheck.json")
    write_json_atomic(out, report.as_dict())
    print(out)
    return ExitCode.OK if report.passed else ExitCode.NUMERIC


def cmd_theorem1(args) -> int:
    delta = args.delta if args.delta is not None else theorem1_delta_limit(args.c, args.L)
    report = check_theorem1(args.c, args.L, delta, trials=args.trials, seed=args.seed, slack=args.slack)
    out = _default_out(args, "theorem1.json")
    write_json_atomic(out, report.as_dict())
    print(out)
    return ExitCode.OK if report.passed else ExitCode.NUMERIC


def cmd_datagen(args) -> int:
    raw = read_json(args.spec) if args.spec else {}
    if not isinstance(raw, dict):
        raise ConfigError("the datagen spec must be a JSON object")
    raw = dict(raw)
    raw[K.SOURCE] = args.kind
    if args.seed is not None:
        raw["seed"] = args.seed
    data = data_from_dict(raw)
    if data.source == DataSource.HETERO:
        train_ds, test_ds = gen_heteroscedastic_regression(data.hetero)
    else:
        train_ds, test_ds = gen_imbalanced_classification(data.imbalance)
    out = Path(args.out)
    write_csv_dataset(train_ds, out / "train.csv")
    write_csv_dataset(test_ds, out / "test.csv")
    print(out)
    return ExitCode.OK


_COMMANDS = {
    "run": cmd_run,
    "compare": cmd_compare,
    "surface": cmd_surface,
    "gradcheck": cmd_gradcheck,
    "theorem1": cmd_theorem1,
    "datagen": cmd_datagen,
}


def main(argv: Optional[List[str]] = None, *, setup_logging: bool = True) -> int:
    args = build_parser().parse_args(argv)
    if setup_logging:
        from app.bootstrap import bootstrap

        try:
            bootstrap(args.out_dir, level=args.log_level)
        except OSError as exc:
            print(f"error: cannot set up logging: {exc}", file=sys.stderr)
            return ExitCode.IO
    try:
        return int(_COMMANDS[args.cmd](args))
    except Exception as exc:
        code = exit_code_for(exc)
        print(f"error: {exc}", file=sys.stderr)
        log.debug("command %s failed", args.cmd, exc_info=True)
        return int(code)
