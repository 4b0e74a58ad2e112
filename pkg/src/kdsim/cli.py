"""Command-line entry point.

Exit codes: 0 all checks pass, 1 other kdsim error, 2 configuration error,
3 tolerance failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from dataclasses import replace
from pathlib import Path
from typing import Any

from .config import RunConfig, Tolerances, load_config, load_report
from .exceptions import ConfigError, KdsimError, ToleranceError
from .models import as_real
from .params import derive_params, raman_nath_check, validity_report
from .sweep import run_sweep
from .validate import (
    BASELINE_RTOL,
    DEFAULT_T_FREE,
    ValidationReport,
    matches_baseline,
    run_validation,
    scattering_summary,
)
from .writer import format_params_table, format_summary, write_csv, write_json, write_text

logger = logging.getLogger("kdsim")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_TOLERANCE = 3


def _apply_overrides(config: RunConfig, overrides: Sequence[str]) -> RunConfig:
    """Apply ``--tolerance name=value`` pairs after the config and env scale."""
    if not overrides:
        return config
    values = config.tolerances.to_dict()
    for item in overrides:
        name, sep, raw = item.partition("=")
        if not sep:
            raise ConfigError(f"--tolerance: expected NAME=VALUE, got {item!r}")
        try:
            values[name] = as_real(f"tolerances.{name}", float(raw))
        except ValueError as e:
            raise ConfigError(f"tolerances.{name}: expected a number, got {raw!r}") from e
    return replace(config, tolerances=Tolerances.from_dict(values))


def _seed(text: str) -> int:
    try:
        seed = int(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from e
    if seed < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {seed}")
    return seed


def _load(args: argparse.Namespace) -> RunConfig:
    return _apply_overrides(load_config(args.config), args.tolerance)


def cmd_params(args: argparse.Namespace) -> int:
    """Write derived parameters as JSON plus a provenance table."""
    config = _load(args)
    cfg = config.physical
    derived = derive_params(cfg)
    validity = validity_report(derived)
    t_free = config.sweep.t_free if config.sweep is not None else DEFAULT_T_FREE
    document = {
        **derived.to_dict(),
        "validity": validity.to_dict(),
        "raman_nath_np": raman_nath_check(cfg, cfg.delta_p / cfg.np_mass),
        **scattering_summary(cfg, derived, t_free),
    }
    out = Path(args.out)
    write_json(out / "params.json", document)
    table = format_params_table(derived, validity)
    write_text(out / "params.txt", table)
    print(table, end="")
    return EXIT_OK


def _emit_validation(
    report: ValidationReport,
    args: argparse.Namespace,
    stem: str,
    baseline: dict[str, Any] | None,
) -> int:
    out = Path(args.out)
    write_json(out / f"{stem}.json", report.to_dict())
    summary = format_summary(report)
    write_text(out / f"{stem}.txt", summary)
    print(summary, end="")
    if not report.passed:
        raise ToleranceError(f"failed identities: {', '.join(report.failures)}")
    if baseline is not None and not matches_baseline(report, baseline, rtol=args.baseline_rtol):
        raise ToleranceError(f"report differs from baseline {args.baseline}")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    """Run every suite; exit 3 if any identity misses its tolerance."""
    config = _load(args)
    baseline = load_report(args.baseline) if args.baseline is not None else None
    report = run_validation(config, seed=args.seed)
    return _emit_validation(report, args, "validation", baseline)


def cmd_oracle(args: argparse.Namespace) -> int:
    """Run a single oracle suite."""
    config = _load(args)
    baseline = load_report(args.baseline) if args.baseline is not None else None
    report = run_validation(config, seed=args.seed, suites=(args.suite,))
    return _emit_validation(report, args, f"oracle_{args.suite}", baseline)


def cmd_sweep(args: argparse.Namespace) -> int:
    """Write one CSV per sweep axis."""
    tables = run_sweep(_load(args), with_oracle=args.with_oracle, jobs=args.jobs)
    out = Path(args.out)
    for table in tables:
        path = out / f"sweep_{table.name}.csv"
        write_csv(path, table.columns, table.rows)
        logger.info("Wrote %s (%d rows)", path, len(table.rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON config file")
    common.add_argument("--out", default="kdsim-out", help="output directory")
    common.add_argument(
        "--tolerance",
        action="append",
        default=[],
        metavar="NAME=VALUE",
        help="override one tolerance (repeatable)",
    )
    noise = common.add_mutually_exclusive_group()
    noise.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    noise.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")

    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=_seed, default=0, help="seed of the randomized cases")
    seeded.add_argument(
        "--baseline", metavar="FILE", help="saved report JSON the run must reproduce"
    )
    seeded.add_argument(
        "--baseline-rtol",
        type=float,
        default=BASELINE_RTOL,
        help="relative tolerance of the baseline comparison",
    )

    parser = argparse.ArgumentParser(
        prog="kdsim",
        description="Nanoparticle-mediated atom interferometer: parameters, signal and oracles.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", parents=[common], help="derive parameters")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("validate", parents=[common, seeded], help="run all verification suites")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sweep", parents=[common], help="signal sweeps to CSV")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--with-oracle", action="store_true", help="add grid-oracle columns")
    p.set_defaults(func=cmd_sweep)

    oracle = sub.add_parser("oracle", help="run one oracle suite")
    oracle_sub = oracle.add_subparsers(dest="suite", required=True)
    for suite in ("cavity", "wavepacket"):
        p = oracle_sub.add_parser(suite, parents=[common, seeded], help=f"{suite} oracle")
        p.set_defaults(func=cmd_oracle)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)

    try:
        return int(args.func(args))
    except ConfigError as e:
        logger.error("Configuration error: %s", e)
        return EXIT_CONFIG
    except ToleranceError as e:
        logger.error("%s", e)
        return EXIT_TOLERANCE
    except KdsimError as e:
        logger.error("%s", e)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
