from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import structlog
from pydantic import ValidationError

from src.config import PolicyName, SimConfig, env_diagnostics, settings
from src.errors import ConfigError
from src.experiments.config_file import load_config
from src.experiments.runner import ExperimentSpec, SweepKind, parse_sweep, run_experiment
from src.utils.diagnostics import error_diagnostics_processor, run_summary_processor

EXIT_OK = 0
EXIT_OUTPUT_ERROR = 1
EXIT_CONFIG_ERROR = 2


def configure_logging() -> None:
    """Set up structlog on stderr: JSON when piped, pretty on a terminal."""
    log_dir = Path(settings.log_file).parent
    log_dir.mkdir(parents=True, exist_ok=True)

    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            error_diagnostics_processor,
            run_summary_processor,
            structlog.dev.ConsoleRenderer()
            if sys.stderr.isatty()
            else structlog.processors.JSONRenderer(),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(
            getattr(logging, settings.log_level.upper(), logging.INFO)
        ),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=True,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oodb-cluster-sim",
        description="Simulate and compare object clustering policies of an OODB storage layer.",
    )
    parser.add_argument("--config", type=Path, help="KEY = value config file")
    parser.add_argument(
        "--policy",
        help="comma-separated policies (cactis,orion,ck); default all three",
    )
    parser.add_argument(
        "--sweep",
        default=SweepKind.SINGLE.value,
        help="KIND=lo..hi:step or KIND=v1,v2 with KIND in "
        + ", ".join(k.value for k in SweepKind),
    )
    parser.add_argument("--seeds", type=int, help="replications per point (overrides config)")
    parser.add_argument("--out", type=Path, help="run CSV path; summaries are written beside it")
    parser.add_argument(
        "--dump-layout",
        action="store_true",
        help="write the final object-to-page layout of every run",
    )
    parser.add_argument(
        "--no-range-check",
        action="store_true",
        help="allow sweep values outside the documented parameter ranges",
    )
    return parser


def _parse_policies(text: str | None, base: SimConfig) -> list[PolicyName]:
    if not text:
        # a config file naming one policy runs just that one
        return [base.policy] if "policy" in base.model_fields_set else list(PolicyName)
    try:
        return [PolicyName(name.strip()) for name in text.split(",") if name.strip()]
    except ValueError as exc:
        raise ConfigError(f"unknown policy in {text!r}") from exc


def build_spec(args: argparse.Namespace) -> ExperimentSpec:
    base = SimConfig()
    if args.config:
        try:
            base = load_config(args.config)
        except OSError as exc:
            raise ConfigError(f"cannot read {args.config}: {exc.strerror or exc}") from exc
    kind, values = parse_sweep(args.sweep)
    output = args.out or Path(settings.output_dir) / f"{kind}.csv"
    try:
        return ExperimentSpec(
            sweep_kind=kind,
            sweep_values=values,
            policies=_parse_policies(args.policy, base),
            base=base,
            seeds=args.seeds,
            output=output,
            dump_layout=args.dump_layout,
            enforce_ranges=not args.no_range_check,
        )
    except ValidationError as exc:
        raise ConfigError(exc.errors()[0]["msg"]) from None


def main(argv: list[str] | None = None) -> int:
    configure_logging()
    log = structlog.get_logger()
    args = build_parser().parse_args(argv)

    diag = env_diagnostics()
    log.info("starting_simulator", log_level=settings.log_level, **diag)
    if diag["os_env_overrides"]:
        log.warning(
            "os_env_overriding_env_file",
            env_file=diag["env_file"],
            overrides=diag["os_env_overrides"],
        )

    try:
        spec = build_spec(args)
        paths = run_experiment(spec)
    except ConfigError as exc:
        log.error("config_error", error=str(exc), line=exc.line)
        return EXIT_CONFIG_ERROR
    except OSError as exc:
        log.error("output_error", path=exc.filename, error=exc.strerror or str(exc))
        return EXIT_OUTPUT_ERROR

    for path in paths:
        print(path)
    return EXIT_OK


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
