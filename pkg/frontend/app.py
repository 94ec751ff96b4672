"""
Command-line entry point: analyze, prioritize and verify behavioral models.

    python -m frontend.app analyze --model fixtures/shipping_order.model
    python -m frontend.app prioritize --model fixtures/shipping_order.model --seed 3
    python -m frontend.app verify --model fixtures/student_enrolment.model --sweep 100

Reports go to stdout, logs to stderr. Exit codes: 0 success, 1 unexpected
failure, 2 model or argument error, 3 model without decision nodes,
4 verification failure, 5 enumeration bound exceeded.
"""

import argparse
import sys
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from backend.prioritizer import orchestrator
from backend.prioritizer.ga.ga_models import GaConfig
from backend.prioritizer.utils.reporter_helper import FORMATS, render, save_report
from backend.shared.errors import ConfigurationError
from backend.shared.run_config import RunConfigManager
from backend.shared.run_utils import StandardErrorHandler, setup_run_environment

from .utils import parse_initial_population, report_stem


def _environment(args: argparse.Namespace) -> Dict[str, Any]:
    config, logger = setup_run_environment(log_level="DEBUG" if args.verbose else None)
    logger.debug(f"Command {args.command} with model {args.model}")
    return config


def _ga_config(args: argparse.Namespace, config: Dict[str, Any]) -> GaConfig:
    initial = parse_initial_population(args.initial)
    population = args.pop
    if initial is not None and population is None:
        supplied = len(initial) + len(initial) % 2
        population = max(config["PRIORITIZER_POPULATION_SIZE"], supplied)
    try:
        return GaConfig.from_config(
            config,
            population_size=population,
            crossover_prob=args.pc,
            mutation_prob=args.pm,
            max_iterations=args.iters,
            seed=args.seed,
            workers=args.workers,
            elitism=False if args.no_elitism else None,
            stop_on_uniform=True if args.stop_on_uniform else None,
            immigrants=False if args.no_immigrants else None,
            initial_population=initial,
        )
    except ValidationError as e:
        messages = "; ".join(err["msg"] for err in e.errors())
        raise ConfigurationError(f"Invalid GA settings: {messages}") from e


def _max_bits(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    if args.max_bits is None:
        return config["PRIORITIZER_ORACLE_MAX_BITS"]
    return RunConfigManager.check_range("PRIORITIZER_ORACLE_MAX_BITS", args.max_bits)


def _emit(args: argparse.Namespace, report, command: str) -> None:
    text = render(report, args.format)
    sys.stdout.write(text)
    sys.stdout.flush()
    if args.out:
        save_report(text, args.out, report_stem(report.model_name, command), args.format)
    if args.export_dot:
        orchestrator.export_dot(args.model, args.name, args.export_dot)


@StandardErrorHandler.handle_common_exceptions
def cmd_analyze(args: argparse.Namespace) -> int:
    _environment(args)
    report = orchestrator.analyze(args.model, args.name)
    _emit(args, report, "analyze")
    return 0


@StandardErrorHandler.handle_common_exceptions
def cmd_prioritize(args: argparse.Namespace) -> int:
    config = _environment(args)
    report = orchestrator.prioritize(args.model, args.name, _ga_config(args, config))
    _emit(args, report, "prioritize")
    if report.degenerate:
        print(f"notice: {report.notice}", file=sys.stderr)
        return 3
    return 0


@StandardErrorHandler.handle_common_exceptions
def cmd_verify(args: argparse.Namespace) -> int:
    config = _environment(args)
    cfg = _ga_config(args, config)
    max_bits = _max_bits(args, config)

    if args.sweep:
        report = orchestrator.sweep(
            args.model, args.name, cfg, args.sweep, args.min_rate, max_bits
        )
        _emit(args, report, "sweep")
        return 0 if report.sweep.passed else 4

    report = orchestrator.verify(args.model, args.name, cfg, max_bits)
    _emit(args, report, "verify")
    return 0 if report.verification.optimum_found else 4


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", required=True, help="Model file (.model text or .json)")
    parser.add_argument("--name", help="Model to use from the bundle (default: first)")
    parser.add_argument("--format", choices=FORMATS, default="text")
    parser.add_argument("--out", help="Directory to also save the report in")
    parser.add_argument("--export-dot", metavar="PATH", help="Write the flow graph as DOT")
    parser.add_argument("--verbose", action="store_true", help="Debug logging on stderr")


def _add_ga(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int)
    parser.add_argument("--pop", type=int, help="Population size (even)")
    parser.add_argument("--iters", type=int, help="Maximum GA iterations")
    parser.add_argument("--pc", type=float, help="Crossover probability")
    parser.add_argument("--pm", type=float, help="Mutation probability")
    parser.add_argument("--initial", help="Comma-separated initial population")
    parser.add_argument("--no-elitism", action="store_true")
    parser.add_argument("--stop-on-uniform", action="store_true")
    parser.add_argument(
        "--no-immigrants", action="store_true", help="Keep survivors even without a new path"
    )
    parser.add_argument("--workers", type=int, help="Threads for fitness evaluation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prioritizer",
        description="Rank test scenarios of activity diagrams and state charts by complexity.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    analyze = commands.add_parser("analyze", help="Print the node weight table")
    _add_common(analyze)
    analyze.set_defaults(handler=cmd_analyze)

    prioritize = commands.add_parser("prioritize", help="Run the GA and rank scenarios")
    _add_common(prioritize)
    _add_ga(prioritize)
    prioritize.set_defaults(handler=cmd_prioritize)

    verify = commands.add_parser("verify", help="Check the GA against full enumeration")
    _add_common(verify)
    _add_ga(verify)
    verify.add_argument("--max-bits", type=int, help="Enumeration bound in bits (1..24)")
    verify.add_argument("--sweep", type=int, metavar="N", help="Verify N consecutive seeds")
    verify.add_argument("--min-rate", type=float, default=0.95)
    verify.set_defaults(handler=cmd_verify)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
