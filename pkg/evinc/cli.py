"""
Точка входа: evinc solve | check-conditions | campaign | gallery
evinc/cli.py
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from pydantic import ValidationError

from evinc.config import get_log_level, settings
from evinc.exceptions import (
    ConditionViolation,
    ConfigError,
    ContractViolation,
    ConvergenceFailure,
    DtTooLargeError,
    EvincError,
    InconsistentLipschitzError,
    StepFailure,
    UnsupportedRegimeError,
)
from evinc.gallery.system import default_rho
from evinc.harness.campaign import run_campaign
from evinc.run_config import (
    RunConfig,
    build_campaign,
    build_family,
    build_gallery,
    build_problem,
    load_run_config,
    recognized_keys,
    sample_conditions,
)
from evinc.signals.weighted_space import write_signal_csv
from evinc.solver.service import solve
from evinc.utils.constants import CAMPAIGN_FILE, REPORT_FILE, SOLUTION_FILE, ExitCode
from evinc.utils.helpers import format_key_values

logger = logging.getLogger(__name__)


def setup_logging() -> None:
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if settings.LOG_FILE:
        handlers.append(logging.FileHandler(settings.LOG_FILE))
    logging.basicConfig(level=get_log_level(), format=settings.LOG_FORMAT, handlers=handlers)


def _keys_epilog() -> str:
    lines = ["recognized config keys (also usable as --set section.key=value):"]
    for section, keys in recognized_keys().items():
        lines.append(f"  [{section}] {', '.join(keys)}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    epilog = _keys_epilog()
    parser = argparse.ArgumentParser(
        prog="evinc",
        description="Causal solver for non-autonomous evolutionary inclusions",
        epilog=epilog,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    commands = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("solve", "solve the configured inclusion and write solution.csv, report.txt"),
        ("check-conditions", "check the material conditions and write report.txt"),
        ("campaign", "run a property campaign and write campaign.csv, report.txt"),
        ("gallery", "assemble a gallery model and write its summary to report.txt"),
    ):
        sub = commands.add_parser(
            name, help=help_text, description=help_text, epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter
        )
        sub.add_argument("--config", type=Path, help="TOML run configuration")
        sub.add_argument("--out", type=Path, default=Path("."), help="output directory (default: .)")
        sub.add_argument("--seed", type=int, help="campaign and random forcing seed")
        sub.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                         help="override a config key, e.g. solver.rho=2 (repeatable)")
        sub.add_argument("--mode", choices=["direct", "yosida"], help="solver mode")
        sub.add_argument("--rho", type=float, help="exponential weight rho")
        sub.add_argument("--dt", type=float, help="time step")
    return parser


def _flag_overrides(args: argparse.Namespace) -> List[str]:
    overrides = list(args.overrides)
    if args.seed is not None:
        overrides += [f"campaign.seed={args.seed}", f"forcing.seed={args.seed}"]
    if args.mode is not None:
        overrides.append(f'solver.mode="{args.mode}"')
    if args.rho is not None:
        overrides.append(f"solver.rho={args.rho!r}")
    if args.dt is not None:
        overrides.append(f"grid.dt={args.dt!r}")
    return overrides


def _write_report(out: Path, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / REPORT_FILE
    path.write_text(text, encoding="utf-8")
    return path


def _emit(paths: Sequence[Path]) -> None:
    for path in paths:
        print(path)


def cmd_check_conditions(config: RunConfig, out: Path) -> int:
    if config.is_gallery:
        report = build_gallery(config).conditions
    else:
        report = sample_conditions(build_family(config), config.grid.to_grid())
    _emit([_write_report(out, report.to_text())])
    if not report.passed:
        logger.error(f"❌ Conditions failed: {', '.join(report.failures)}")
        return ExitCode.CONDITIONS_FAILED
    return ExitCode.OK


def _require_conditions(problem) -> None:
    if problem.conditions is not None:
        problem.conditions.raise_for_failure()


def cmd_solve(config: RunConfig, out: Path) -> int:
    problem = build_problem(config)
    _require_conditions(problem)
    report = solve(problem, raise_on_failure=False)
    extra = {"problem": problem.name, "c_tilde": problem.c_tilde, "rho_zero": problem.rho_zero, "dt": problem.grid.dt}
    solution_path = write_signal_csv(report.solution, out / SOLUTION_FILE)
    _emit([solution_path, _write_report(out, report.to_text(extra))])
    if not report.converged:
        logger.error(f"❌ Solve failed at step {report.failed_step}: {report.failure_reason}")
        return ExitCode.SOLVER_FAILED
    return ExitCode.OK


def cmd_campaign(config: RunConfig, out: Path) -> int:
    problem = build_problem(config)
    _require_conditions(problem)
    report = run_campaign(build_campaign(config, problem))
    out.mkdir(parents=True, exist_ok=True)
    _emit([report.to_csv(out / CAMPAIGN_FILE), _write_report(out, report.summary_text())])
    return ExitCode.OK if report.passed else ExitCode.CAMPAIGN_FAILED


def cmd_gallery(config: RunConfig, out: Path) -> int:
    system = build_gallery(config)
    text = system.summary_text() + format_key_values({"rho_default": default_rho(system)})
    _emit([_write_report(out, text + system.conditions.to_text())])
    return ExitCode.OK


COMMANDS = {
    "solve": cmd_solve,
    "check-conditions": cmd_check_conditions,
    "campaign": cmd_campaign,
    "gallery": cmd_gallery,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Коды выхода: 0 ok, 1 конфиг, 2 условия, 3 решатель, 4 провалы кампании"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return ExitCode.OK if e.code == 0 else ExitCode.USAGE
    setup_logging()
    try:
        config = load_run_config(args.config, _flag_overrides(args))
        return int(COMMANDS[args.command](config, args.out))
    except (ConfigError, ContractViolation, ValidationError, UnsupportedRegimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        logger.error(f"❌ Configuration error: {e}")
        return ExitCode.USAGE
    except (ConditionViolation, InconsistentLipschitzError) as e:
        print(f"conditions failed: {e}", file=sys.stderr)
        logger.error(f"❌ Conditions failed: {e}")
        return ExitCode.CONDITIONS_FAILED
    except (StepFailure, ConvergenceFailure, DtTooLargeError) as e:
        print(f"solver failed: {e}", file=sys.stderr)
        logger.error(f"❌ Solver failed: {e}")
        return ExitCode.SOLVER_FAILED
    except EvincError as e:
        # ResolventFailure, OracleFailure, ParameterOutOfRange внутри решения
        print(f"solver failed: {type(e).__name__}: {e}", file=sys.stderr)
        logger.error(f"❌ Unexpected {type(e).__name__}: {e}")
        return ExitCode.SOLVER_FAILED


if __name__ == "__main__":
    sys.exit(main())
