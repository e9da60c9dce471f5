"""
Command-line entry point: check, mc-solve, periods, constants, verify-all
"""

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, Field, ValidationError, model_validator

from .bundles import BUILTIN_MODELS, ModelBundle, builtin_model, random_abelian_model, torus_model
from .checks import CheckContext, default_registry
from .config import EngineConfig
from .errors import EngineError, ModelError
from .frames import cy_condition_check
from .model_store import load_checks, read_model
from .models import CheckCategory, CheckReport, CheckSuiteReport
from .periods import psi_normalize
from .pipeline import PeriodPipeline
from .serialization import (
    checks_payload,
    constants_payload,
    eta_payload,
    gamma_payload,
    render,
    result_payload,
    write_output,
)

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

COMMANDS = ("check", "mc-solve", "periods", "constants", "verify-all")


class UsageError(Exception):
    """Bad arguments or unreadable input (exit code 2)"""


class RunConfig(BaseModel):
    """One CLI invocation"""

    command: Literal["check", "mc-solve", "periods", "constants", "verify-all"]
    model: Optional[Path] = Field(default=None, description="Model JSON file")
    builtin: Optional[str] = Field(default=None, description="Builtin model name")
    order: Optional[int] = Field(default=None, ge=1, description="Truncation order N")
    format: Literal["json", "csv"] = Field(default="json", description="Output format")
    out: Optional[Path] = Field(default=None, description="Output file (stdout when omitted)")
    seed: Optional[int] = Field(default=None, description="Seed for random models and samples")
    threads: Optional[int] = Field(default=None, ge=1, description="Worker threads for verify-all")
    window: Optional[Tuple[int, int]] = Field(default=None, description="hbar window override (half-steps)")
    verbose: bool = Field(default=False, description="Log at INFO")

    class Config:
        validate_assignment = True

    @model_validator(mode="after")
    def validate_source(self) -> "RunConfig":
        """Exactly one model source, except for verify-all where none is allowed too"""
        if self.model is not None and self.builtin is not None:
            raise ValueError("--model and --builtin are mutually exclusive")
        if self.command != "verify-all" and self.model is None and self.builtin is None:
            raise ValueError(f"{self.command} needs --model or --builtin")
        if self.window is not None and self.window[0] >= self.window[1]:
            raise ValueError(f"hbar window {list(self.window)} is empty")
        return self

    def engine_config(self, bundle: Optional[ModelBundle] = None) -> EngineConfig:
        """Engine settings: CLI values over environment defaults, N from the model if unset"""
        overrides: Dict[str, Any] = {}
        if self.order is not None:
            overrides["order"] = self.order
        elif bundle is not None:
            overrides["order"] = bundle.default_order
        if self.seed is not None:
            overrides["seed"] = self.seed
        if self.threads is not None:
            overrides["threads"] = self.threads
        if self.window is not None:
            overrides["hbar_window"] = self.window
        if self.verbose:
            overrides["log_level"] = "INFO"
        return EngineConfig(**overrides)


def _bundle(config: RunConfig) -> ModelBundle:
    """
    Raises:
        UsageError: unknown builtin, missing or malformed file
    """
    try:
        if config.builtin is not None:
            return builtin_model(config.builtin)
        return read_model(config.model)
    except (OSError, ModelError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _emit(config: RunConfig, payload: Dict[str, Any]):
    text = render(payload, config.format)
    if write_output(text, config.out) is None:
        sys.stdout.write(text)


def _failure(stage: str, exc: EngineError) -> CheckReport:
    return CheckReport.failure(exc.stage or stage, exc.witness, str(exc), category=CheckCategory.AXIOM)


def cmd_check(config: RunConfig) -> int:
    """Load-time axioms, opposedness and the Calabi-Yau condition"""
    bundle = _bundle(config)
    suite = load_checks(bundle)
    if suite.passed:
        ctx = CheckContext(bundle, config.engine_config(bundle))
        try:
            psi = psi_normalize(ctx.frame, bundle.filtration_w(), bundle.cohomology.omega0_class(), bundle.n)
            suite.add(cy_condition_check(ctx.frame, psi))
        except EngineError as exc:
            suite.add(_failure("cy_condition", exc))
    _emit(config, checks_payload(bundle.name, suite))
    for report in suite.failures():
        sys.stderr.write(f"{bundle.name}: {report.name} fails\n")
    return EXIT_OK if suite.passed else EXIT_CHECK_FAILED


def _checked_bundle(config: RunConfig) -> Optional[ModelBundle]:
    bundle = _bundle(config)
    failed = load_checks(bundle).failures()
    if failed:
        sys.stderr.write(f"{bundle.name}: {failed[0].name} fails\n")
        return None
    return bundle


def cmd_mc_solve(config: RunConfig) -> int:
    """Mini-versal Maurer-Cartan solution to order N"""
    bundle = _checked_bundle(config)
    if bundle is None:
        return EXIT_CHECK_FAILED
    engine = config.engine_config(bundle)
    try:
        solution = PeriodPipeline(bundle, engine).solve_mc(engine.order)
    except EngineError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_CHECK_FAILED
    _emit(config, {"model": bundle.name, "order": engine.order, "gamma": gamma_payload(solution, engine.order)})
    return EXIT_OK


def cmd_periods(config: RunConfig) -> int:
    """Full period pipeline; exit 1 if a stage fails or any identity check fails"""
    bundle = _checked_bundle(config)
    if bundle is None:
        return EXIT_CHECK_FAILED
    pipeline = PeriodPipeline(bundle, config.engine_config(bundle))
    try:
        result = pipeline.run()
    except EngineError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_CHECK_FAILED
    LOGGER.info("Pipeline statistics: %s", pipeline.get_statistics())
    _emit(config, result_payload(bundle.name, result))
    return EXIT_OK if result.checks.passed else EXIT_CHECK_FAILED


def cmd_constants(config: RunConfig) -> int:
    """A table, eta and the potential only"""
    bundle = _checked_bundle(config)
    if bundle is None:
        return EXIT_CHECK_FAILED
    engine = config.engine_config(bundle)
    try:
        result = PeriodPipeline(bundle, engine).run()
    except EngineError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_CHECK_FAILED
    _emit(config, {
        "model": bundle.name,
        "order": engine.order,
        "A": constants_payload(result.constants),
        "eta": eta_payload(result.eta),
        "checks": result.checks.to_dict(),
    })
    return EXIT_OK if result.checks.passed else EXIT_CHECK_FAILED


def verify_models(config: RunConfig) -> List[ModelBundle]:
    """The given model, or torus.1 plus seeded random models"""
    if config.model is not None or config.builtin is not None:
        return [_bundle(config)]
    engine = config.engine_config()
    models = [torus_model(1)]
    models += [random_abelian_model(engine.seed + k) for k in range(engine.random_models)]
    return models


def cmd_verify_all(config: RunConfig) -> int:
    """Every registered check on every model; exit 0 iff all pass"""
    models = verify_models(config)
    engine = config.engine_config()

    def run(bundle: ModelBundle) -> CheckSuiteReport:
        model_config = config.engine_config(bundle)
        return default_registry.run_all(bundle, model_config)

    with ThreadPoolExecutor(max_workers=engine.threads) as pool:
        suites = list(pool.map(run, models))
    payload = {
        "passed": all(s.passed for s in suites),
        "models": {b.name: s.to_dict() for b, s in zip(models, suites)},
    }
    for bundle, suite in zip(models, suites):
        total = sum(r.elapsed for r in suite.reports)
        LOGGER.info("verify-all %s: %d checks in %.3fs", bundle.name, len(suite.reports), total)
        for report in suite.failures():
            sys.stderr.write(f"{bundle.name}: {report.name} fails\n")
    _emit(config, payload)
    return EXIT_OK if payload["passed"] else EXIT_CHECK_FAILED


HANDLERS = {
    "check": cmd_check,
    "mc-solve": cmd_mc_solve,
    "periods": cmd_periods,
    "constants": cmd_constants,
    "verify-all": cmd_verify_all,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group()
    source.add_argument("--model", type=Path, help="model JSON file")
    source.add_argument("--builtin", help=f"builtin model ({', '.join(BUILTIN_MODELS)})")
    common.add_argument("--order", type=int, help="truncation order N (default: the model's)")
    common.add_argument("--format", choices=("json", "csv"), default="json", help="output format")
    common.add_argument("--out", type=Path, help="output file (default: stdout)")
    common.add_argument("--seed", type=int, help="seed for random models and samples")
    common.add_argument("--threads", type=int, help="worker threads for verify-all")
    common.add_argument("--window", type=int, nargs=2, metavar=("LO", "HI"),
                        help="hbar window override in half-steps")
    common.add_argument("--verbose", action="store_true", help="log progress at INFO")

    parser = argparse.ArgumentParser(
        prog="semiinf-periods",
        description="Exact periods, flat coordinates and WDVV data of semi-infinite variations",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        handler = HANDLERS[name]
        commands.add_parser(name, parents=[common], help=handler.__doc__.strip().splitlines()[0])
    return parser


def parse_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """
    Raises:
        UsageError: on bad arguments
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        raise UsageError("invalid arguments") if exc.code else exc
    try:
        return RunConfig(
            command=args.command, model=args.model, builtin=args.builtin, order=args.order,
            format=args.format, out=args.out, seed=args.seed, threads=args.threads,
            window=tuple(args.window) if args.window else None, verbose=args.verbose,
        )
    except ValidationError as exc:
        first = exc.errors()[0]
        raise UsageError(first["msg"]) from exc


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        config = parse_config(argv)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    level = config.engine_config().log_level
    logging.basicConfig(level=getattr(logging, level.upper(), logging.WARNING),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return HANDLERS[config.command](config)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
