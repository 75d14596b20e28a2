"""
Command-line front-end.

Every subcommand prints a JSON report on stdout and a one-line summary on
stderr. Exit codes:

    0  every check came out as expected
    2  the input did not parse (DSL, frame, fixture or run configuration)
    3  a verification failed
    4  a runtime failure (blow-up, singularity, unsamplable expression)
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from pydantic import BaseModel, ValidationError

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from config.general import settings
from config.log import setup_logging
from src.exceptions import (
    ConfigurationError,
    FixtureNotFoundError,
    FrameError,
    NotEvolutionaryError,
    ParseError,
    ToolkitError,
)
from src.expr.parser import parse
from src.expr.schema import CheckReport
from src.conservation.determining import (
    generate_determining_system,
    inverse_determining_system,
    satisfies,
    systems_equivalent,
)
from src.conservation.laws import verify_conserved_vector, verify_multipliers
from src.conservation.models import ConservedVector, MultiplierSet
from src.variational.models import Lagrangian
from src.variational.noether import variational_symmetry_check
from src.variational.operators import is_self_adjoint, selfadjointness_conditions
from src.symmetry.invariance import equivalence_check, invariance_check, invariant_check
from src.catalog.repos import FixtureRepository
from src.catalog.verify import catalog_verify
from src.numerics.convergence import convergence_study
from src.numerics.export import write_csv, write_gnuplot
from src.numerics.schema import RunConfig
from src.numerics.solver import catalog_closure, simulate

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_INPUT, EXIT_FAILED, EXIT_RUNTIME = 0, 2, 3, 4

_INPUT_ERRORS = (
    ParseError,
    FrameError,
    FixtureNotFoundError,
    ConfigurationError,
    NotEvolutionaryError,
    ValidationError,
    tomllib.TOMLDecodeError,
    OSError,
)


def _emit(payload) -> None:
    if isinstance(payload, BaseModel):
        print(payload.model_dump_json(indent=2))
        return
    print(json.dumps(_plain(payload), indent=2))


def _plain(payload):
    if isinstance(payload, BaseModel):
        return payload.model_dump(mode="json")
    if isinstance(payload, dict):
        return {key: _plain(value) for key, value in payload.items()}
    if isinstance(payload, (list, tuple)):
        return [_plain(value) for value in payload]
    return payload


def _summary(task: str, reports: list[CheckReport], strict: bool) -> int:
    failed = [r for r in reports if not (r.passed_strictly() if strict else r.passed)]
    print(f"{task}: {len(reports) - len(failed)}/{len(reports)} checks passed", file=sys.stderr)
    for report in failed:
        print(f"  {report.label}: {report.verdict.value} witness={report.witness}", file=sys.stderr)
    return EXIT_FAILED if failed else EXIT_OK


def _model(args):
    path = Path(args.model)
    if path.suffix == ".toml":
        return FixtureRepository(path.parent).load_model(path.stem)
    return FixtureRepository(args.fixtures_dir).load_model(args.model)


def _row_pieces(fixture, args):
    """System, multipliers and conserved vector of a row, with command-line overrides applied."""
    multipliers = vector = None
    if args.row:
        row = fixture.row(args.row)
        system, multipliers, vector = fixture.row_system(args.row), row.multipliers, row.vector
    else:
        system = fixture.system_for(args.closure)
    if args.lambdas:
        multipliers = MultiplierSet.from_text(system.frame, args.lambdas, name="custom")
    if args.density or args.flux:
        if system.frame.p != 2:
            raise ConfigurationError("--density/--flux need exactly two independent variables")
        components = list(vector.components) if vector is not None else [None, None]
        if args.density:
            components[0] = parse(args.density, system.frame)
        if args.flux:
            components[1] = parse(args.flux, system.frame)
        if any(c is None for c in components):
            raise ConfigurationError("a conserved vector needs both a density and a flux")
        vector = ConservedVector(tuple(components))
    if multipliers is None:
        raise ConfigurationError("no multipliers: give --row or --lambda")
    return system, multipliers, vector


def check_cl(args) -> int:
    fixture = _model(args)
    system, multipliers, vector = _row_pieces(fixture, args)
    if vector is None:
        raise ConfigurationError(f"row '{args.row}' has no conserved vector; give --density and --flux")
    report = verify_conserved_vector(system, multipliers, vector, seed=args.seed, label=args.row or "custom")
    _emit(report)
    return _summary("check-cl", [report], args.strict)


def check_multiplier(args) -> int:
    fixture = _model(args)
    system, multipliers, _ = _row_pieces(fixture, args)
    reports = verify_multipliers(system, multipliers, seed=args.seed, label=args.row or "custom")
    _emit(reports)
    return _summary("check-multiplier", reports, args.strict)


def _determining_entry(fixture, name: str | None):
    for entry in fixture.spec.determining:
        if name in (None, entry.name):
            return entry
    raise FixtureNotFoundError(f"fixture '{fixture.id}' has no multiplier ansatz '{name}'")


def derive_determining(args) -> int:
    fixture = _model(args)
    entry = _determining_entry(fixture, args.ansatz)
    ansatz = MultiplierSet.from_text(fixture.frame, entry.ansatz, entry.declared_args, entry.name)
    emitted = generate_determining_system(fixture.system, ansatz)
    equivalent = None
    if entry.published and entry.compare:
        published = [parse(text, fixture.frame) for text in entry.published]
        equivalent = systems_equivalent(list(emitted.equations), published, seed=args.seed)
    _emit({"system": emitted.export(), "published_equivalent": equivalent})
    print(f"derive-determining: {len(emitted)} equations, published form equivalent: {equivalent}", file=sys.stderr)
    return EXIT_FAILED if equivalent is False else EXIT_OK


def derive_inverse(args) -> int:
    fixture = _model(args)
    frame = fixture.frame
    payload, reports = {}, []
    for row_name in args.rows:
        system = inverse_determining_system(fixture.system, fixture.row(row_name).multipliers, tuple(args.split_parameters))
        checks = {}
        for name in args.closures:
            closure = fixture.closure(name)
            bindings = {frame.unknown(u): rhs for u, rhs in zip(fixture.spec.closes, closure.rhs)}
            verdicts = satisfies(system, bindings, seed=args.seed)
            checks[name] = [
                CheckReport.from_verdict("derive-inverse", fixture.id, verdict, eq, f"{row_name}/{name}:eq{k + 1}")
                for k, (eq, verdict) in enumerate(zip(system.equations, verdicts))
            ]
            reports += checks[name]
        payload[row_name] = {"system": system.export(), "closures": checks}
    _emit(payload)
    return _summary("derive-inverse", reports, args.strict)


def check_selfadjoint(args) -> int:
    fixture = _model(args)
    system = fixture.system_for(args.closure)
    if args.rhs:
        rhs = [parse(text, system.frame) for text in args.rhs]
        system = system.with_equations([eq - g for eq, g in zip(system.equations, rhs)], solve_form=())
    report = is_self_adjoint(system, seed=args.seed)
    _emit(report)
    return _summary("check-selfadjoint", report.coefficients, args.strict)


def derive_selfadjoint_conditions(args) -> int:
    fixture = _model(args)
    conditions = selfadjointness_conditions(fixture.frame, parse(args.rhs, fixture.frame), split=args.split)
    _emit(conditions.export())
    print(f"derive-selfadjoint-conditions: {len(conditions)} equations", file=sys.stderr)
    return EXIT_OK


def check_variational_symmetry(args) -> int:
    fixture = _model(args)
    system = fixture.algebra_system(fixture.spec_algebra(args.algebra))
    lagrangians = {entry.name: entry.density for entry in fixture.spec.lagrangians}
    if args.lagrangian not in lagrangians:
        raise FixtureNotFoundError(f"fixture '{fixture.id}' has no Lagrangian '{args.lagrangian}'")
    lagrangian = Lagrangian.from_text(system.frame, lagrangians[args.lagrangian])
    report = variational_symmetry_check(lagrangian, fixture.algebra(args.algebra).generator(args.generator), seed=args.seed, system_id=fixture.id)
    _emit(report)
    return _summary("check-variational-symmetry", report.euler_images, args.strict)


def check_invariance(args) -> int:
    fixture = _model(args)
    entry = fixture.spec_algebra(args.algebra)
    system = fixture.algebra_system(entry)
    algebra = fixture.algebra(args.algebra)
    fields = [algebra.generator(args.generator)] if args.generator else list(algebra.generators)
    check = equivalence_check if entry.freeze else invariance_check
    results = [check(system, field, seed=args.seed) for field in fields]
    _emit(results)
    return _summary("check-invariance", [r for result in results for r in result.equations], args.strict)


def check_invariant(args) -> int:
    fixture = _model(args)
    if args.invariant not in fixture.invariants:
        raise FixtureNotFoundError(f"fixture '{fixture.id}' has no invariant '{args.invariant}'")
    entry = next(e for e in fixture.spec.invariants if e.name == args.invariant)
    algebra = fixture.algebra(args.algebra or entry.algebra)
    report = invariant_check(fixture.invariants[args.invariant], algebra.generators, seed=args.seed, name=args.invariant)
    _emit(report)
    return _summary("check-invariant", report.generators, args.strict)


def verify_catalog(args) -> int:
    if not args.ids and not args.all:
        raise ConfigurationError("give fixture ids or --all")
    root = str(args.fixtures_dir) if args.fixtures_dir else None
    report = catalog_verify(None if args.all else args.ids, jobs=args.jobs, root=root, seed=args.seed)
    _emit(report)
    unexpected = [
        o for o in report.outcomes
        if not o.ok or (args.strict and o.expect.value == "pass" and not all(r.passed_strictly() for r in o.reports))
    ]
    print(f"catalog-verify: {report.checks} checks, {len(unexpected)} not as expected", file=sys.stderr)
    for outcome in unexpected:
        print(f"  {outcome.fixture} {outcome.kind} {outcome.name}: expected {outcome.expect.value}", file=sys.stderr)
    return EXIT_FAILED if unexpected else EXIT_OK


def _run_config(args) -> RunConfig:
    run = RunConfig()
    if args.config:
        with Path(args.config).open("rb") as handle:
            run = RunConfig.model_validate(tomllib.load(handle))
    grid = run.grid
    if args.fixture:
        grid = grid.model_copy(update={"closure": catalog_closure(args.fixture, args.closure, FixtureRepository(args.fixtures_dir))})
    if getattr(args, "cells", None):
        grid = grid.refined(args.cells)
    return run.model_copy(update={"grid": grid})


def run_simulation(args) -> int:
    run = _run_config(args)
    result = simulate(run)
    if args.csv:
        write_csv(result.diagnostics, args.csv)
    if args.gnuplot:
        write_gnuplot(result.diagnostics, args.gnuplot)
    _emit(result)
    drifts = ", ".join(f"{name}={value:.3e}" for name, value in result.diagnostics.drifts.items())
    print(f"simulate: {result.steps} steps, drifts {drifts}", file=sys.stderr)
    return EXIT_OK


def run_convergence(args) -> int:
    run = _run_config(args)
    report = convergence_study(run, args.levels)
    _emit(report)
    orders = ", ".join(f"{name}={value if isinstance(value, str) else round(value, 2)}" for name, value in report.orders.items())
    print(f"converge: orders {orders}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="Sampling seed (default from settings).")
    common.add_argument("--strict", action="store_true", help="Count probably_zero on polynomial residuals as failure.")
    common.add_argument("--fixtures-dir", type=Path, default=None, help="Fixture directory (default from settings).")
    common.add_argument("--log-level", default=None)

    parser = argparse.ArgumentParser(prog="ccl", description="Conservative closure toolkit.")
    commands = parser.add_subparsers(dest="command", required=True)

    def command(name: str, handler, help_text: str, model: bool = True) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, parents=[common], help=help_text)
        if model:
            sub.add_argument("--model", required=True, help="Fixture id or path to a fixture TOML file.")
        sub.set_defaults(handler=handler)
        return sub

    for name, handler, help_text in (
        ("check-cl", check_cl, "Verify a conserved vector against its multipliers."),
        ("check-multiplier", check_multiplier, "Euler-operator test of a multiplier set."),
    ):
        sub = command(name, handler, help_text)
        sub.add_argument("--row")
        sub.add_argument("--closure")
        sub.add_argument("--lambda", dest="lambdas", action="append", default=[])
        sub.add_argument("--density")
        sub.add_argument("--flux")

    sub = command("derive-determining", derive_determining, "Determining system of a multiplier ansatz.")
    sub.add_argument("--ansatz")

    sub = command("derive-inverse", derive_inverse, "Determining system of closures for fixed multipliers.")
    sub.add_argument("--row", dest="rows", action="append", required=True)
    sub.add_argument("--closure", dest="closures", action="append", default=[])
    sub.add_argument("--split-parameter", dest="split_parameters", action="append", default=[])

    sub = command("check-selfadjoint", check_selfadjoint, "Compare the Frechet derivative with its adjoint.")
    sub.add_argument("--closure")
    sub.add_argument("--rhs", action="append", default=[])

    sub = command("derive-selfadjoint-conditions", derive_selfadjoint_conditions, "Self-adjointness conditions on a right-hand side.")
    sub.add_argument("--rhs", required=True)
    sub.add_argument("--split", action="store_true")

    sub = command("check-variational-symmetry", check_variational_symmetry, "Variational symmetry test.")
    sub.add_argument("--algebra", required=True)
    sub.add_argument("--generator", required=True)
    sub.add_argument("--lagrangian", required=True)

    sub = command("check-invariance", check_invariance, "Infinitesimal invariance of a system.")
    sub.add_argument("--algebra", required=True)
    sub.add_argument("--generator")

    sub = command("check-invariant", check_invariant, "Differential invariant test.")
    sub.add_argument("--invariant", required=True)
    sub.add_argument("--algebra")

    sub = command("catalog-verify", verify_catalog, "Verify catalog fixtures.", model=False)
    sub.add_argument("ids", nargs="*")
    sub.add_argument("--all", action="store_true")
    sub.add_argument("--jobs", type=int, default=1)

    for name, handler, help_text in (
        ("simulate", run_simulation, "Run the shallow-water solver."),
        ("converge", run_convergence, "Grid refinement study."),
    ):
        sub = command(name, handler, help_text, model=False)
        sub.add_argument("config", nargs="?", type=Path)
        sub.add_argument("--fixture")
        sub.add_argument("--closure")
        if name == "simulate":
            sub.add_argument("--cells", type=int)
            sub.add_argument("--csv", type=Path)
            sub.add_argument("--gnuplot", type=Path)
        else:
            sub.add_argument("--levels", type=int, nargs="+")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level or settings.log_level)
    try:
        return args.handler(args)
    except _INPUT_ERRORS as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_INPUT
    except ToolkitError as error:
        logger.warning("%s aborted: %s", args.command, error)
        print(f"error: {error}", file=sys.stderr)
        return EXIT_RUNTIME


def run() -> None:
    sys.exit(main())
