"""
Batch verification of the fixture library.

Every entry of a fixture is turned into one :class:`CheckOutcome` by the
operation that certifies it. Fixtures run independently, optionally in a process
pool; outcomes are always returned sorted by fixture id and in file order within
a fixture.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import sympy as sp

from src.exceptions import ToolkitError
from src.expr.core import normalize, substitute
from src.expr.parser import parse, to_dsl
from src.expr.schema import CheckReport, VerdictStatus
from src.expr.zero import is_zero
from src.conservation.determining import (
    generate_determining_system,
    inverse_determining_system,
    satisfies,
    systems_equivalent,
)
from src.conservation.laws import verify_closure_against_multipliers, verify_conserved_vector, verify_multipliers
from src.conservation.models import DeterminingSystem, MultiplierSet
from src.variational.models import Lagrangian
from src.variational.noether import noether_multipliers, variational_symmetry_check
from src.variational.operators import is_self_adjoint, selfadjointness_conditions
from src.symmetry.invariance import (
    equivalence_check,
    freeze,
    invariance_check,
    invariant_check,
    invariant_representation_check,
    map_check,
)
from src.symmetry.models import AffineMap
from src.catalog.models import ModelFixture, specialize
from src.catalog.repos import FixtureRepository
from src.catalog.schema import CatalogReport, CheckOutcome, Expectation

logger = logging.getLogger(__name__)


def _outcome(fixture: ModelFixture, kind: str, name: str, expect: Expectation, reports, flag=None, **detail) -> CheckOutcome:
    passed = all(report.passed for report in reports)
    if expect == Expectation.FAIL:
        ok = any(report.verdict == VerdictStatus.NONZERO and report.witness is not None for report in reports)
    else:
        ok = passed
    return CheckOutcome(
        fixture=fixture.id, kind=kind, name=name, expect=expect, passed=passed, ok=ok, flag=flag, reports=list(reports), detail=detail
    )


def _bindings(fixture: ModelFixture, frame, solution: dict[str, str]) -> dict:
    return {frame.unknown(name): parse(value, frame) for name, value in solution.items()}


def _satisfaction(task: str, fixture: ModelFixture, system: DeterminingSystem, bindings, seed) -> list[CheckReport]:
    verdicts = satisfies(system, bindings, seed=seed)
    return [
        CheckReport.from_verdict(task, fixture.id, verdict, substitute(eq, bindings), f"eq{k + 1}")
        for k, (eq, verdict) in enumerate(zip(system.equations, verdicts))
    ]


def _rows(fixture: ModelFixture, seed):
    for name, row in fixture.rows.items():
        entry = row.entry
        if entry.target_only:
            continue
        system = fixture.row_system(name)
        reports = verify_multipliers(system, row.multipliers, seed=seed, label=name)
        multiplier_expect = entry.expect if row.vector is None else Expectation.PASS
        yield _outcome(fixture, "multiplier", name, multiplier_expect, reports, entry.flag)
        if row.vector is not None:
            report = verify_conserved_vector(system, row.multipliers, row.vector, seed=seed, label=name)
            yield _outcome(fixture, "cl", name, entry.expect, [report], entry.flag)


def _closures(fixture: ModelFixture, seed):
    for name, closure in fixture.closures.items():
        for target in closure.entry.preserves:
            row = fixture.row(target)
            report = verify_closure_against_multipliers(closure.system, row.multipliers, seed=seed, label=target)
            yield _outcome(
                fixture, "closure", f"{name}/{target}", closure.entry.expect, report.multipliers,
                density=report.density, flux=report.flux,
            )


def _algebras(fixture: ModelFixture, seed):
    lagrangians = {entry.name: entry for entry in fixture.spec.lagrangians}
    for entry in fixture.spec.algebras:
        algebra = fixture.algebra(entry.name)
        system = fixture.algebra_system(entry)
        check = equivalence_check if entry.freeze else invariance_check
        reports = [r for field in algebra.generators for r in check(system, field, seed=seed).equations]
        yield _outcome(fixture, "invariance", entry.name, entry.expect, reports)
        if entry.lagrangian is None:
            continue
        lagrangian = Lagrangian.from_text(system.frame, lagrangians[entry.lagrangian].density)
        generator_entries = fixture.spec_algebra(entry.base).generators if entry.base else entry.generators
        for generator in generator_entries:
            field = algebra.generator(generator.name)
            if generator.variational is not None:
                report = variational_symmetry_check(lagrangian, field, seed=seed, system_id=fixture.id)
                yield _outcome(
                    fixture, "variational", f"{entry.name}/{field.name}", generator.variational, report.euler_images,
                    boundary=report.boundary,
                )
            if generator.noether is not None:
                yield _noether(fixture, system, field, generator.noether, generator.noether_factor, seed)


def _noether(fixture: ModelFixture, system, field, row_name: str, factor: str, seed) -> CheckOutcome:
    multipliers = noether_multipliers(field)
    reports = verify_multipliers(system, multipliers, seed=seed, label=f"noether:{field.name}")
    if row_name:
        row = fixture.row(row_name)
        scale = parse(factor, system.frame)
        for eta, lam in zip(multipliers.lambdas, row.multipliers.lambdas):
            residual = normalize(eta - scale * lam)
            reports.append(CheckReport.from_verdict("noether-match", fixture.id, is_zero(residual, seed=seed), residual, row_name))
    return _outcome(fixture, "noether", field.name, Expectation.PASS, reports, eta=multipliers.to_dsl())


def _invariants(fixture: ModelFixture, seed):
    for entry in fixture.spec.invariants:
        algebra = fixture.algebra(entry.algebra)
        report = invariant_check(fixture.invariants[entry.name], algebra.generators, seed=seed, name=entry.name)
        yield _outcome(fixture, "invariant", entry.name, entry.expect, report.generators)


def _representations(fixture: ModelFixture, seed):
    for entry in fixture.spec.representations:
        system = fixture.system_for(entry.system)
        frame = system.frame.extend(parameters=tuple(entry.invariants))
        gamma = [[parse(cell, frame) for cell in row] for row in entry.gamma]
        rhs = [parse(text, frame) for text in entry.rhs]
        invariants = {name: fixture.invariants[name] for name in entry.invariants}
        report = invariant_representation_check(system, gamma, rhs, invariants, seed=seed)
        yield _outcome(fixture, "representation", entry.name, entry.expect, report.rows)


def _maps(fixture: ModelFixture, seed):
    for entry in fixture.spec.maps:
        source, target = fixture.system_for(entry.source), fixture.system_for(entry.target)
        if entry.freeze:
            source, target = freeze(source, tuple(entry.freeze)), freeze(target, tuple(entry.freeze))
        transformation = AffineMap.from_text(source.frame, entry.scales, entry.shifts, entry.name)
        report = map_check(source, target, transformation, entry.signs, seed=seed)
        yield _outcome(fixture, "map", entry.name, entry.expect, report.rows)


def _lagrangians(fixture: ModelFixture, seed):
    for entry in fixture.spec.lagrangians:
        system = fixture.system_for(entry.system)
        lagrangian = Lagrangian.from_text(system.frame, entry.density)
        reports = []
        for alpha, (image, eq) in enumerate(zip(lagrangian.euler_lagrange(), system.equations)):
            residual = normalize(image - eq)
            reports.append(CheckReport.from_verdict("check-lagrangian", fixture.id, is_zero(residual, seed=seed), residual, f"E_{system.frame.dependents[alpha]}"))
        yield _outcome(fixture, "lagrangian", entry.name, entry.expect, reports, entry.flag)


def _selfadjoint(fixture: ModelFixture, seed):
    for entry in fixture.spec.selfadjoint:
        system = fixture.system
        if entry.rhs:
            rhs = [parse(text, system.frame) for text in entry.rhs]
            system = system.with_equations([eq - g for eq, g in zip(system.equations, rhs)], solve_form=(), name=f"{fixture.id}:{entry.name}")
        report = is_self_adjoint(system, seed=seed)
        yield _outcome(fixture, "selfadjoint", entry.name, entry.expect, report.coefficients)


def _conditions(fixture: ModelFixture, seed):
    frame = fixture.frame
    for entry in fixture.spec.conditions:
        conditions = selfadjointness_conditions(frame, parse(entry.rhs, frame), split=entry.split)
        for k, solution in enumerate(entry.solutions):
            reports = _satisfaction("derive-selfadjoint-conditions", fixture, conditions, _bindings(fixture, frame, solution), seed)
            yield _outcome(fixture, "conditions", f"{entry.name}/solution{k + 1}", Expectation.PASS, reports, equations=conditions.export().equations)


def _determining(fixture: ModelFixture, seed):
    frame = fixture.frame
    for entry in fixture.spec.determining:
        ansatz = MultiplierSet.from_text(frame, entry.ansatz, entry.declared_args, entry.name)
        emitted = generate_determining_system(fixture.system, ansatz)
        if entry.published and entry.compare:
            published = [parse(text, frame) for text in entry.published]
            same = systems_equivalent(list(emitted.equations), published, seed=seed)
            report = CheckReport(
                task="derive-determining",
                system_id=fixture.id,
                label=f"{entry.name}:published",
                verdict=VerdictStatus.PROBABLY_ZERO if same else VerdictStatus.NONZERO,
                residual_text="rank comparison",
                witness=None if same else {},
            )
            yield _outcome(fixture, "determining", f"{entry.name}/published", Expectation.PASS, [report], equations=emitted.export().equations)
        scoped = emitted
        if entry.scope == "unknown_free":
            arbitrary = {name for name, _ in frame.unknowns} - set(emitted.unknowns)
            kept = tuple(eq for eq in emitted.equations if not any(f.func.__name__ in arbitrary for f in eq.atoms(sp.Function)))
            scoped = DeterminingSystem(kept, emitted.unknowns, emitted.split_coords, emitted.retained)
        if entry.published:
            published = DeterminingSystem(tuple(parse(text, frame) for text in entry.published), emitted.unknowns)
        for k, solution in enumerate(entry.solutions):
            bindings = _bindings(fixture, frame, solution)
            reports = _satisfaction("derive-determining", fixture, scoped, bindings, seed)
            if entry.published:
                reports += _satisfaction("derive-determining", fixture, published, bindings, seed)
            yield _outcome(fixture, "determining", f"{entry.name}/solution{k + 1}", Expectation.PASS, reports)


def _inverse(fixture: ModelFixture, seed):
    frame = fixture.frame
    for entry in fixture.spec.inverse:
        for row_name in entry.multipliers:
            system = inverse_determining_system(fixture.system, fixture.row(row_name).multipliers)
            for name, expect in [(c, Expectation.PASS) for c in entry.closures] + [(c, Expectation.FAIL) for c in entry.violators]:
                closure = fixture.closure(name)
                bindings = {frame.unknown(u): rhs for u, rhs in zip(fixture.spec.closes, closure.rhs)}
                reports = _satisfaction("derive-inverse", fixture, system, bindings, seed)
                yield _outcome(fixture, "inverse", f"{entry.name}/{row_name}/{name}", expect, reports, equations=len(system))


_STAGES = (_rows, _closures, _determining, _inverse, _algebras, _invariants, _representations, _maps, _lagrangians, _selfadjoint, _conditions)


def verify_fixture(fixture_id: str, root: str | None = None, seed: int | None = None) -> list[CheckOutcome]:
    """Run every check a fixture names. Errors become failed outcomes instead of aborting the batch."""
    fixture = FixtureRepository(Path(root) if root else None).load_model(fixture_id)
    outcomes = []
    for stage in _STAGES:
        try:
            outcomes.extend(stage(fixture, seed))
        except ToolkitError as error:
            logger.warning("fixture %s: %s failed with %s", fixture_id, stage.__name__.strip("_"), error)
            outcomes.append(
                CheckOutcome(
                    fixture=fixture_id, kind=stage.__name__.strip("_"), name="error", expect=Expectation.PASS,
                    passed=False, ok=False, detail={"error": str(error)},
                )
            )
    logger.info("fixture %s: %d checks, %d as expected", fixture_id, len(outcomes), sum(o.ok for o in outcomes))
    return outcomes


def catalog_verify(ids=None, jobs: int = 1, root: str | None = None, seed: int | None = None) -> CatalogReport:
    """
    Verify the given fixtures (all of them by default).

    Args:
        ids: Fixture ids; ``None`` means every fixture in the repository.
        jobs (int): Worker processes; 1 runs in-process.
    """
    repository = FixtureRepository(Path(root) if root else None)
    ids = sorted(ids or repository.ids())
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(verify_fixture, ids, [root] * len(ids), [seed] * len(ids)))
    else:
        results = [verify_fixture(fixture_id, root, seed) for fixture_id in ids]
    return CatalogReport(outcomes=[outcome for batch in results for outcome in batch])
