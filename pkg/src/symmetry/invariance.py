"""
Infinitesimal invariance of systems, differential invariants and invariant
representations of systems.
"""

import logging

import sympy as sp

from src.exceptions import FrameError
from src.expr.core import normalize, substitute
from src.expr.frame import Jet
from src.expr.parser import to_dsl
from src.expr.schema import CheckReport
from src.expr.zero import is_zero
from src.jet.calculus import apply_prolonged, on_solution
from src.jet.models import PDESystem, VectorField
from src.symmetry.models import AffineMap
from src.symmetry.schema import InvarianceReport, InvariantReport, MapReport, RepresentationReport

logger = logging.getLogger(__name__)


def invariance_check(system: PDESystem, field: VectorField, seed: int | None = None) -> InvarianceReport:
    """
    Infinitesimal invariance criterion: Q^(n)(Δ_l) must vanish on solutions, n being
    the order of Δ_l.

    Raises:
        NotEvolutionaryError: If the system has no solve form.
    """
    reports = []
    for l, equation in enumerate(system.equations):
        image = apply_prolonged(field, equation, system.frame.order(equation))
        residual = on_solution(image, system)
        verdict = is_zero(residual, seed=seed)
        reports.append(CheckReport.from_verdict("check-invariance", system.name, verdict, residual, f"{field.name}:eq{l + 1}"))
    report = InvarianceReport(system_id=system.name, field=field.name, equations=reports)
    logger.info("check-invariance %s/%s: %s", system.name, field.name, report.passed)
    return report


def invariant_check(invariant: sp.Expr, generators, seed: int | None = None, name: str = "") -> InvariantReport:
    """Off-solution check that every prolonged generator annihilates ``invariant``."""
    reports = []
    for field in generators:
        residual = apply_prolonged(field, invariant)
        verdict = is_zero(residual, seed=seed)
        reports.append(CheckReport.from_verdict("check-invariant", name, verdict, residual, field.name))
    report = InvariantReport(invariant=name or to_dsl(invariant), generators=reports)
    logger.info("check-invariant %s: %s", report.invariant, report.passed)
    return report


def invariant_representation_check(
    system: PDESystem,
    gamma,
    rhs_tilde,
    invariants: dict[str, sp.Expr],
    seed: int | None = None,
) -> RepresentationReport:
    """
    Verify Γ^κ_l Δ_κ = Δ̃_l(I_1, ..., I_N) after substituting the invariant definitions.

    Args:
        system (PDESystem): System Δ.
        gamma: L x L matrix of jet expressions, ``gamma[l][kappa]``.
        rhs_tilde: L expressions in the invariant symbols.
        invariants (dict[str, sp.Expr]): Invariant names bound to their definitions.
    """
    if len(gamma) != system.size or any(len(row) != system.size for row in gamma) or len(rhs_tilde) != system.size:
        raise FrameError(f"representation of '{system.name}' needs a {system.size}x{system.size} matrix")
    bindings = {sp.Symbol(name): definition for name, definition in invariants.items()}
    reports = []
    for l, (row, target) in enumerate(zip(gamma, rhs_tilde)):
        combination = sum(g * eq for g, eq in zip(row, system.equations))
        residual = normalize(combination - substitute(target, bindings))
        verdict = is_zero(residual, seed=seed)
        reports.append(CheckReport.from_verdict("check-representation", system.name, verdict, residual, f"row{l + 1}"))
    report = RepresentationReport(system_id=system.name, rows=reports)
    logger.info("check-representation %s: %s", system.name, report.passed)
    return report


def _requires_consequences(expr: sp.Expr, system: PDESystem) -> list[str]:
    frame = system.frame
    leads = [frame.coord(lead) for lead in system.leading]
    found = []
    for symbol, jet in frame.jets_in(expr).items():
        for lead in leads:
            if lead.alpha == jet.alpha and jet.J.dominates(lead.J) and jet.J != lead.J:
                found.append(symbol.name)
    return sorted(found)


def equivalence_check(system: PDESystem, field: VectorField, seed: int | None = None) -> InvarianceReport:
    """
    Invariance of a class of equations under an equivalence generator.

    The arbitrary elements of the class are frozen as frame parameters and
    transformed by the generator's ``extra`` components. Frozen symbols have no
    total derivatives, so the check refuses fields whose components depend on
    them and images that would need differential consequences of the solve form.

    Raises:
        FrameError: If the frozen elements would have to be differentiated.
    """
    frozen = {symbol for symbol, _ in field.extra}
    for component in field.xi + field.phi:
        if component.free_symbols & frozen:
            raise FrameError(f"generator '{field.name}' depends on frozen elements of the class")
    if any(rhs.free_symbols & frozen for rhs in system.leading.values()):
        for equation in system.equations:
            needed = _requires_consequences(apply_prolonged(field, equation, system.frame.order(equation)), system)
            if needed:
                raise FrameError(f"checking '{field.name}' would differentiate frozen elements through {needed}")
    return invariance_check(system, field, seed=seed)


def freeze(system: PDESystem, names: tuple[str, ...]) -> PDESystem:
    """Replace the unknowns ``names`` by frame parameters of the same name."""
    frame = system.frame
    bindings = {frame.unknown(name): sp.Symbol(name) for name in names}
    frozen = frame.extend(parameters=names, drop_unknowns=names)
    equations = [substitute(eq, bindings) for eq in system.equations]
    solve_form = [(lead, substitute(rhs, bindings)) for lead, rhs in system.solve_form]
    return system.with_equations(equations, solve_form, frame=frozen)


def map_check(
    source: PDESystem,
    target: PDESystem,
    transformation: AffineMap,
    signs,
    seed: int | None = None,
) -> MapReport:
    """
    Check that ``transformation`` maps ``source`` into ``target``: written in the
    new variables, target equation l must equal σ_l times source equation l.
    """
    if source.size != target.size or len(signs) != source.size:
        raise FrameError("map check needs systems and signs of equal length")
    reports = []
    for l, (old, new, sign) in enumerate(zip(source.equations, target.equations, signs)):
        residual = normalize(transformation.pullback(new, target.frame) - sign * old)
        verdict = is_zero(residual, seed=seed)
        reports.append(CheckReport.from_verdict("check-map", source.name, verdict, residual, f"{transformation.name}:eq{l + 1}"))
    report = MapReport(system_id=source.name, transformation=transformation.name, signs=list(signs), rows=reports)
    logger.info("check-map %s -> %s under %s: %s", source.name, target.name, transformation.name, report.passed)
    return report
