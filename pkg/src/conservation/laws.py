"""
Verification of conservation laws in characteristic form.

A pair (Λ, Φ) is checked through the off-solution identity Λ^l Δ_l = D_j Φ^j, and a
multiplier set alone through the Euler operator: Λ^l Δ_l is a total divergence
exactly when every E_α annihilates it.
"""

import logging

import sympy as sp

from src.exceptions import FrameError
from src.expr.core import diff_partial, normalize
from src.expr.frame import Jet
from src.expr.parser import to_dsl
from src.expr.schema import CheckReport, VerdictStatus, ZeroVerdict
from src.expr.zero import is_zero
from src.jet.calculus import (
    antiderivative,
    divergence,
    euler_operator,
    inverse_total_derivative_x,
    on_solution,
    total_derivative,
)
from src.jet.models import PDESystem
from src.conservation.models import ConservedVector, MultiplierSet
from src.conservation.schema import ClosureReport, TrivialityReport

logger = logging.getLogger(__name__)


def _contraction(system: PDESystem, multipliers: MultiplierSet) -> sp.Expr:
    if len(multipliers.lambdas) != system.size:
        raise FrameError(f"{len(multipliers.lambdas)} multipliers for {system.size} equations")
    return normalize(sum(lam * eq for lam, eq in zip(multipliers.lambdas, system.equations)))


def characteristic_residual(system: PDESystem, multipliers: MultiplierSet, vector: ConservedVector) -> sp.Expr:
    """Λ^l Δ_l − D_j Φ^j, as an identity in arbitrary jet coordinates."""
    return normalize(_contraction(system, multipliers) - divergence(vector.components, system.frame))


def verify_conserved_vector(
    system: PDESystem,
    multipliers: MultiplierSet,
    vector: ConservedVector,
    seed: int | None = None,
    label: str | None = None,
) -> CheckReport:
    residual = characteristic_residual(system, multipliers, vector)
    verdict = is_zero(residual, seed=seed)
    logger.info("check-cl %s/%s: %s", system.name, label, verdict.status.value)
    return CheckReport.from_verdict("check-cl", system.name, verdict, residual, label)


def verify_multipliers(
    system: PDESystem, multipliers: MultiplierSet, seed: int | None = None, label: str | None = None
) -> list[CheckReport]:
    """One report per dependent variable: E_α(Λ^l Δ_l) must vanish identically."""
    contraction = _contraction(system, multipliers)
    reports = []
    for alpha, dependent in enumerate(system.frame.dependents):
        residual = euler_operator(contraction, alpha, system.frame)
        verdict = is_zero(residual, seed=seed)
        reports.append(CheckReport.from_verdict("check-multiplier", system.name, verdict, residual, f"{label or multipliers.name}:E_{dependent}"))
    logger.info(
        "check-multiplier %s/%s: %s", system.name, label or multipliers.name, [r.verdict.value for r in reports]
    )
    return reports


def divergence_on_solutions(system: PDESystem, vector: ConservedVector, seed: int | None = None) -> ZeroVerdict:
    """D_j Φ^j restricted to the solution space must vanish."""
    return is_zero(on_solution(divergence(vector.components, system.frame), system), seed=seed)


def _time_index(system: PDESystem) -> int:
    frame = system.frame
    return frame.independents.index("t") if "t" in frame.independents else 0


def reconstruct_flux(system: PDESystem, multipliers: MultiplierSet, density: sp.Expr, seed: int | None = None) -> sp.Expr | None:
    """
    Complete a density to a conserved vector: X with D_x X = Λ^l Δ_l − D_t ρ.

    Raises:
        FrameError: Outside 1+1 dimensions.
    """
    if system.frame.p != 2:
        raise FrameError("flux reconstruction needs exactly two independent variables")
    remainder = _contraction(system, multipliers) - total_derivative(density, _time_index(system), system.frame)
    return inverse_total_derivative_x(remainder, system.frame, seed=seed)


def density_from_multipliers(system: PDESystem, multipliers: MultiplierSet) -> sp.Expr | None:
    """
    Density ρ with ∂ρ/∂u^α = Λ^α for systems of the form u^α_t + (no t-derivatives) = 0.

    Only multipliers of order zero are handled; ``None`` otherwise.
    """
    frame = system.frame
    t = _time_index(system)
    if system.size != frame.q:
        return None
    for alpha, eq in enumerate(system.equations):
        u_t = frame.symbol(Jet(alpha, frame.multi_index(frame.independents[t])))
        if diff_partial(eq, u_t) != 1:
            return None
    if any(jet.J.order > 0 for lam in multipliers.lambdas for jet in frame.jets_in(lam).values()):
        return None
    density = sp.Integer(0)
    for alpha, lam in enumerate(multipliers.lambdas):
        u = frame.jet(alpha)
        piece = antiderivative(lam - diff_partial(density, u), u)
        if piece is None:
            return None
        density = normalize(density + piece)
    return density


def verify_closure_against_multipliers(
    system: PDESystem,
    multipliers: MultiplierSet,
    density: sp.Expr | None = None,
    seed: int | None = None,
    label: str | None = None,
) -> ClosureReport:
    """
    Check that a closed system keeps the conservation law of ``multipliers``.

    On success the conserved density (given, or integrated from the multipliers)
    is completed with a reconstructed flux when one can be found.
    """
    reports = verify_multipliers(system, multipliers, seed=seed, label=label)
    report = ClosureReport(system_id=system.name, label=label, multipliers=reports)
    if not report.passed or system.frame.p != 2:
        return report
    density = density_from_multipliers(system, multipliers) if density is None else density
    if density is None:
        return report
    report.density = to_dsl(density)
    flux = reconstruct_flux(system, multipliers, density, seed=seed)
    if flux is not None:
        report.flux = to_dsl(flux)
    return report


def triviality_candidate(system: PDESystem, vector: ConservedVector, seed: int | None = None) -> TrivialityReport:
    """
    Sufficient triviality test: D_j Φ^j ≡ 0 off-solution, or every Φ^j vanishing on solutions.

    Raises:
        NotEvolutionaryError: If the system has no solve form.
    """
    null = is_zero(divergence(vector.components, system.frame), seed=seed)
    vanishing = ZeroVerdict(status=VerdictStatus.PROVEN_ZERO)
    for component in vector.components:
        verdict = is_zero(on_solution(component, system), seed=seed)
        if verdict.status == VerdictStatus.NONZERO:
            vanishing = verdict
            break
        if verdict.status == VerdictStatus.PROBABLY_ZERO:
            vanishing = verdict
    return TrivialityReport(null_divergence=null, vanishes_on_solutions=vanishing)
