"""
Linearization and self-adjointness.

A system Δ = 0 with as many equations as dependent variables is Euler-Lagrange for
some Lagrangian exactly when its Fréchet derivative equals its formal adjoint.
"""

import logging

import sympy as sp
from sympy.core.function import AppliedUndef

from src.exceptions import FrameError
from src.expr.core import diff_partial
from src.expr.frame import Frame
from src.expr.schema import CheckReport, VerdictStatus
from src.expr.zero import is_zero
from src.jet.models import PDESystem
from src.conservation.determining import assemble_conditions
from src.conservation.models import DeterminingSystem
from src.variational.models import LinOpMatrix
from src.variational.schema import SelfAdjointReport

logger = logging.getLogger(__name__)


def linearize(frame: Frame, expressions) -> LinOpMatrix:
    op = LinOpMatrix(frame, len(expressions), frame.q)
    for mu, expr in enumerate(expressions):
        for symbol, jet in frame.jets_in(expr).items():
            coefficient = diff_partial(expr, symbol)
            if coefficient != 0:
                op.add(mu, jet.alpha, jet.J, coefficient)
    return op


def frechet(system: PDESystem) -> LinOpMatrix:
    """(D_Δ)_{μν} = Σ_J ∂Δ_μ/∂u^ν_J D_J over the jet coordinates present."""
    return linearize(system.frame, system.equations)


def adjoint(op: LinOpMatrix) -> LinOpMatrix:
    return op.adjoint()


def is_self_adjoint(system: PDESystem, seed: int | None = None) -> SelfAdjointReport:
    """
    Zero-test every coefficient of D_Δ − D*_Δ.

    Raises:
        FrameError: If the system is not square.
    """
    if system.size != system.frame.q:
        raise FrameError(f"self-adjointness needs a square system, got {system.size}x{system.frame.q}")
    linear = frechet(system)
    deficit = linear - linear.adjoint()
    reports = []
    for mu, nu, J, coefficient in deficit.coefficients():
        verdict = is_zero(coefficient, seed=seed)
        reports.append(
            CheckReport.from_verdict("check-selfadjoint", system.name, verdict, coefficient, f"({mu},{nu}){list(J.orders)}")
        )
    status = VerdictStatus.PROVEN_ZERO
    for report in reports:
        if report.verdict == VerdictStatus.NONZERO:
            status = VerdictStatus.NONZERO
            break
        if report.verdict == VerdictStatus.PROBABLY_ZERO:
            status = VerdictStatus.PROBABLY_ZERO
    logger.info("check-selfadjoint %s: %s", system.name, status.value)
    return SelfAdjointReport(system_id=system.name, verdict=status, coefficients=reports, deficit=deficit.export())


def selfadjointness_conditions(frame: Frame, rhs: sp.Expr, split: bool = False) -> DeterminingSystem:
    """
    Conditions on a right-hand side g for D_g − D*_g = 0.

    Each nonzero operator coefficient becomes one equation, stripped of its numeric
    content. With ``split`` the equations are also split over jet coordinates that
    are not arguments of the unknowns in ``rhs``.
    """
    linear = linearize(frame, [rhs])
    deficit = linear - linear.adjoint()
    coefficients = [coefficient for _, _, _, coefficient in deficit.coefficients()]
    unknowns = {atom.func.__name__ for atom in rhs.atoms(AppliedUndef)}
    arguments = {a for atom in rhs.atoms(AppliedUndef) for a in atom.args}
    candidates = sorted(
        {s for c in coefficients for s in frame.jets_in(c) if s not in arguments}, key=lambda s: s.name
    ) if split else []
    return assemble_conditions(coefficients, candidates, unknowns)
