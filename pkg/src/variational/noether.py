"""
Variational symmetries and their Noether multipliers.
"""

import logging

import sympy as sp

from src.expr.core import normalize
from src.expr.parser import to_dsl
from src.expr.schema import CheckReport
from src.expr.zero import is_zero
from src.jet.calculus import apply_prolonged, euler_operator, inverse_total_derivative_x, total_derivative, x_index
from src.jet.models import VectorField
from src.conservation.models import MultiplierSet
from src.variational.models import Lagrangian
from src.variational.schema import VariationalReport

logger = logging.getLogger(__name__)


def symmetry_defect(lagrangian: Lagrangian, field: VectorField) -> sp.Expr:
    """R = Q^(n)(L) + L D_i ξ^i; Q is variational iff R is a total divergence."""
    frame = lagrangian.frame
    spread = sum(total_derivative(xi, i, frame) for i, xi in enumerate(field.xi))
    return normalize(apply_prolonged(field, lagrangian.density) + lagrangian.density * spread)


def variational_symmetry_check(
    lagrangian: Lagrangian, field: VectorField, seed: int | None = None, system_id: str = ""
) -> VariationalReport:
    """
    Check that R is annihilated by every Euler operator.

    The boundary term B = (0, ..., X) is reported when X with D_x X = R can be found.
    """
    frame = lagrangian.frame
    defect = symmetry_defect(lagrangian, field)
    reports = []
    for alpha, dependent in enumerate(frame.dependents):
        image = euler_operator(defect, alpha, frame)
        verdict = is_zero(image, seed=seed)
        reports.append(CheckReport.from_verdict("check-variational-symmetry", system_id, verdict, image, f"{field.name}:E_{dependent}"))
    report = VariationalReport(system_id=system_id, field=field.name, euler_images=reports)
    if report.passed:
        flux = inverse_total_derivative_x(defect, frame, seed=seed)
        if flux is not None:
            boundary = [sp.Integer(0)] * frame.p
            boundary[x_index(frame)] = flux
            report.boundary = [to_dsl(b) for b in boundary]
    logger.info("check-variational-symmetry %s/%s: %s", system_id, field.name, report.passed)
    return report


def noether_multipliers(field: VectorField) -> MultiplierSet:
    """Multipliers η^α = φ^α − ξ^i u^α_i of the conservation law a variational symmetry yields."""
    return MultiplierSet(field.characteristic(), name=f"noether:{field.name}")
