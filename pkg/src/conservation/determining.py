"""
Determining systems for multipliers (direct mode) and for closures (inverse mode).

Both modes compute the Euler images of Λ^l Δ_l and split them as polynomials in
the parametric jet coordinates, i.e. every coordinate that is neither a declared
argument of the multipliers nor an argument of some unknown function. Coordinates
the expression is not polynomial in are kept symbolically.
"""

import logging

import numpy as np
import sympy as sp
from sympy.core.function import AppliedUndef

from config.general import settings
from src.expr.core import normalize, substitute
from src.expr.frame import Frame
from src.expr.schema import ZeroVerdict
from src.expr.zero import is_zero
from src.jet.calculus import euler_operator
from src.jet.models import PDESystem
from src.conservation.models import DeterminingSystem, MultiplierSet

logger = logging.getLogger(__name__)


def _unknown_arguments(exprs) -> set[sp.Symbol]:
    args = set()
    for expr in exprs:
        for atom in expr.atoms(AppliedUndef):
            args |= {a for a in atom.args if isinstance(a, sp.Symbol)}
    return args


def _canonical(eq: sp.Expr) -> sp.Expr:
    eq = normalize(normalize(eq).as_content_primitive()[1])
    return -eq if eq.could_extract_minus_sign() else eq


def split(expr: sp.Expr, coords) -> tuple[list[sp.Expr], list[sp.Symbol], list[sp.Symbol]]:
    """
    Coefficients of ``expr`` as a polynomial in ``coords``.

    Returns:
        tuple: (coefficients, coordinates split over, coordinates retained).
    """
    numerator, _ = sp.fraction(sp.together(normalize(expr)))
    numerator = sp.expand(numerator)
    present = sorted((c for c in coords if numerator.has(c)), key=lambda s: s.name)
    usable = [c for c in present if numerator.is_polynomial(c)]
    retained = [c for c in present if c not in usable]
    if numerator == 0:
        return [], usable, retained
    if not usable:
        return [numerator], usable, retained
    coefficients = sp.Poly(numerator, *usable).coeffs()
    return [normalize(c) for c in coefficients], usable, retained


def assemble_conditions(expressions, candidates, unknowns) -> DeterminingSystem:
    equations, used, kept = [], set(), set()
    for expr in expressions:
        coefficients, usable, retained = split(expr, candidates)
        used |= set(usable)
        kept |= set(retained)
        for coefficient in coefficients:
            eq = _canonical(coefficient)
            if eq != 0 and eq not in equations:
                equations.append(eq)
    equations.sort(key=sp.default_sort_key)
    return DeterminingSystem(
        tuple(equations),
        tuple(sorted(unknowns)),
        tuple(sorted(used, key=lambda s: s.name)),
        tuple(sorted(kept - used, key=lambda s: s.name)),
    )


def _contraction(system: PDESystem, multipliers: MultiplierSet) -> sp.Expr:
    return normalize(sum(lam * eq for lam, eq in zip(multipliers.lambdas, system.equations)))


def _euler_images(system: PDESystem, multipliers: MultiplierSet) -> list[sp.Expr]:
    contraction = _contraction(system, multipliers)
    return [euler_operator(contraction, alpha, system.frame) for alpha in range(system.frame.q)]


def _parametric(frame: Frame, exprs, excluded: set[sp.Symbol]) -> list[sp.Symbol]:
    found = set()
    for expr in exprs:
        found |= {s for s in frame.jets_in(expr) if s not in excluded}
    return sorted(found, key=lambda s: s.name)


def generate_determining_system(system: PDESystem, ansatz: MultiplierSet) -> DeterminingSystem:
    """
    Determining equations for multipliers of the form given by ``ansatz``.

    ``ansatz`` components are unknown functions of its declared arguments; the
    emitted system is linear and homogeneous in their partials.
    """
    images = _euler_images(system, ansatz)
    excluded = set(ansatz.declared_args) | _unknown_arguments(list(system.equations) + list(ansatz.lambdas))
    candidates = _parametric(system.frame, images, excluded)
    unknowns = {atom.func.__name__ for lam in ansatz.lambdas for atom in lam.atoms(AppliedUndef)}
    result = assemble_conditions(images, candidates, unknowns)
    logger.info("determining system for %s: %d equations, split over %s", system.name, len(result), [s.name for s in result.split_coords])
    return result


def inverse_determining_system(
    system: PDESystem, multipliers: MultiplierSet, split_parameters: tuple[str, ...] = ()
) -> DeterminingSystem:
    """
    Determining equations for the closure unknowns of ``system`` given fixed multipliers.

    ``split_parameters`` names the symbolic constants the multipliers are linear in
    (c_1..c_4); the identity must hold for all of them, so they are split over too.
    """
    images = _euler_images(system, multipliers)
    excluded = _unknown_arguments(system.equations)
    candidates = _parametric(system.frame, images, excluded) + [sp.Symbol(name) for name in split_parameters]
    unknowns = {atom.func.__name__ for eq in system.equations for atom in eq.atoms(AppliedUndef)}
    result = assemble_conditions(images, candidates, unknowns)
    logger.info("inverse determining system for %s: %d equations", system.name, len(result))
    return result


def _linearize(equations):
    atoms = set()
    for eq in equations:
        atoms |= eq.atoms(sp.Derivative) | eq.atoms(AppliedUndef)
    ordered = sorted(atoms, key=sp.default_sort_key)
    dummies = [sp.Dummy(f"p{k}") for k in range(len(ordered))]
    mapping = dict(zip(ordered, dummies))
    linear = [eq.xreplace(mapping) for eq in equations]
    return linear, ordered, dummies


def systems_equivalent(first, second, seed: int | None = None, points: int = 5) -> bool:
    """
    Numerical test that two systems linear in unknown-function partials have the same
    solution space: at seeded random points the coefficient matrices of both and of
    their union must all have equal rank.
    """
    first, second = [normalize(e) for e in first], [normalize(e) for e in second]
    linear, ordered, dummies = _linearize(first + second)
    matrix, rhs = sp.linear_eq_to_matrix(linear, dummies)
    augmented = matrix.row_join(rhs)
    symbols = sorted(augmented.free_symbols, key=lambda s: s.name)
    function = sp.lambdify(symbols, augmented, modules=["scipy", "numpy"])
    rng = np.random.default_rng(settings.seed if seed is None else seed)
    n = len(first)
    for _ in range(points):
        values = rng.uniform(settings.sample_low, settings.sample_high, size=len(symbols))
        numeric = np.asarray(function(*values), dtype=float)
        ranks = [np.linalg.matrix_rank(block, tol=1e-8) for block in (numeric[:n], numeric[n:], numeric)]
        if len(set(ranks)) != 1:
            logger.info("systems differ: ranks %s", ranks)
            return False
    return True


def satisfies(system: DeterminingSystem, bindings, seed: int | None = None) -> list[ZeroVerdict]:
    """Substitute a candidate solution into every equation and zero-test the results."""
    return [is_zero(substitute(eq, bindings), seed=seed) for eq in system.equations]
