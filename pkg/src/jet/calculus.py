"""
Differential operators of jet space.

All operators take and return normalized sympy expressions. Total derivatives and
prolongations are memoized; the caches key on immutable frames, systems and
vector fields, so they are safe to share between threads.
"""

import itertools
import logging
from functools import lru_cache

import sympy as sp
from sympy.core.function import AppliedUndef

from src.exceptions import NotEvolutionaryError
from src.expr.core import diff_partial, normalize, primitive, resolve_primitives, substitute
from src.expr.frame import Frame, Jet, MultiIndex
from src.expr.zero import is_zero
from src.jet.models import PDESystem, VectorField

logger = logging.getLogger(__name__)

_MAX_PEELS = 64


@lru_cache(maxsize=4096)
def _total_derivative(expr: sp.Expr, i: int, frame: Frame) -> sp.Expr:
    result = diff_partial(expr, frame.independent_symbols[i])
    for symbol, jet in frame.jets_in(expr).items():
        raised = frame.symbol(Jet(jet.alpha, jet.J.raised(i)))
        result += diff_partial(expr, symbol) * raised
    return normalize(result)


def total_derivative(expr: sp.Expr, i: int, frame: Frame) -> sp.Expr:
    """D_i expr: chain rule through every jet coordinate, unknowns included."""
    return _total_derivative(normalize(expr), i, frame)


def total_derivative_multi(expr: sp.Expr, J: MultiIndex, frame: Frame) -> sp.Expr:
    """D_J expr, applied one independent at a time."""
    for i, count in enumerate(J.orders):
        for _ in range(count):
            expr = total_derivative(expr, i, frame)
    return expr


def divergence(components, frame: Frame) -> sp.Expr:
    return normalize(sum(total_derivative(c, i, frame) for i, c in enumerate(components)))


def euler_operator(expr: sp.Expr, alpha: int, frame: Frame) -> sp.Expr:
    """
    Euler operator E_α = Σ_J (−D)_J ∂/∂u^α_J.

    Only multi-indices whose jet coordinate actually occurs in ``expr`` contribute,
    so the sum stops at the expression's own order.
    """
    expr = normalize(expr)
    result = sp.Integer(0)
    for symbol, jet in frame.jets_in(expr).items():
        if jet.alpha != alpha:
            continue
        term = total_derivative_multi(diff_partial(expr, symbol), jet.J, frame)
        result += (-1) ** jet.J.order * term
    return normalize(result)


def multi_indices(p: int, order: int) -> list[MultiIndex]:
    """All multi-indices of length ``p`` with |J| <= ``order``, sorted by order."""
    found = [
        MultiIndex(orders)
        for orders in itertools.product(range(order + 1), repeat=p)
        if sum(orders) <= order
    ]
    return sorted(found, key=lambda J: (J.order, tuple(-j for j in J.orders)))


@lru_cache(maxsize=256)
def _prolong(field: VectorField, order: int) -> tuple[tuple[sp.Symbol, sp.Expr], ...]:
    frame = field.frame
    coefficients: dict[tuple[int, MultiIndex], sp.Expr] = {}
    for J in multi_indices(frame.p, order):
        for alpha in range(frame.q):
            if J.order == 0:
                coefficients[alpha, J] = field.phi[alpha]
                continue
            i = next(k for k, j in enumerate(J.orders) if j > 0)
            parent = J - MultiIndex.zero(frame.p).raised(i)
            coefficients[alpha, J] = prolongation_step(field, alpha, parent, i, coefficients[alpha, parent])
    return tuple((frame.symbol(Jet(alpha, J)), value) for (alpha, J), value in coefficients.items())


def prolongation_step(field: VectorField, alpha: int, parent: MultiIndex, i: int, parent_value: sp.Expr) -> sp.Expr:
    """φ^{α,J+1_i} = D_i φ^{α,J} − Σ_k (D_i ξ^k) u^α_{J+1_k}."""
    frame = field.frame
    value = total_derivative(parent_value, i, frame)
    for k, xi in enumerate(field.xi):
        if xi != 0:
            value -= total_derivative(xi, i, frame) * frame.symbol(Jet(alpha, parent.raised(k)))
    return normalize(value)


def prolong(field: VectorField, order: int) -> dict[sp.Symbol, sp.Expr]:
    """Coefficients of the ``order``-th prolongation, keyed by jet symbol (order 0 included)."""
    return dict(_prolong(field, order))


def apply_prolonged(field: VectorField, expr: sp.Expr, order: int | None = None) -> sp.Expr:
    """Q^{(n)}(expr); ``order`` defaults to the jet order of ``expr``."""
    frame = field.frame
    expr = normalize(expr)
    order = frame.order(expr) if order is None else order
    coefficients = prolong(field, order)
    result = sum(xi * diff_partial(expr, x) for xi, x in zip(field.xi, frame.independent_symbols))
    for symbol in frame.jets_in(expr):
        result += coefficients[symbol] * diff_partial(expr, symbol)
    for symbol, component in field.extra:
        result += component * diff_partial(expr, symbol)
    return normalize(result)


@lru_cache(maxsize=1024)
def _consequence(system: PDESystem, lead: sp.Symbol, delta: MultiIndex) -> sp.Expr:
    if delta.order == 0:
        return system.leading[lead]
    i = next(k for k, j in enumerate(delta.orders) if j > 0)
    lowered = delta - MultiIndex.zero(system.frame.p).raised(i)
    return total_derivative(_consequence(system, lead, lowered), i, system.frame)


def on_solution(expr: sp.Expr, system: PDESystem) -> sp.Expr:
    """
    Restrict ``expr`` to the solution space of ``system``.

    Every coordinate of a leading family (u^α_K with K dominating a leading index L)
    is replaced by D^{K−L} of the corresponding right-hand side; this repeats until
    no leading-family coordinate is left.

    Raises:
        NotEvolutionaryError: If the system has no solve form.
    """
    if not system.is_evolutionary:
        raise NotEvolutionaryError(f"system '{system.name}' has no evolutionary solve form")
    frame = system.frame
    leads = [(lead, frame.coord(lead)) for lead in system.leading]
    expr = normalize(expr)
    while True:
        bindings = {}
        for symbol, jet in frame.jets_in(expr).items():
            for lead, lead_jet in leads:
                if lead_jet.alpha == jet.alpha and jet.J.dominates(lead_jet.J):
                    bindings[symbol] = _consequence(system, lead, jet.J - lead_jet.J)
                    break
        if not bindings:
            return expr
        expr = substitute(expr, bindings)


def x_index(frame: Frame) -> int:
    return frame.independents.index("x") if "x" in frame.independents else frame.p - 1


def antiderivative(expr: sp.Expr, variable: sp.Symbol) -> sp.Expr | None:
    """
    Term-wise antiderivative, or ``None`` when some term has no closed form.

    Partials of unknowns along ``variable`` are integrated by lowering their order; a
    bare unknown of ``variable`` integrates to a fresh primitive (see :func:`primitive`).
    """
    result = sp.Integer(0)
    for term in sp.Add.make_args(normalize(expr)):
        factor, rest = term.as_independent(variable, as_Add=False)
        if isinstance(rest, sp.Derivative) and variable in rest.variables:
            counts = [(v, c - 1 if v == variable else c) for v, c in rest.variable_count]
            counts = [(v, c) for v, c in counts if c]
            result += factor * (sp.diff(rest.expr, *counts) if counts else rest.expr)
            continue
        if isinstance(rest, AppliedUndef) and variable in rest.args:
            result += factor * primitive(rest, variable)
            continue
        piece = sp.integrate(term, variable)
        if piece.has(sp.Integral):
            return None
        result += piece
    return normalize(result)


def inverse_total_derivative_x(expr: sp.Expr, frame: Frame, seed: int | None = None) -> sp.Expr | None:
    """
    Find X with D_x X = expr, or ``None``.

    ``expr`` must be annihilated by every Euler operator. The highest x-derivative
    coordinate is peeled off repeatedly: its coefficient is integrated with respect
    to the coordinate one x-order lower and the total derivative of the result is
    subtracted. Expressions with Bessel functions are not attempted.
    """
    expr = normalize(expr)
    if expr == 0:
        return sp.Integer(0)
    if expr.has(sp.besselj, sp.bessely):
        return None
    for alpha in range(frame.q):
        if not is_zero(euler_operator(expr, alpha, frame), seed=seed).is_zero:
            return None

    i = x_index(frame)
    x = frame.independent_symbols[i]
    potential, remainder = sp.Integer(0), expr
    for _ in range(_MAX_PEELS):
        if remainder == 0:
            break
        jets = frame.jets_in(remainder)
        if not jets:
            piece = antiderivative(remainder, x)
            if piece is None:
                return None
            potential += piece
            break
        top, jet = max(jets.items(), key=lambda item: (item[1].J.orders[i], item[1].J.order, item[0].name))
        if jet.J.orders[i] == 0:
            return None
        if diff_partial(remainder, top).has(top):
            return None
        coefficient = diff_partial(remainder, top)
        lower = frame.symbol(Jet(jet.alpha, jet.J - MultiIndex.zero(frame.p).raised(i)))
        piece = antiderivative(coefficient, lower)
        if piece is None:
            return None
        potential += piece
        remainder = resolve_primitives(remainder - total_derivative(piece, i, frame))
    else:
        logger.debug("peeling did not terminate for %s", expr)
        return None

    potential = normalize(potential)
    if not is_zero(total_derivative(potential, i, frame) - expr, seed=seed).is_zero:
        return None
    return potential

