"""
Canonical form, partial differentiation and substitution of jet expressions.
"""

import itertools
from collections.abc import Mapping

import sympy as sp
from sympy.core.function import AppliedUndef, UndefinedFunction


def _has_denominator(expr: sp.Expr) -> bool:
    return any(sp.denom(term) != 1 for term in sp.Add.make_args(expr))


def normalize(expr: sp.Expr) -> sp.Expr:
    """
    Canonical form: fully expanded, with rational terms brought over a common
    denominator and cancelled first. sympy keeps the resulting sums and products
    sorted and merged, so the form is idempotent.
    """
    expr = sp.expand(sp.sympify(expr))
    if _has_denominator(expr):
        try:
            expr = sp.expand(sp.cancel(sp.together(expr)))
        except sp.PolynomialError:
            pass
    return expr


def _lower_bessel(expr: sp.Expr) -> sp.Expr:
    """Rewrite integer orders >= 2 through the three-term recurrence so only J0, J1, Y0, Y1 remain."""

    def is_high(node):
        return isinstance(node, (sp.besselj, sp.bessely)) and node.order.is_Integer and node.order >= 2

    def lower(node):
        n, z = node.order, node.argument
        kind = type(node)
        return 2 * (n - 1) / z * kind(n - 1, z) - kind(n - 2, z)

    while expr.has(sp.besselj, sp.bessely) and any(is_high(node) for node in sp.preorder_traversal(expr)):
        expr = expr.replace(is_high, lower)
    return expr


def diff_partial(expr: sp.Expr, coord: sp.Symbol) -> sp.Expr:
    """
    Partial derivative with every other coordinate held fixed.

    Unknown functions differentiate to symbolic partials when ``coord`` is one of
    their declared arguments and to zero otherwise.
    """
    return normalize(_lower_bessel(sp.diff(expr, coord)))


def unknowns_in(expr: sp.Expr) -> set[AppliedUndef]:
    return set(expr.atoms(AppliedUndef))


def substitute(expr: sp.Expr, bindings: Mapping[sp.Basic, sp.Expr]) -> sp.Expr:
    """
    Simultaneous substitution followed by normalization.

    Args:
        expr (sp.Expr): Expression to rewrite.
        bindings (Mapping): Keys are coordinate symbols, applied unknowns such as
            ``F(h, u_x)`` or bare unknown function classes. Unknown bindings are
            expressed in the unknown's own arguments and also act on its partials.

    Returns:
        sp.Expr: The normalized result.
    """
    functions, symbols = {}, {}
    for key, value in bindings.items():
        if isinstance(key, AppliedUndef):
            functions[key.func] = sp.Lambda(key.args, value)
        elif isinstance(key, UndefinedFunction):
            functions[key] = value
        else:
            symbols[key] = value
    if functions:
        expr = expr.subs(functions).doit()
    if symbols:
        expr = expr.subs(symbols, simultaneous=True)
    return normalize(expr)


_PRIMITIVES: dict[AppliedUndef, tuple[AppliedUndef, sp.Symbol]] = {}


def primitive(integrand: AppliedUndef, variable: sp.Symbol) -> AppliedUndef:
    """
    Fresh unknown G over the arguments of ``integrand`` with ∂G/∂``variable`` = ``integrand``.

    G is named after the integrand in upper case (``g(u_x)`` gives ``G(u_x)``), with a
    numeric suffix when that name already stands for another primitive. The relation is
    recorded so that partials of G resolve back to the integrand and zero-testing samples
    G as an exact antiderivative.
    """
    base = integrand.func.__name__
    stem = base.upper() if base != base.upper() else f"{base}I"
    for k in itertools.count():
        candidate = sp.Function(stem if k == 0 else f"{stem}{k}")(*integrand.args)
        known = _PRIMITIVES.setdefault(candidate, (integrand, variable))
        if known == (integrand, variable):
            return candidate


def primitive_relation(unknown: AppliedUndef) -> tuple[AppliedUndef, sp.Symbol] | None:
    """The ``(integrand, variable)`` pair recorded for a primitive, or ``None``."""
    return _PRIMITIVES.get(unknown)


def resolve_primitives(expr: sp.Expr) -> sp.Expr:
    """Replace partials of recorded primitives along their variable by the integrand."""
    if not _PRIMITIVES:
        return expr

    def is_partial(node):
        relation = isinstance(node, sp.Derivative) and _PRIMITIVES.get(node.expr)
        return bool(relation) and relation[1] in node.variables

    def lower(node):
        integrand, variable = _PRIMITIVES[node.expr]
        counts = [(v, n - 1 if v == variable else n) for v, n in node.variable_count]
        counts = [(v, n) for v, n in counts if n]
        return sp.diff(integrand, *counts) if counts else integrand

    return normalize(expr.replace(is_partial, lower))
