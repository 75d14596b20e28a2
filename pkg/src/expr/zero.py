"""
Numeric evaluation and seeded zero-testing.

Identities that expansion alone cannot close (rational terms, logarithms, Bessel
functions, undetermined functions) are decided by evaluating the expression at
random points of jet space. Unknown functions are replaced by fixed polynomial
stand-ins whose coefficients depend only on the function name, so the same
expression always samples the same way for a given seed.
"""

import logging
import zlib
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np
import sympy as sp
from sympy.core.function import AppliedUndef

from config.general import settings
from src.exceptions import EvaluationError, UnsamplableError
from src.expr.core import normalize, primitive_relation
from src.expr.schema import VerdictStatus, ZeroVerdict

logger = logging.getLogger(__name__)

_MODULES = ["scipy", "numpy"]


@dataclass(frozen=True)
class Point:
    """An assignment of floats to coordinates; jet coordinates are independent numbers."""

    assignment: Mapping[sp.Symbol, float] = field(default_factory=dict)

    def as_dict(self) -> dict[str, float]:
        return {symbol.name: float(value) for symbol, value in sorted(self.assignment.items(), key=lambda kv: kv[0].name)}


def standin(name: str, nargs: int, degree: int | None = None) -> sp.Lambda:
    """Polynomial stand-in for the unknown ``name``; coefficients are seeded by the name."""
    degree = settings.standin_degree if degree is None else degree
    dummies = sp.symbols(f"a0:{nargs}", cls=sp.Dummy)
    rng = np.random.default_rng(zlib.crc32(name.encode()))
    monomials = sorted(sp.itermonomials(list(dummies), degree), key=sp.default_sort_key)
    body = sum(sp.Float(rng.uniform(0.1, 1.0)) * monomial for monomial in monomials)
    return sp.Lambda(dummies, body)


def bind_standins(expr: sp.Expr) -> sp.Expr:
    """Replace every unknown and its partials by stand-ins and carry out the derivatives."""
    atoms = expr.atoms(AppliedUndef)
    if not atoms:
        return expr
    table = {atom.func: standin(atom.func.__name__, len(atom.args)) for atom in atoms}
    for atom in atoms:
        relation = primitive_relation(atom)
        if relation is None:
            continue
        integrand, variable = relation
        dummies = sp.symbols(f"a0:{len(atom.args)}", cls=sp.Dummy)
        body = standin(integrand.func.__name__, len(integrand.args))(*dummies)
        table[atom.func] = sp.Lambda(dummies, sp.integrate(body, dummies[atom.args.index(variable)]))
    return expr.subs(table).doit()


def _symbols(expr: sp.Expr) -> list[sp.Symbol]:
    return sorted(expr.free_symbols, key=lambda s: s.name)


def evaluate(expr: sp.Expr, point: Point | Mapping[sp.Symbol, float]) -> float:
    """
    Evaluate ``expr`` at ``point`` in double precision.

    Raises:
        EvaluationError: If the point misses a coordinate or hits a pole or branch cut.
    """
    assignment = point.assignment if isinstance(point, Point) else point
    bound = bind_standins(sp.sympify(expr))
    symbols = _symbols(bound)
    missing = [s.name for s in symbols if s not in assignment]
    if missing:
        raise EvaluationError(f"point does not cover {missing}")
    function = sp.lambdify(symbols, bound, modules=_MODULES)
    with np.errstate(all="ignore"):
        value = complex(function(*[assignment[s] for s in symbols]))
    if not np.isfinite(value) or abs(value.imag) > 1e-12 * (1 + abs(value.real)):
        raise EvaluationError(f"{expr} is not finite and real at {Point(assignment).as_dict()}")
    return value.real


def is_zero(
    expr: sp.Expr,
    seed: int | None = None,
    samples: int | None = None,
    tolerance: float | None = None,
) -> ZeroVerdict:
    """
    Decide whether ``expr`` vanishes identically.

    Args:
        expr (sp.Expr): Expression over jet coordinates, parameters and unknowns.
        seed (int | None): Sampling seed; defaults to ``settings.seed``.
        samples (int | None): Number of random points; defaults to ``settings.zero_samples``.
        tolerance (float | None): Relative tolerance against the magnitude of the terms.

    Returns:
        ZeroVerdict: ``proven_zero`` when the canonical form is literally zero,
        ``nonzero`` with the first failing point as witness, otherwise
        ``probably_zero``. A failing sample only becomes a witness when its
        value exceeds ``settings.witness_floor``; smaller residuals count
        towards ``max_residual``.

    Raises:
        UnsamplableError: When every re-draw of some sample is singular.
    """
    seed = settings.seed if seed is None else seed
    samples = settings.zero_samples if samples is None else samples
    tolerance = settings.zero_tolerance if tolerance is None else tolerance

    canonical = normalize(expr)
    if canonical == 0:
        return ZeroVerdict(status=VerdictStatus.PROVEN_ZERO)

    terms = [bind_standins(term) for term in sp.Add.make_args(canonical)]
    symbols = sorted(set().union(*(term.free_symbols for term in terms)), key=lambda s: s.name)
    function = sp.lambdify(symbols, terms, modules=_MODULES)
    rng = np.random.default_rng(seed)

    max_residual = 0.0
    for sample in range(samples):
        for attempt in range(settings.max_redraws + 1):
            values = rng.uniform(settings.sample_low, settings.sample_high, size=len(symbols))
            with np.errstate(all="ignore"):
                evaluated = np.asarray([complex(v) for v in function(*values)])
            if np.all(np.isfinite(evaluated)) and np.all(np.abs(evaluated.imag) <= 1e-12 * (1 + np.abs(evaluated.real))):
                break
            logger.debug("sample %d attempt %d hit a singularity, redrawing", sample, attempt)
        else:
            raise UnsamplableError(f"every redraw of sample {sample} is singular for {canonical}")

        real = evaluated.real
        value = float(real.sum())
        scale = float(np.abs(real).sum())
        if abs(value) > tolerance * (1 + scale):
            if abs(value) > settings.witness_floor:
                witness = Point(dict(zip(symbols, map(float, values))))
                return ZeroVerdict(status=VerdictStatus.NONZERO, witness=witness.as_dict(), value=value)
            logger.debug("sample %d residual %.3g is below the witness floor", sample, value)
        max_residual = max(max_residual, abs(value))

    return ZeroVerdict(status=VerdictStatus.PROBABLY_ZERO, samples=samples, max_residual=max_residual)
