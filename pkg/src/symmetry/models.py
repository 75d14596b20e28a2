from dataclasses import dataclass
from math import prod

import sympy as sp

from src.exceptions import FrameError
from src.expr.core import substitute
from src.expr.frame import Frame, Independent, Jet, Parameter
from src.expr.parser import parse
from src.jet.models import VectorField


@dataclass(frozen=True)
class AlgebraFixture:
    """
    Basis of a Lie algebra of point vector fields, as listed for a model.

    Attributes:
        name (str): Identifier such as ``g1`` or ``kernel``.
        generators (tuple[VectorField, ...]): Basis elements, each with its own name.
        closure_note (str): Free-text note on the system the algebra belongs to.
        locus (str): Where the algebra is stated in the source material.
    """

    name: str
    generators: tuple[VectorField, ...]
    closure_note: str = ""
    locus: str = ""

    def specialized(self, bindings: dict[sp.Symbol, sp.Expr], name: str | None = None) -> "AlgebraFixture":
        """Substitute values for parameters of the generator components."""
        generators = tuple(
            VectorField(
                field.frame,
                tuple(substitute(c, bindings) for c in field.xi),
                tuple(substitute(c, bindings) for c in field.phi),
                tuple((sym, substitute(c, bindings)) for sym, c in field.extra),
                field.name,
            )
            for field in self.generators
        )
        return AlgebraFixture(name or self.name, generators, self.closure_note, self.locus)

    def generator(self, name: str) -> VectorField:
        for field in self.generators:
            if field.name == name:
                return field
        raise FrameError(f"algebra '{self.name}' has no generator '{name}'")


@dataclass(frozen=True)
class AffineMap:
    """
    Point map x̃ = s·x + b acting coordinate-wise on independents, dependents and
    frozen parameters (unset scales are 1, unset shifts 0).

    Derivative coordinates follow from the chain rule:
    ũ_J̃ = s_u · u_J / Π_i s_i^{j_i}.
    """

    name: str
    scales: tuple[tuple[str, sp.Expr], ...] = ()
    shifts: tuple[tuple[str, sp.Expr], ...] = ()

    @classmethod
    def from_text(cls, frame: Frame, scales: dict[str, str] | None = None, shifts: dict[str, str] | None = None, name: str = "") -> "AffineMap":
        declared = set(frame.independents) | set(frame.dependents) | set(frame.parameters)
        for key in list(scales or {}) + list(shifts or {}):
            if key not in declared:
                raise FrameError(f"map '{name}' acts on '{key}', which is not a frame variable")
        return cls(
            name,
            tuple((key, parse(value, frame)) for key, value in (scales or {}).items()),
            tuple((key, parse(value, frame)) for key, value in (shifts or {}).items()),
        )

    def _scale(self, name: str) -> sp.Expr:
        return dict(self.scales).get(name, sp.Integer(1))

    def _shift(self, name: str) -> sp.Expr:
        return dict(self.shifts).get(name, sp.Integer(0))

    def pullback(self, expr: sp.Expr, frame: Frame) -> sp.Expr:
        """Rewrite an expression in the new variables through the old ones."""
        bindings = {}
        for symbol in expr.free_symbols:
            coord = frame.coord(symbol)
            if isinstance(coord, Independent):
                name = frame.independents[coord.index]
                bindings[symbol] = self._scale(name) * symbol + self._shift(name)
            elif isinstance(coord, Parameter):
                bindings[symbol] = self._scale(coord.name) * symbol + self._shift(coord.name)
            elif isinstance(coord, Jet):
                name = frame.dependents[coord.alpha]
                stretch = prod(self._scale(x) ** j for x, j in zip(frame.independents, coord.J.orders))
                value = self._scale(name) * symbol / stretch
                bindings[symbol] = value + self._shift(name) if coord.J.order == 0 else value
        return substitute(expr, bindings)
