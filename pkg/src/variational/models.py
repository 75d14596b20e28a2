import itertools
from dataclasses import dataclass, field
from math import comb, prod

import sympy as sp

from src.expr.core import normalize
from src.expr.frame import Frame, MultiIndex
from src.expr.parser import parse, to_dsl
from src.jet.calculus import euler_operator, total_derivative_multi
from src.variational.schema import LinOpExport, Monomial, OperatorEntry


@dataclass
class LinOpMatrix:
    """
    Matrix of linear differential operators.

    ``entries[mu, nu]`` maps a multi-index J to the coefficient of D_J; zero
    coefficients are never stored.
    """

    frame: Frame
    rows: int
    cols: int
    entries: dict[tuple[int, int], dict[MultiIndex, sp.Expr]] = field(default_factory=dict)

    def entry(self, mu: int, nu: int) -> dict[MultiIndex, sp.Expr]:
        return self.entries.get((mu, nu), {})

    def add(self, mu: int, nu: int, J: MultiIndex, coefficient: sp.Expr) -> None:
        slot = self.entries.setdefault((mu, nu), {})
        value = normalize(slot.get(J, 0) + coefficient)
        if value == 0:
            slot.pop(J, None)
        else:
            slot[J] = value
        if not slot:
            self.entries.pop((mu, nu))

    def __sub__(self, other: "LinOpMatrix") -> "LinOpMatrix":
        result = LinOpMatrix(self.frame, self.rows, self.cols)
        for (mu, nu), slot in self.entries.items():
            for J, coefficient in slot.items():
                result.add(mu, nu, J, coefficient)
        for (mu, nu), slot in other.entries.items():
            for J, coefficient in slot.items():
                result.add(mu, nu, J, -coefficient)
        return result

    def coefficients(self):
        for (mu, nu), slot in sorted(self.entries.items()):
            for J, coefficient in sorted(slot.items()):
                yield mu, nu, J, coefficient

    def adjoint(self) -> "LinOpMatrix":
        """
        Formal adjoint: (D*)_{νμ} V = Σ_J (−D)_J (a_J V), expanded by Leibniz so that
        the coefficient of D_K is Σ_{J≥K} (−1)^{|J|} C(J,K) D_{J−K} a_J.
        """
        result = LinOpMatrix(self.frame, self.cols, self.rows)
        for mu, nu, J, coefficient in self.coefficients():
            for K in _below(J):
                weight = (-1) ** J.order * prod(comb(j, k) for j, k in zip(J.orders, K.orders))
                result.add(nu, mu, K, weight * total_derivative_multi(coefficient, J - K, self.frame))
        return result

    def export(self) -> LinOpExport:
        entries = [
            OperatorEntry(
                mu=mu,
                nu=nu,
                monomials=[Monomial(multiindex=list(J.orders), coeff=to_dsl(c)) for J, c in sorted(slot.items())],
            )
            for (mu, nu), slot in sorted(self.entries.items())
        ]
        return LinOpExport(rows=self.rows, cols=self.cols, entries=entries)


def _below(J: MultiIndex) -> list[MultiIndex]:
    return [MultiIndex(orders) for orders in itertools.product(*(range(j + 1) for j in J.orders))]


@dataclass(frozen=True)
class Lagrangian:
    """Density L(x, u^(n)) of the action ∫ L dx."""

    frame: Frame
    density: sp.Expr

    @classmethod
    def from_text(cls, frame: Frame, text: str) -> "Lagrangian":
        return cls(frame, parse(text, frame))

    def euler_lagrange(self) -> tuple[sp.Expr, ...]:
        return tuple(euler_operator(self.density, alpha, self.frame) for alpha in range(self.frame.q))
