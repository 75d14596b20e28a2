"""
PDE systems and point vector fields over a jet-space frame.
"""

from dataclasses import dataclass, field

import sympy as sp

from src.exceptions import FrameError
from src.expr.core import normalize, substitute
from src.expr.frame import Frame, Jet
from src.expr.parser import parse
from src.expr.schema import ZeroVerdict
from src.expr.zero import is_zero


@dataclass(frozen=True)
class PDESystem:
    """
    Equations Δ_l = 0 with an optional evolutionary solve form.

    Attributes:
        frame (Frame): Coordinates the equations are written in.
        equations (tuple[sp.Expr, ...]): Left-hand sides Δ_1..Δ_L, stored normalized.
        solve_form (tuple[tuple[sp.Symbol, sp.Expr], ...]): Leading jet coordinates
            paired with the right-hand sides they are solved for. Empty when the
            system is not given in evolutionary form.
        name (str): Identifier used in reports.
    """

    frame: Frame
    equations: tuple[sp.Expr, ...]
    solve_form: tuple[tuple[sp.Symbol, sp.Expr], ...] = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "equations", tuple(normalize(eq) for eq in self.equations))
        object.__setattr__(self, "solve_form", tuple((lead, normalize(rhs)) for lead, rhs in self.solve_form))
        leads = self.leading
        for lead in leads:
            if not isinstance(self.frame.coord(lead), Jet):
                raise FrameError(f"leading coordinate '{lead}' is not a jet coordinate")
        for lead, rhs in self.solve_form:
            clash = [c.name for c in rhs.free_symbols if self._in_family(c, leads)]
            if clash:
                raise FrameError(f"right-hand side for '{lead}' contains leading-family coordinates {clash}")

    @classmethod
    def from_text(
        cls, frame: Frame, equations: list[str], solve_form: dict[str, str] | None = None, name: str = ""
    ) -> "PDESystem":
        solved = tuple((sp.Symbol(lead), parse(rhs, frame)) for lead, rhs in (solve_form or {}).items())
        for lead, _ in solved:
            if frame.coord(lead) is None:
                raise FrameError(f"unknown leading coordinate '{lead}'")
        return cls(frame, tuple(parse(eq, frame) for eq in equations), solved, name)

    @property
    def size(self) -> int:
        return len(self.equations)

    @property
    def is_evolutionary(self) -> bool:
        return bool(self.solve_form)

    @property
    def leading(self) -> dict[sp.Symbol, sp.Expr]:
        return dict(self.solve_form)

    def _in_family(self, sym: sp.Symbol, leads) -> bool:
        coord = self.frame.coord(sym)
        if not isinstance(coord, Jet):
            return False
        for lead in leads:
            lead_coord = self.frame.coord(lead)
            if lead_coord.alpha == coord.alpha and coord.J.dominates(lead_coord.J):
                return True
        return False

    def check_solve_form(self, seed: int | None = None) -> list[ZeroVerdict]:
        """Substituting the solve form into each equation must give zero."""
        return [is_zero(substitute(eq, self.leading), seed=seed) for eq in self.equations]

    def with_equations(self, equations, solve_form=None, name: str | None = None, frame: Frame | None = None) -> "PDESystem":
        return PDESystem(
            frame or self.frame,
            tuple(equations),
            self.solve_form if solve_form is None else tuple(solve_form),
            self.name if name is None else name,
        )


@dataclass(frozen=True)
class VectorField:
    """
    Point vector field ξ^i ∂_{x^i} + φ^α ∂_{u^α}.

    ``extra`` holds components along frame parameters that stand for frozen
    arbitrary elements of a class of equations (for example ``F`` in an
    equivalence generator ``-F ∂_F``).
    """

    frame: Frame
    xi: tuple[sp.Expr, ...]
    phi: tuple[sp.Expr, ...]
    extra: tuple[tuple[sp.Symbol, sp.Expr], ...] = field(default=())
    name: str = ""

    def __post_init__(self):
        if len(self.xi) != self.frame.p or len(self.phi) != self.frame.q:
            raise FrameError(f"vector field '{self.name}' does not match the frame dimensions")
        object.__setattr__(self, "xi", tuple(normalize(c) for c in self.xi))
        object.__setattr__(self, "phi", tuple(normalize(c) for c in self.phi))
        for component in self.xi + self.phi:
            higher = [s.name for s, jet in self.frame.jets_in(component).items() if jet.J.order > 0]
            if higher:
                raise FrameError(f"point vector field '{self.name}' depends on derivatives {higher}")

    @classmethod
    def from_text(
        cls, frame: Frame, xi: dict[str, str], phi: dict[str, str], extra: dict[str, str] | None = None, name: str = ""
    ) -> "VectorField":
        """Build from component maps keyed by variable name; absent components are zero."""
        for key in list(xi) + list(phi):
            if key not in frame.independents and key not in frame.dependents:
                raise FrameError(f"'{key}' is not a variable of the frame")
        return cls(
            frame,
            tuple(parse(xi.get(name, "0"), frame) for name in frame.independents),
            tuple(parse(phi.get(name, "0"), frame) for name in frame.dependents),
            tuple((sp.Symbol(key), parse(value, frame)) for key, value in (extra or {}).items()),
            name,
        )

    def characteristic(self) -> tuple[sp.Expr, ...]:
        """Evolutionary characteristic η^α = φ^α − ξ^i u^α_i."""
        result = []
        for alpha, phi in enumerate(self.phi):
            terms = phi
            for i, xi in enumerate(self.xi):
                terms -= xi * self.frame.jet(alpha, self.frame.independents[i])
            result.append(normalize(terms))
        return tuple(result)

    @property
    def is_zero_field(self) -> bool:
        return all(c == 0 for c in self.xi + self.phi) and all(v == 0 for _, v in self.extra)
