from dataclasses import dataclass

import sympy as sp

from src.exceptions import FrameError
from src.expr.core import normalize
from src.expr.frame import Frame, Independent, Jet
from src.expr.parser import parse, to_dsl
from src.conservation.schema import DeterminingSystemExport


@dataclass(frozen=True)
class MultiplierSet:
    """
    Multipliers Λ^1..Λ^L of a conservation law in characteristic form.

    ``declared_args`` lists the coordinates the multipliers may depend on; an
    empty tuple means "whatever the expressions use".
    """

    lambdas: tuple[sp.Expr, ...]
    declared_args: tuple[sp.Symbol, ...] = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(normalize(lam) for lam in self.lambdas))

    @classmethod
    def from_text(cls, frame: Frame, lambdas: list[str], declared_args: list[str] | None = None, name: str = "") -> "MultiplierSet":
        args = tuple(sp.Symbol(a) for a in declared_args or ())
        for arg in args:
            if not isinstance(frame.coord(arg), (Independent, Jet)):
                raise FrameError(f"declared argument '{arg}' is not a frame coordinate")
        parsed = tuple(parse(lam, frame) for lam in lambdas)
        if args:
            for lam in parsed:
                outside = sorted(
                    s.name for s in lam.free_symbols if isinstance(frame.coord(s), (Independent, Jet)) and s not in args
                )
                if outside:
                    raise FrameError(f"multiplier '{name}' depends on {outside} outside its declared arguments")
        return cls(parsed, args, name)

    def scaled(self, factor) -> "MultiplierSet":
        return MultiplierSet(tuple(factor * lam for lam in self.lambdas), self.declared_args, self.name)

    def combined(self, other: "MultiplierSet", a=1, b=1) -> "MultiplierSet":
        return MultiplierSet(tuple(a * x + b * y for x, y in zip(self.lambdas, other.lambdas)), (), self.name)

    def to_dsl(self) -> list[str]:
        return [to_dsl(lam) for lam in self.lambdas]


@dataclass(frozen=True)
class ConservedVector:
    """Components Φ^1..Φ^p; in two dimensions Φ^t is the density and Φ^x the flux."""

    components: tuple[sp.Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(normalize(c) for c in self.components))

    @classmethod
    def from_text(cls, frame: Frame, components: list[str]) -> "ConservedVector":
        if len(components) != frame.p:
            raise FrameError(f"conserved vector needs {frame.p} components, got {len(components)}")
        return cls(tuple(parse(c, frame) for c in components))

    @property
    def density(self) -> sp.Expr:
        return self.components[0]

    @property
    def flux(self) -> sp.Expr:
        return self.components[-1]

    def combined(self, other: "ConservedVector", a=1, b=1) -> "ConservedVector":
        return ConservedVector(tuple(a * x + b * y for x, y in zip(self.components, other.components)))


@dataclass(frozen=True)
class DeterminingSystem:
    """
    Coefficient equations obtained by splitting over parametric jet coordinates.

    Attributes:
        equations (tuple[sp.Expr, ...]): Normalized, sign-canonical, deduplicated equations.
        unknowns (tuple[str, ...]): Names of the unknown functions being determined.
        split_coords (tuple[sp.Symbol, ...]): Coordinates (and constants) the split used.
        retained (tuple[sp.Symbol, ...]): Candidate coordinates kept symbolically
            because the expression is not polynomial in them.
    """

    equations: tuple[sp.Expr, ...]
    unknowns: tuple[str, ...]
    split_coords: tuple[sp.Symbol, ...] = ()
    retained: tuple[sp.Symbol, ...] = ()

    def __len__(self) -> int:
        return len(self.equations)

    def export(self) -> DeterminingSystemExport:
        return DeterminingSystemExport(
            unknowns=list(self.unknowns),
            split_coords=[s.name for s in self.split_coords],
            retained=[s.name for s in self.retained],
            equations=[to_dsl(eq) for eq in self.equations],
        )
