"""
Coordinate frames of jet space.

A frame declares the independent variables, the dependent variables (whose
derivatives become jet coordinates such as ``u_tx``), the classification
parameters and the undetermined functions of a model. Every symbolic object in
the toolkit is a sympy expression over the symbols a frame hands out, so two
expressions built against equal frames can be freely combined.

Jet coordinates are named ``<dep>_<letters>`` where each letter is one
differentiation with respect to the independent variable of that name; the
letters are always emitted in declaration order, so ``u_xt`` and ``u_tx`` denote
the same coordinate.
"""

import re
from dataclasses import dataclass
from functools import cached_property

import sympy as sp
from sympy.core.function import AppliedUndef

from src.exceptions import FrameError


@dataclass(frozen=True, order=True)
class MultiIndex:
    """Derivative orders (j_1, ..., j_p), one entry per independent variable."""

    orders: tuple[int, ...]

    def __post_init__(self):
        if any(j < 0 for j in self.orders):
            raise FrameError(f"negative derivative order in {self.orders}")

    @classmethod
    def zero(cls, p: int) -> "MultiIndex":
        return cls((0,) * p)

    @property
    def order(self) -> int:
        return sum(self.orders)

    def raised(self, i: int, by: int = 1) -> "MultiIndex":
        orders = list(self.orders)
        orders[i] += by
        return MultiIndex(tuple(orders))

    def dominates(self, other: "MultiIndex") -> bool:
        return all(a >= b for a, b in zip(self.orders, other.orders))

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        return MultiIndex(tuple(a + b for a, b in zip(self.orders, other.orders)))

    def __sub__(self, other: "MultiIndex") -> "MultiIndex":
        return MultiIndex(tuple(a - b for a, b in zip(self.orders, other.orders)))


@dataclass(frozen=True)
class Independent:
    index: int


@dataclass(frozen=True)
class Jet:
    alpha: int
    J: MultiIndex


@dataclass(frozen=True)
class Parameter:
    name: str


Coord = Independent | Jet | Parameter

_NAME = re.compile(r"^[A-Za-z][A-Za-z0-9]*$")


@dataclass(frozen=True)
class Frame:
    """
    Coordinate declaration of a model.

    Attributes:
        independents (tuple[str, ...]): Single-letter names of x^1..x^p.
        dependents (tuple[str, ...]): Names of u^1..u^q.
        parameters (tuple[str, ...]): Symbolic constants of the model.
        unknowns (tuple[tuple[str, tuple[str, ...]], ...]): Undetermined functions
            with the coordinate names they may depend on.
    """

    independents: tuple[str, ...]
    dependents: tuple[str, ...]
    parameters: tuple[str, ...] = ()
    unknowns: tuple[tuple[str, tuple[str, ...]], ...] = ()

    def __post_init__(self):
        for name in self.independents:
            if not re.fullmatch(r"[a-z]", name):
                raise FrameError(f"independent variable '{name}' must be a single lowercase letter")
        names = list(self.independents) + list(self.dependents) + list(self.parameters)
        names += [name for name, _ in self.unknowns]
        for name in names:
            if not _NAME.match(name):
                raise FrameError(f"invalid identifier '{name}'")
        if len(set(names)) != len(names):
            raise FrameError(f"duplicate names in frame declaration: {names}")
        for name, args in self.unknowns:
            for arg in args:
                coord = self.coord(sp.Symbol(arg))
                if not isinstance(coord, (Independent, Jet)):
                    raise FrameError(f"argument '{arg}' of unknown '{name}' is not a frame coordinate")

    @property
    def p(self) -> int:
        return len(self.independents)

    @property
    def q(self) -> int:
        return len(self.dependents)

    @cached_property
    def independent_symbols(self) -> tuple[sp.Symbol, ...]:
        return tuple(sp.Symbol(name) for name in self.independents)

    @cached_property
    def parameter_symbols(self) -> tuple[sp.Symbol, ...]:
        return tuple(sp.Symbol(name) for name in self.parameters)

    @cached_property
    def _unknown_table(self) -> dict[str, tuple[str, ...]]:
        return dict(self.unknowns)

    def jet_name(self, alpha: int, J: MultiIndex) -> str:
        base = self.dependents[alpha]
        if J.order == 0:
            return base
        letters = "".join(name * j for name, j in zip(self.independents, J.orders))
        return f"{base}_{letters}"

    def symbol(self, coord: Coord) -> sp.Symbol:
        if isinstance(coord, Independent):
            return self.independent_symbols[coord.index]
        if isinstance(coord, Jet):
            return sp.Symbol(self.jet_name(coord.alpha, coord.J))
        if coord.name not in self.parameters:
            raise FrameError(f"'{coord.name}' is not a parameter of the frame")
        return sp.Symbol(coord.name)

    def jet(self, dep: str | int, letters: str = "") -> sp.Symbol:
        """Return the jet symbol of ``dep`` differentiated along ``letters``, e.g. ``jet("u", "tx")``."""
        alpha = dep if isinstance(dep, int) else self.dependents.index(dep)
        return self.symbol(Jet(alpha, self.multi_index(letters)))

    def multi_index(self, letters: str) -> MultiIndex:
        orders = [0] * self.p
        for letter in letters:
            if letter not in self.independents:
                raise FrameError(f"'{letter}' is not an independent variable")
            orders[self.independents.index(letter)] += 1
        return MultiIndex(tuple(orders))

    def coord(self, sym: sp.Symbol) -> Coord | None:
        """Resolve a symbol back to its coordinate, or ``None`` for foreign symbols."""
        return _resolve(self, sym.name)

    def jets_in(self, expr: sp.Expr) -> dict[sp.Symbol, Jet]:
        found = {}
        for sym in expr.free_symbols:
            coord = self.coord(sym)
            if isinstance(coord, Jet):
                found[sym] = coord
        return found

    def order(self, expr: sp.Expr) -> int:
        return max((jet.J.order for jet in self.jets_in(expr).values()), default=0)

    def unknown(self, name: str) -> AppliedUndef:
        """Return the unknown ``name`` applied to its declared argument coordinates."""
        if name not in self._unknown_table:
            raise FrameError(f"'{name}' is not an unknown function of the frame")
        args = [sp.Symbol(arg) for arg in self._unknown_table[name]]
        return sp.Function(name)(*args)

    def unknown_args(self, name: str) -> tuple[str, ...]:
        return self._unknown_table[name]

    def has_unknown(self, name: str) -> bool:
        return name in self._unknown_table

    def extend(
        self,
        parameters: tuple[str, ...] = (),
        unknowns: tuple[tuple[str, tuple[str, ...]], ...] = (),
        drop_unknowns: tuple[str, ...] = (),
    ) -> "Frame":
        kept = tuple((name, args) for name, args in self.unknowns if name not in drop_unknowns)
        return Frame(
            self.independents,
            self.dependents,
            self.parameters + tuple(p for p in parameters if p not in self.parameters),
            kept + tuple(unknowns),
        )

    def header(self) -> str:
        """Render the frame back into its DSL header form."""
        parts = [f"indep {' '.join(self.independents)}", f"dep {' '.join(self.dependents)}"]
        if self.parameters:
            parts.append(f"param {' '.join(self.parameters)}")
        if self.unknowns:
            calls = " ".join(f"{name}({','.join(args)})" for name, args in self.unknowns)
            parts.append(f"unknown {calls}")
        return "; ".join(parts) + ";"


def _resolve(frame: Frame, name: str) -> Coord | None:
    if name in frame.independents:
        return Independent(frame.independents.index(name))
    if name in frame.parameters:
        return Parameter(name)
    base, _, letters = name.partition("_")
    if base not in frame.dependents:
        return None
    if "_" in name and not letters:
        return None
    if any(letter not in frame.independents for letter in letters):
        return None
    return Jet(frame.dependents.index(base), frame.multi_index(letters))


_STATEMENT = re.compile(r"^\s*(indep|dep|param|unknown)\b(.*)$", re.S)
_CALL = re.compile(r"([A-Za-z][A-Za-z0-9]*)\s*\(([^)]*)\)")


def parse_frame(header: str) -> Frame:
    """
    Parse a frame header such as ``indep t x; dep u h; param c d; unknown F(h,u_x,h_x);``.

    Args:
        header (str): Header text; statements are separated by semicolons.

    Returns:
        Frame: The declared frame.

    Raises:
        FrameError: For unknown statements, duplicate names or bad unknown arguments.
    """
    declared = {"indep": [], "dep": [], "param": [], "unknown": []}
    for statement in filter(str.strip, header.split(";")):
        match = _STATEMENT.match(statement)
        if not match:
            raise FrameError(f"cannot parse frame statement '{statement.strip()}'")
        keyword, body = match.groups()
        if keyword == "unknown":
            calls = _CALL.findall(body)
            if not calls or _CALL.sub("", body).strip(" ,"):
                raise FrameError(f"cannot parse unknown declaration '{body.strip()}'")
            for name, args in calls:
                declared["unknown"].append((name, tuple(a.strip() for a in args.split(",") if a.strip())))
        else:
            declared[keyword].extend(body.split())
    return Frame(
        tuple(declared["indep"]),
        tuple(declared["dep"]),
        tuple(declared["param"]),
        tuple(declared["unknown"]),
    )
