"""
Parsed fixtures.

A :class:`ModelFixture` is built once from a validated :class:`FixtureSpec` and
holds sympy objects for everything the fixture names: the base system, the
closed systems of its closures, multiplier rows, algebras and invariants.
"""

from dataclasses import dataclass, field

import sympy as sp

from src.exceptions import FixtureNotFoundError
from src.expr.core import substitute
from src.expr.frame import Frame, parse_frame
from src.expr.parser import parse
from src.jet.models import PDESystem, VectorField
from src.conservation.models import ConservedVector, MultiplierSet
from src.symmetry.invariance import freeze
from src.symmetry.models import AlgebraFixture
from src.catalog.schema import AlgebraEntry, ClosureEntry, FixtureSpec, MultiplierEntry


@dataclass(frozen=True)
class MultiplierRow:
    multipliers: MultiplierSet
    vector: ConservedVector | None
    entry: MultiplierEntry


@dataclass(frozen=True)
class Closure:
    name: str
    system: PDESystem
    rhs: tuple[sp.Expr, ...]
    entry: ClosureEntry


def specialize(system: PDESystem, bind: dict[str, str]) -> PDESystem:
    """Substitute parameter values into a system and its solve form."""
    if not bind:
        return system
    bindings = {sp.Symbol(name): parse(value, system.frame) for name, value in bind.items()}
    return system.with_equations(
        [substitute(eq, bindings) for eq in system.equations],
        [(lead, substitute(rhs, bindings)) for lead, rhs in system.solve_form],
    )


@dataclass
class ModelFixture:
    spec: FixtureSpec
    frame: Frame = field(init=False)
    system: PDESystem = field(init=False)
    closures: dict[str, Closure] = field(init=False, default_factory=dict)
    rows: dict[str, MultiplierRow] = field(init=False, default_factory=dict)
    algebras: dict[str, AlgebraFixture] = field(init=False, default_factory=dict)
    invariants: dict[str, sp.Expr] = field(init=False, default_factory=dict)

    def __post_init__(self):
        spec = self.spec
        self.frame = parse_frame(spec.frame)
        self.system = PDESystem.from_text(self.frame, spec.equations, spec.solve_form, spec.id)
        for entry in spec.closures:
            self.closures[entry.name] = self._close(entry)
        for entry in spec.multipliers:
            self.rows[entry.name] = self._row(entry)
        for entry in spec.algebras:
            self.algebras[entry.name] = self._algebra(entry)
        for entry in spec.invariants:
            self.invariants[entry.name] = parse(entry.expr, self.algebras[entry.algebra].generators[0].frame)

    @property
    def id(self) -> str:
        return self.spec.id

    def _close(self, entry: ClosureEntry) -> Closure:
        frame = self.frame.extend(parameters=tuple(entry.parameters))
        rhs = tuple(parse(text, frame) for text in (entry.f, entry.g)[: len(self.spec.closes)])
        bindings = {frame.unknown(name): piece for name, piece in zip(self.spec.closes, rhs)}
        closed = frame.extend(drop_unknowns=tuple(self.spec.closes))
        system = self.system.with_equations(
            [substitute(eq, bindings) for eq in self.system.equations],
            [(lead, substitute(value, bindings)) for lead, value in self.system.solve_form],
            name=f"{self.id}:{entry.name}",
            frame=closed,
        )
        return Closure(entry.name, system, rhs, entry)

    def system_for(self, closure: str | None) -> PDESystem:
        if closure is None:
            return self.system
        return self.closure(closure).system

    def closure(self, name: str) -> Closure:
        if name not in self.closures:
            raise FixtureNotFoundError(f"fixture '{self.id}' has no closure '{name}'")
        return self.closures[name]

    def row(self, name: str) -> MultiplierRow:
        if name not in self.rows:
            raise FixtureNotFoundError(f"fixture '{self.id}' has no multiplier row '{name}'")
        return self.rows[name]

    def algebra(self, name: str) -> AlgebraFixture:
        if name not in self.algebras:
            raise FixtureNotFoundError(f"fixture '{self.id}' has no algebra '{name}'")
        return self.algebras[name]

    def row_system(self, name: str) -> PDESystem:
        """System a multiplier row is stated for, with the row's parameter values applied."""
        entry = self.row(name).entry
        return specialize(self.system_for(entry.closure), entry.bind)

    def _row(self, entry: MultiplierEntry) -> MultiplierRow:
        frame = self.system_for(entry.closure).frame
        multipliers = MultiplierSet.from_text(frame, entry.lambdas, entry.declared_args, entry.name)
        vector = None
        if entry.density is not None and entry.flux is not None:
            vector = ConservedVector.from_text(frame, [entry.density, entry.flux])
        if entry.bind:
            bindings = {sp.Symbol(name): parse(value, frame) for name, value in entry.bind.items()}
            multipliers = MultiplierSet(
                tuple(substitute(lam, bindings) for lam in multipliers.lambdas), multipliers.declared_args, entry.name
            )
            if vector is not None:
                vector = ConservedVector(tuple(substitute(c, bindings) for c in vector.components))
        return MultiplierRow(multipliers, vector, entry)

    def algebra_system(self, entry: AlgebraEntry) -> PDESystem:
        system = self.system_for(entry.system)
        if entry.freeze:
            system = freeze(system, tuple(entry.freeze))
        return specialize(system, entry.bind)

    def _algebra(self, entry: AlgebraEntry) -> AlgebraFixture:
        system = self.algebra_system(entry)
        if entry.base is not None:
            generators = self.spec_algebra(entry.base).generators
        else:
            generators = entry.generators
        fields = tuple(
            VectorField.from_text(system.frame, g.xi, g.phi, g.extra, g.name) for g in generators
        )
        algebra = AlgebraFixture(entry.name, fields, entry.note, entry.locus)
        if entry.bind:
            bindings = {sp.Symbol(name): parse(value, system.frame) for name, value in entry.bind.items()}
            algebra = algebra.specialized(bindings)
        return algebra

    def spec_algebra(self, name: str) -> AlgebraEntry:
        for entry in self.spec.algebras:
            if entry.name == name:
                return entry
        raise FixtureNotFoundError(f"fixture '{self.id}' has no algebra '{name}'")
