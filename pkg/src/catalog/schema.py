from enum import Enum

from pydantic import BaseModel, Field

from src.expr.schema import CheckReport


class Expectation(str, Enum):
    PASS = "pass"
    FAIL = "fail"


class MultiplierEntry(BaseModel):
    name: str
    lambdas: list[str]
    declared_args: list[str] = []
    density: str | None = None
    flux: str | None = None
    closure: str | None = None
    bind: dict[str, str] = {}
    locus: str = ""
    expect: Expectation = Expectation.PASS
    flag: str | None = None
    target_only: bool = False


class ClosureEntry(BaseModel):
    name: str
    f: str
    g: str = "0"
    g_flux: str | None = None
    parameters: list[str] = []
    values: dict[str, float] = {}
    preserves: list[str] = []
    locus: str = ""
    expect: Expectation = Expectation.PASS


class GeneratorEntry(BaseModel):
    name: str
    xi: dict[str, str] = {}
    phi: dict[str, str] = {}
    extra: dict[str, str] = {}
    variational: Expectation | None = None
    noether: str | None = None
    noether_factor: str = "1"


class AlgebraEntry(BaseModel):
    name: str
    generators: list[GeneratorEntry] = []
    base: str | None = None
    bind: dict[str, str] = {}
    system: str | None = None
    freeze: list[str] = []
    lagrangian: str | None = None
    note: str = ""
    locus: str = ""
    expect: Expectation = Expectation.PASS


class InvariantEntry(BaseModel):
    name: str
    expr: str
    algebra: str
    locus: str = ""
    expect: Expectation = Expectation.PASS


class RepresentationEntry(BaseModel):
    name: str
    system: str | None = None
    gamma: list[list[str]]
    rhs: list[str]
    invariants: list[str]
    locus: str = ""
    expect: Expectation = Expectation.PASS


class MapEntry(BaseModel):
    name: str
    source: str | None = None
    target: str | None = None
    scales: dict[str, str] = {}
    shifts: dict[str, str] = {}
    signs: list[int]
    freeze: list[str] = []
    locus: str = ""
    expect: Expectation = Expectation.PASS


class LagrangianEntry(BaseModel):
    name: str
    density: str
    system: str | None = None
    locus: str = ""
    expect: Expectation = Expectation.PASS
    flag: str | None = None


class SelfAdjointEntry(BaseModel):
    name: str
    rhs: list[str] = []
    locus: str = ""
    expect: Expectation = Expectation.PASS


class ConditionsEntry(BaseModel):
    name: str
    rhs: str
    split: bool = False
    solutions: list[dict[str, str]] = []
    locus: str = ""


class DeterminingEntry(BaseModel):
    name: str
    ansatz: list[str]
    declared_args: list[str]
    published: list[str] = []
    compare: bool = True
    solutions: list[dict[str, str]] = []
    scope: str = "all"
    locus: str = ""


class InverseEntry(BaseModel):
    name: str
    multipliers: list[str]
    closures: list[str] = []
    violators: list[str] = []
    locus: str = ""


class FixtureSpec(BaseModel):
    """Validated content of one fixture file."""

    id: str
    locus: str
    quote: str = ""
    frame: str
    equations: list[str]
    solve_form: dict[str, str] = {}
    closes: list[str] = []
    multipliers: list[MultiplierEntry] = []
    closures: list[ClosureEntry] = []
    algebras: list[AlgebraEntry] = []
    invariants: list[InvariantEntry] = []
    representations: list[RepresentationEntry] = []
    maps: list[MapEntry] = []
    lagrangians: list[LagrangianEntry] = []
    selfadjoint: list[SelfAdjointEntry] = []
    conditions: list[ConditionsEntry] = []
    determining: list[DeterminingEntry] = []
    inverse: list[InverseEntry] = []


class ManifestEntry(BaseModel):
    id: str
    locus: str
    quote: str = ""
    rows: list[str] = []


class CheckOutcome(BaseModel):
    """One catalog check: the reports it produced and whether they met the fixture's expectation."""

    fixture: str
    kind: str
    name: str
    expect: Expectation
    passed: bool
    ok: bool
    flag: str | None = None
    reports: list[CheckReport] = []
    detail: dict = Field(default_factory=dict)


class CatalogReport(BaseModel):
    outcomes: list[CheckOutcome]

    @property
    def ok(self) -> bool:
        return all(outcome.ok for outcome in self.outcomes)

    @property
    def checks(self) -> int:
        return len(self.outcomes)
