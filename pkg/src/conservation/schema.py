from pydantic import BaseModel

from src.expr.schema import CheckReport, ZeroVerdict


class DeterminingSystemExport(BaseModel):
    unknowns: list[str]
    split_coords: list[str] = []
    retained: list[str] = []
    equations: list[str]


class ClosureReport(BaseModel):
    system_id: str
    label: str | None = None
    multipliers: list[CheckReport]
    density: str | None = None
    flux: str | None = None

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.multipliers)


class TrivialityReport(BaseModel):
    null_divergence: ZeroVerdict
    vanishes_on_solutions: ZeroVerdict

    @property
    def trivial(self) -> bool:
        return self.null_divergence.is_zero or self.vanishes_on_solutions.is_zero


class RowRequest(BaseModel):
    model: str
    row: str


class DeterminingRequest(BaseModel):
    model: str
    ansatz: str | None = None
