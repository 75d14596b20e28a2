from pydantic import BaseModel

from src.expr.schema import CheckReport, VerdictStatus


class Monomial(BaseModel):
    multiindex: list[int]
    coeff: str


class OperatorEntry(BaseModel):
    mu: int
    nu: int
    monomials: list[Monomial]


class LinOpExport(BaseModel):
    rows: int
    cols: int
    entries: list[OperatorEntry]


class SelfAdjointReport(BaseModel):
    system_id: str
    verdict: VerdictStatus
    coefficients: list[CheckReport]
    deficit: LinOpExport

    @property
    def passed(self) -> bool:
        return self.verdict != VerdictStatus.NONZERO


class VariationalReport(BaseModel):
    system_id: str
    field: str
    euler_images: list[CheckReport]
    boundary: list[str] | None = None

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.euler_images)
