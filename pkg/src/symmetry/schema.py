from pydantic import BaseModel

from src.expr.schema import CheckReport


class InvarianceReport(BaseModel):
    system_id: str
    field: str
    equations: list[CheckReport]

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.equations)


class InvariantReport(BaseModel):
    invariant: str
    generators: list[CheckReport]

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.generators)


class RepresentationReport(BaseModel):
    system_id: str
    rows: list[CheckReport]

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.rows)


class MapReport(BaseModel):
    system_id: str
    transformation: str
    signs: list[int]
    rows: list[CheckReport]

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.rows)
