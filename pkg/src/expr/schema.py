from enum import Enum

import sympy as sp
from pydantic import BaseModel

from src.expr.parser import to_dsl

TRANSCENDENTAL = (sp.log, sp.exp, sp.sin, sp.cos, sp.besselj, sp.bessely)


class VerdictStatus(str, Enum):
    PROVEN_ZERO = "proven_zero"
    PROBABLY_ZERO = "probably_zero"
    NONZERO = "nonzero"


class ZeroVerdict(BaseModel):
    status: VerdictStatus
    samples: int | None = None
    max_residual: float | None = None
    witness: dict[str, float] | None = None
    value: float | None = None

    @property
    def is_zero(self) -> bool:
        return self.status != VerdictStatus.NONZERO


class CheckReport(BaseModel):
    """One verification verdict in the published JSON report format."""

    task: str
    system_id: str
    label: str | None = None
    verdict: VerdictStatus
    residual_text: str
    witness: dict[str, float] | None = None
    samples: int | None = None
    max_residual: float | None = None
    value: float | None = None
    polynomial: bool = True

    @classmethod
    def from_verdict(
        cls, task: str, system_id: str, verdict: ZeroVerdict, residual: sp.Expr, label: str | None = None
    ) -> "CheckReport":
        residual = sp.sympify(residual)
        polynomial = not residual.has(*TRANSCENDENTAL) and all(
            power.exp.is_Rational for power in residual.atoms(sp.Pow)
        )
        return cls(
            task=task,
            system_id=system_id,
            label=label,
            verdict=verdict.status,
            residual_text=to_dsl(residual),
            witness=verdict.witness,
            samples=verdict.samples,
            max_residual=verdict.max_residual,
            value=verdict.value,
            polynomial=polynomial,
        )

    @property
    def passed(self) -> bool:
        return self.verdict != VerdictStatus.NONZERO

    def passed_strictly(self) -> bool:
        """ProbablyZero on a polynomial-only residual counts as a failure."""
        return self.verdict == VerdictStatus.PROVEN_ZERO or (self.passed and not self.polynomial)
