from pydantic import BaseModel, Field, model_validator

DEFAULT_DENSITIES = {
    "specific_momentum": "u",
    "mass": "h",
    "momentum": "u*h",
    "energy": "(u^2*h + h^2)/2",
}


class ClosureSpec(BaseModel):
    """
    Right-hand sides f, g of u_t + u u_x + h_x = f, h_t + u h_x + h u_x = g.

    ``g_flux`` is an optional G with g = D_x G; when given, the mass equation is
    advanced in flux form and discrete mass stays exact.
    """

    f: str = "0"
    g: str = "0"
    g_flux: str | None = None
    parameters: dict[str, float] = {}


class GridConfig(BaseModel):
    cells: int = Field(128, ge=16)
    length: float = Field(1.0, gt=0)
    dt: float | None = Field(None, gt=0)
    cfl: float | None = Field(None, gt=0, le=0.5)
    t_end: float = Field(0.25, gt=0)
    seed: int = 0
    perturbation: float = Field(0.0, ge=0)
    closure: ClosureSpec = ClosureSpec()

    @model_validator(mode="after")
    def _one_step_rule(self) -> "GridConfig":
        if self.dt is not None and self.cfl is not None:
            raise ValueError("give either dt or cfl, not both")
        return self

    @property
    def dx(self) -> float:
        return self.length / self.cells

    def refined(self, cells: int) -> "GridConfig":
        return self.model_copy(update={"cells": cells})


class InitialData(BaseModel):
    u: str = "0.1*sin(2*pi*x/L) + 0.05*cos(4*pi*x/L)"
    h: str = "1 + 0.1*cos(2*pi*x/L) + 0.05*sin(2*pi*x/L)"


class RunConfig(BaseModel):
    """Content of a run configuration file."""

    grid: GridConfig = GridConfig()
    init: InitialData = InitialData()
    densities: dict[str, str] = Field(default_factory=lambda: dict(DEFAULT_DENSITIES))
    levels: list[int] = [64, 128, 256]


class DiagnosticsSeries(BaseModel):
    times: list[float]
    integrals: dict[str, list[float]]
    power: list[float] = []

    def drift(self, name: str) -> float:
        """Largest deviation from the initial value, relative to max(1, |initial|)."""
        values = self.integrals[name]
        scale = max(1.0, abs(values[0]))
        return max(abs(v - values[0]) for v in values) / scale

    @property
    def drifts(self) -> dict[str, float]:
        return {name: self.drift(name) for name in self.integrals}


class SimulationResult(BaseModel):
    diagnostics: DiagnosticsSeries
    x: list[float]
    u: list[float]
    h: list[float]
    steps: int
    dt: float


class ConvergenceReport(BaseModel):
    levels: list[int]
    drifts: dict[str, list[float]]
    orders: dict[str, float | str]

    def order(self, name: str) -> float | str:
        return self.orders[name]
