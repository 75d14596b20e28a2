"""
Periodic shallow-water solver with pluggable closures.

The semi-discrete scheme is

    u_t = -δ(u²/2 + h) + f,    h_t = -δ(h u) + g   (or -δ(h u) + δG),

with δ the periodic central difference, integrated by classical RK4. Closure
expressions are parsed with the toolkit's DSL and compiled once per run; their
derivative arguments use the same stencils as the transport terms.
"""

import logging
import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass

import numpy as np
import sympy as sp
from sympy.core.function import AppliedUndef

from config.general import settings
from src.exceptions import ConfigurationError, SimulationError, SingularityError
from src.expr.frame import Frame, parse_frame
from src.expr.parser import parse, to_dsl
from src.catalog.repos import FixtureRepository
from src.jet.calculus import inverse_total_derivative_x
from src.numerics.schema import (
    ClosureSpec,
    DiagnosticsSeries,
    GridConfig,
    InitialData,
    RunConfig,
    SimulationResult,
)

logger = logging.getLogger(__name__)

_STENCIL = ("t", "x", "u", "h", "u_x", "h_x", "u_xx", "h_xx")
_BASE_FRAME = parse_frame("indep t x; dep u h;")


def ddx(a: np.ndarray, dx: float) -> np.ndarray:
    return (np.roll(a, -1) - np.roll(a, 1)) / (2 * dx)


def d2dx2(a: np.ndarray, dx: float) -> np.ndarray:
    return (np.roll(a, -1) - 2 * a + np.roll(a, 1)) / dx**2


def numerics_frame(parameters=()) -> Frame:
    return _BASE_FRAME.extend(parameters=("L", *parameters))


@dataclass(frozen=True)
class CompiledField:
    """A closure or density expression compiled for evaluation on grid arrays."""

    expr: sp.Expr
    function: Callable
    parameters: tuple[float, ...]

    def __call__(self, fields: Mapping[str, np.ndarray]) -> np.ndarray:
        shape = fields["u"].shape
        with np.errstate(all="ignore"):
            value = self.function(*(fields[name] for name in _STENCIL), *self.parameters)
        return np.broadcast_to(np.asarray(value, dtype=float), shape)

    @property
    def singular(self) -> bool:
        """Whether u_x appears in a denominator."""
        u_x = sp.Symbol("u_x")
        return any(p.base.has(u_x) and p.exp.is_negative for p in self.expr.atoms(sp.Pow))


def compile_expr(expr: sp.Expr, frame: Frame, values: Mapping[str, float]) -> CompiledField:
    """
    Raises:
        ConfigurationError: If the expression uses unknown functions, parameters
            without a value, or jet coordinates outside the solver stencil.
    """
    if expr.atoms(AppliedUndef):
        raise ConfigurationError(f"'{expr}' contains undetermined functions")
    names = {s.name for s in expr.free_symbols}
    foreign = sorted(names - set(_STENCIL) - set(frame.parameters))
    if foreign:
        raise ConfigurationError(f"'{expr}' uses {foreign}, outside the solver stencil")
    unbound = sorted(p for p in frame.parameters if p in names and p not in values)
    if unbound:
        raise ConfigurationError(f"'{expr}' needs values for {unbound}")
    symbols = [sp.Symbol(name) for name in _STENCIL + frame.parameters]
    function = sp.lambdify(symbols, expr, modules=["scipy", "numpy"])
    return CompiledField(expr, function, tuple(float(values.get(p, 0.0)) for p in frame.parameters))


def compile_field(text: str, frame: Frame, values: Mapping[str, float]) -> CompiledField:
    return compile_expr(parse(text, frame), frame, values)


def _stencil_fields(t: float, x: np.ndarray, u: np.ndarray, h: np.ndarray, dx: float) -> dict[str, np.ndarray]:
    return {
        "t": np.full_like(x, t),
        "x": x,
        "u": u,
        "h": h,
        "u_x": ddx(u, dx),
        "h_x": ddx(h, dx),
        "u_xx": d2dx2(u, dx),
        "h_xx": d2dx2(h, dx),
    }


class DensityMonitor:
    """Compiled densities whose discrete integrals Σ_k ρ_k Δx are tracked during a run."""

    def __init__(self, densities: Mapping[str, str], length: float = 1.0, parameters: Mapping[str, float] | None = None):
        values = {"L": length, **(parameters or {})}
        frame = numerics_frame(tuple(p for p in values if p != "L"))
        self.length = length
        self.fields = {name: compile_field(text, frame, values) for name, text in densities.items()}

    def __call__(self, u: np.ndarray, h: np.ndarray, t: float = 0.0) -> dict[str, float]:
        dx = self.length / len(u)
        x = np.arange(len(u)) * dx
        stencil = _stencil_fields(t, x, np.asarray(u, dtype=float), np.asarray(h, dtype=float), dx)
        return {name: float(np.sum(field(stencil)) * dx) for name, field in self.fields.items()}


def discrete_invariants(
    u, h, densities: Mapping[str, str], length: float = 1.0, t: float = 0.0, parameters: Mapping[str, float] | None = None
) -> dict[str, float]:
    """Σ_k ρ_k Δx for each density, with derivatives realized by the solver's stencils."""
    return DensityMonitor(densities, length, parameters)(u, h, t)


def initial_state(grid: GridConfig, init: InitialData) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Sample the initial data, adding a seeded low-mode perturbation to u when requested.

    Raises:
        SimulationError: If h drops below 0.5.
    """
    frame = numerics_frame()
    x = np.arange(grid.cells) * grid.dx
    fields = _stencil_fields(0.0, x, np.zeros_like(x), np.zeros_like(x), grid.dx)
    values = {"L": grid.length}
    u = np.array(compile_field(init.u, frame, values)(fields), dtype=float)
    h = np.array(compile_field(init.h, frame, values)(fields), dtype=float)
    if grid.perturbation > 0:
        rng = np.random.default_rng(grid.seed)
        for mode in (1, 2, 3):
            amplitude, phase = rng.uniform(-1, 1, size=2)
            u += grid.perturbation * amplitude * np.sin(2 * np.pi * mode * x / grid.length + np.pi * phase)
    if h.min() < 0.5:
        raise SimulationError(f"initial depth {h.min():.3g} below 0.5", 0.0)
    return x, u, h


class Solver:
    """
    Args:
        grid (GridConfig): Grid, step rule and closure.
    """

    def __init__(self, grid: GridConfig):
        self.grid = grid
        closure: ClosureSpec = grid.closure
        frame = numerics_frame(tuple(closure.parameters))
        values = {"L": grid.length, **closure.parameters}
        self.f = compile_field(closure.f, frame, values)
        self.g = compile_field(closure.g_flux if closure.g_flux is not None else closure.g, frame, values)
        self.g_in_flux_form = closure.g_flux is not None
        self.viscosity = compile_expr(sp.diff(self.f.expr, sp.Symbol("u_xx")), frame, values)
        self.singular = self.f.singular or self.g.singular

    def closure_terms(self, t: float, x, u, h) -> tuple[np.ndarray, np.ndarray]:
        dx = self.grid.dx
        fields = _stencil_fields(t, x, u, h, dx)
        if self.singular and np.min(np.abs(fields["u_x"])) < settings.singular_guard:
            raise SingularityError(f"|u_x| fell below {settings.singular_guard:g}", t)
        g = self.g(fields)
        return self.f(fields), ddx(g, dx) if self.g_in_flux_form else g

    def rhs(self, t: float, x, state: np.ndarray) -> np.ndarray:
        u, h = state
        dx = self.grid.dx
        f, g = self.closure_terms(t, x, u, h)
        return np.stack((-ddx(u**2 / 2 + h, dx) + f, -ddx(h * u, dx) + g))

    def step_size(self, x, u, h) -> tuple[float, int]:
        """Fixed dt, or CFL and diffusive limits at the initial state; dt is then shrunk to hit t_end exactly."""
        grid = self.grid
        if grid.dt is not None:
            dt = grid.dt
        else:
            cfl = grid.cfl if grid.cfl is not None else settings.default_cfl
            dt = cfl * grid.dx / float(np.max(np.abs(u) + np.sqrt(h)))
            nu = float(np.max(np.abs(self.viscosity(_stencil_fields(0.0, x, u, h, grid.dx)))))
            if nu > 0:
                dt = min(dt, 0.5 * grid.dx**2 / nu)
        steps = max(1, math.ceil(grid.t_end / dt))
        return grid.t_end / steps, steps

    def power(self, t: float, x, u, h) -> float:
        """∫ (h u f + (u²/2 + h) g) dx, the rate at which the closure changes the energy."""
        f, g = self.closure_terms(t, x, u, h)
        return float(np.sum(h * u * f + (u**2 / 2 + h) * g) * self.grid.dx)


def _check(state: np.ndarray, t: float) -> None:
    if not np.all(np.isfinite(state)):
        raise SimulationError("non-finite state", t)
    if np.max(np.abs(state)) > settings.blowup_limit:
        raise SimulationError("state exceeded the blow-up limit", t)
    if np.min(state[1]) <= 0:
        raise SimulationError("depth reached zero", t)


def simulate(run: RunConfig) -> SimulationResult:
    """
    Advance the closed system to ``t_end`` and record the monitored densities after every step.

    Raises:
        SimulationError: On non-finite values, blow-up or vanishing depth, with the time of detection.
        SingularityError: When a closure singular at u_x = 0 meets |u_x| below the guard.
    """
    grid = run.grid
    solver = Solver(grid)
    monitor = DensityMonitor(run.densities, grid.length, grid.closure.parameters)
    x, u, h = initial_state(grid, run.init)
    dt, steps = solver.step_size(x, u, h)
    logger.info("simulate: M=%d dt=%.3g steps=%d f=%s g=%s", grid.cells, dt, steps, grid.closure.f, grid.closure.g)

    times, integrals, power = [], {name: [] for name in run.densities}, []

    def record(t: float, state: np.ndarray) -> None:
        times.append(t)
        for name, value in monitor(state[0], state[1], t).items():
            integrals[name].append(value)
        power.append(solver.power(t, x, state[0], state[1]))

    state = np.stack((u, h))
    record(0.0, state)
    for n in range(steps):
        t = n * dt
        k1 = solver.rhs(t, x, state)
        k2 = solver.rhs(t + dt / 2, x, state + dt / 2 * k1)
        k3 = solver.rhs(t + dt / 2, x, state + dt / 2 * k2)
        k4 = solver.rhs(t + dt, x, state + dt * k3)
        state = state + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        _check(state, t + dt)
        record((n + 1) * dt, state)
    diagnostics = DiagnosticsSeries(times=times, integrals=integrals, power=power)
    logger.info("simulate: drifts %s", diagnostics.drifts)
    return SimulationResult(
        diagnostics=diagnostics, x=x.tolist(), u=state[0].tolist(), h=state[1].tolist(), steps=steps, dt=dt
    )


def catalog_closure(fixture_id: str, closure: str, repository: FixtureRepository | None = None) -> ClosureSpec:
    """
    Closure of a catalog fixture with its recorded parameter values.

    The mass source is handed over in flux form whenever a potential G with
    g = D_x G is known, either recorded on the fixture or found by inverting D_x.

    Raises:
        FixtureNotFoundError: For an unknown fixture or closure.
        ConfigurationError: If the fixture is not a shallow-water model.
    """
    repository = repository or FixtureRepository()
    fixture = repository.load_model(fixture_id)
    if fixture.frame.dependents != ("u", "h"):
        raise ConfigurationError(f"fixture '{fixture_id}' is not a shallow-water model")
    closed = fixture.closure(closure)
    entry = closed.entry
    if len(fixture.spec.closes) < 2:
        return ClosureSpec(f=entry.f, g="0", parameters=dict(entry.values))
    g_flux = entry.g_flux
    if g_flux is None:
        frame = closed.system.frame
        potential = inverse_total_derivative_x(parse(entry.g, frame), frame)
        g_flux = None if potential is None else to_dsl(potential)
    if g_flux is None:
        logger.warning("closure '%s' of '%s' has no flux form for g, mass drift is not exact", closure, fixture_id)
    return ClosureSpec(f=entry.f, g=entry.g, g_flux=g_flux, parameters=dict(entry.values))
