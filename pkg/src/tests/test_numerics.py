import numpy as np
import pytest
from pydantic import ValidationError

from src.exceptions import ConfigurationError, SimulationError, SingularityError
from src.numerics.convergence import EXACT, convergence_study, fitted_order
from src.numerics.export import write_csv, write_gnuplot
from src.numerics.schema import ClosureSpec, GridConfig, InitialData, RunConfig
from src.numerics.solver import Solver, catalog_closure, d2dx2, ddx, discrete_invariants, simulate


def test_stencils_are_exact_on_low_modes():
    cells = 64
    dx = 1.0 / cells
    x = np.arange(cells) * dx
    wave = np.sin(2 * np.pi * x)
    factor = np.sin(2 * np.pi * dx) / dx
    assert ddx(wave, dx) == pytest.approx(factor * np.cos(2 * np.pi * x), abs=1e-12)
    assert np.sum(d2dx2(wave, dx)) == pytest.approx(0.0, abs=1e-9)


def test_discrete_invariants_of_still_water():
    u, h = np.zeros(32), np.ones(32)
    densities = {"specific_momentum": "u", "mass": "h", "energy": "(u^2*h + h^2)/2"}
    values = discrete_invariants(u, h, densities)
    assert values["mass"] == pytest.approx(1.0)
    assert values["specific_momentum"] == 0.0
    assert values["energy"] == pytest.approx(0.5)


def test_still_water_stays_still():
    run = RunConfig(grid=GridConfig(cells=32, t_end=0.05), init=InitialData(u="0", h="1"))
    result = simulate(run)
    assert result.u == [0.0] * 32
    assert all(drift == 0.0 for drift in result.diagnostics.drifts.values())


def test_free_run_keeps_mass_and_specific_momentum(small_run):
    result = simulate(small_run)
    drifts = result.diagnostics.drifts
    assert drifts["mass"] < 1e-13
    assert drifts["specific_momentum"] < 1e-13
    assert len(result.diagnostics.times) == result.steps + 1
    assert result.diagnostics.times[-1] == pytest.approx(small_run.grid.t_end)
    assert result.diagnostics.power == [0.0] * (result.steps + 1)


def test_fixed_step_is_shrunk_to_hit_the_end_time():
    grid = GridConfig(cells=32, dt=0.003, t_end=0.01)
    solver = Solver(grid)
    dt, steps = solver.step_size(None, np.zeros(32), np.ones(32))
    assert steps == 4
    assert dt == pytest.approx(0.0025)


def test_viscosity_limits_the_step():
    closure = ClosureSpec(f="nu*u_xx", parameters={"nu": 1.0})
    grid = GridConfig(cells=64, closure=closure)
    x = np.arange(64) * grid.dx
    dt, _ = Solver(grid).step_size(x, np.zeros(64), np.ones(64))
    assert dt <= 0.5 * grid.dx**2


def test_viscous_closure_dissipates_energy(small_run):
    closure = ClosureSpec(f="nu*u_xx", parameters={"nu": 0.01})
    run = small_run.model_copy(update={"grid": small_run.grid.model_copy(update={"closure": closure})})
    result, free = simulate(run), simulate(small_run)
    assert result.steps == free.steps
    energy = result.diagnostics.integrals["energy"]
    assert all(later < earlier for earlier, later in zip(energy, energy[1:]))
    assert energy[-1] < free.diagnostics.integrals["energy"][-1]
    assert result.diagnostics.drift("mass") < 1e-13


def test_flux_form_keeps_mass_exact(small_run):
    closure = ClosureSpec(f="0", g="0.01*h_xx", g_flux="0.01*h_x")
    run = small_run.model_copy(update={"grid": small_run.grid.model_copy(update={"closure": closure})})
    assert simulate(run).diagnostics.drift("mass") < 1e-13


def test_logarithmic_closure_in_flux_form(small_run):
    closure = ClosureSpec(
        f="(b1*ln(h) + b2)*u_x + (b1*u + b3)/h*h_x",
        g="(b1*u + b3)*u_x + (b1*ln(h) + b2)*h_x",
        g_flux="b1*u^2/2 + b3*u + b1*(h*ln(h) - h) + b2*h",
        parameters={"b1": 0.01, "b2": 0.02, "b3": 0.01},
    )
    run = small_run.model_copy(update={"grid": small_run.grid.model_copy(update={"closure": closure})})
    result = simulate(run)
    assert result.diagnostics.drift("mass") < 1e-13
    assert result.diagnostics.drift("energy") < 1e-3


def test_singular_closure_is_guarded():
    closure = ClosureSpec(f="1/u_x")
    run = RunConfig(grid=GridConfig(cells=32, t_end=0.01, closure=closure), init=InitialData(u="0", h="1"))
    with pytest.raises(SingularityError):
        simulate(run)


def test_blow_up_is_reported():
    closure = ClosureSpec(f="1000000*u^3")
    run = RunConfig(grid=GridConfig(cells=32, dt=0.01, t_end=1.0, closure=closure), init=InitialData(u="1", h="1"))
    with pytest.raises(SimulationError) as error:
        simulate(run)
    assert error.value.time > 0


def test_shallow_initial_depth_is_rejected():
    run = RunConfig(grid=GridConfig(cells=32), init=InitialData(h="0.2"))
    with pytest.raises(SimulationError):
        simulate(run)


def test_closures_outside_the_stencil_are_rejected():
    with pytest.raises(ConfigurationError):
        Solver(GridConfig(closure=ClosureSpec(f="u_xxx")))


def test_dt_and_cfl_are_exclusive():
    with pytest.raises(ValidationError):
        GridConfig(dt=0.001, cfl=0.2)
    with pytest.raises(ValidationError):
        GridConfig(cells=8)


def test_fitted_order():
    spacings = [1 / 64, 1 / 128, 1 / 256]
    assert fitted_order(spacings, [3 * s**2 for s in spacings]) == pytest.approx(2.0)
    assert fitted_order(spacings, [1e-15, 0.0, 2e-16]) == EXACT


@pytest.mark.parametrize("levels", [[64, 128], [64, 128, 192]])
def test_convergence_needs_doubling_levels(levels):
    with pytest.raises(ConfigurationError):
        convergence_study(RunConfig(), levels)


@pytest.mark.slow
def test_free_convergence_study():
    report = convergence_study(RunConfig(grid=GridConfig(t_end=0.1)), [32, 64, 128])
    assert report.order("mass") == EXACT
    assert report.order("specific_momentum") == EXACT
    assert isinstance(report.order("energy"), float)


@pytest.mark.slow
def test_viscous_energy_loss_does_not_converge_away():
    closure = ClosureSpec(f="nu*u_xx", parameters={"nu": 0.01})
    run = RunConfig(grid=GridConfig(t_end=0.1, closure=closure))
    report = convergence_study(run, [32, 64, 128])
    assert abs(report.order("energy")) < 0.5


@pytest.mark.slow
def test_logarithmic_closure_converges_at_second_order(repository):
    closure = catalog_closure("sw_cons_emm", "ln_subclass", repository)
    report = convergence_study(RunConfig(grid=GridConfig(t_end=0.1, closure=closure)), [64, 128, 256])
    assert report.order("mass") == EXACT
    for name in ("momentum", "energy"):
        order = report.order(name)
        assert order == EXACT or order >= 1.7


def test_catalog_closure_carries_parameter_values(repository):
    closure = catalog_closure("sw_cons_dissipation", "linear", repository)
    assert closure.f == "nu*u_xx"
    assert closure.g == "0"
    assert closure.parameters == {"nu": 0.01}


def test_catalog_closure_needs_shallow_water(repository):
    with pytest.raises(ConfigurationError):
        catalog_closure("pkdv_free", "free", repository)


@pytest.mark.parametrize("closure", ["ln_subclass", "alpha_trivial", "bessel"])
def test_catalog_closure_keeps_mass_exact(repository, small_run, closure):
    spec = catalog_closure("sw_cons_emm", closure, repository)
    assert spec.g_flux is not None
    run = small_run.model_copy(update={"grid": small_run.grid.model_copy(update={"closure": spec})})
    result = simulate(run)
    assert result.diagnostics.drift("mass") < 1e-13


def test_catalog_closure_derives_a_missing_flux_form(repository, small_run, monkeypatch):
    entry = repository.load_model("sw_cons_emm").closure("ln_subclass").entry
    monkeypatch.setattr(entry, "g_flux", None)
    spec = catalog_closure("sw_cons_emm", "ln_subclass", repository)
    assert spec.g_flux is not None
    run = small_run.model_copy(update={"grid": small_run.grid.model_copy(update={"closure": spec})})
    assert simulate(run).diagnostics.drift("mass") < 1e-13


def test_exports(small_run, tmp_path):
    result = simulate(small_run)
    write_csv(result.diagnostics, tmp_path / "run.csv")
    write_gnuplot(result.diagnostics, tmp_path / "run.dat")
    lines = (tmp_path / "run.csv").read_text().splitlines()
    assert lines[0] == "time,density_name,value,drift"
    assert len(lines) == 1 + len(result.diagnostics.times) * 4
    table = np.loadtxt(tmp_path / "run.dat")
    assert table.shape == (len(result.diagnostics.times), 6)
