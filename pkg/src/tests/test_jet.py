import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings as hypothesis_settings
from hypothesis import strategies as st

from src.exceptions import FrameError, NotEvolutionaryError
from src.expr.core import normalize
from src.expr.frame import MultiIndex
from src.jet.calculus import (
    apply_prolonged,
    divergence,
    euler_operator,
    inverse_total_derivative_x,
    multi_indices,
    on_solution,
    prolong,
    total_derivative,
)
from src.jet.models import PDESystem, VectorField
from src.tests.strategies import JET, polynomials

t, x, u, h = sp.symbols("t x u h")
u_t, u_x, h_t, h_x, u_xx, h_xx, u_tx = sp.symbols("u_t u_x h_t h_x u_xx h_xx u_tx")


@pytest.fixture(scope="module")
def shallow_water(sw_frame):
    return PDESystem.from_text(
        sw_frame,
        ["u_t + u*u_x + h_x", "h_t + u*h_x + h*u_x"],
        {"u_t": "-u*u_x - h_x", "h_t": "-u*h_x - h*u_x"},
        "sw",
    )


def test_total_derivative_of_product(sw_frame):
    assert total_derivative(u * h, 1, sw_frame) == u_x * h + u * h_x
    assert total_derivative(x * u, 1, sw_frame) == u + x * u_x
    assert total_derivative(u_x, 0, sw_frame) == u_tx


def test_total_derivative_through_unknowns(closure_frame):
    F = closure_frame.unknown("F")
    expected = sp.diff(F, h) * h_x + sp.diff(F, u_x) * u_xx + sp.diff(F, h_x) * h_xx
    assert total_derivative(F, 1, closure_frame) == sp.expand(expected)


_polynomials = st.lists(
    st.tuples(
        st.integers(min_value=-3, max_value=3),
        st.integers(min_value=0, max_value=2),
        st.integers(min_value=0, max_value=2),
        st.integers(min_value=0, max_value=2),
        st.integers(min_value=0, max_value=1),
    ),
    min_size=1,
    max_size=4,
)


@hypothesis_settings(max_examples=25, deadline=None)
@given(_polynomials)
def test_euler_operator_annihilates_total_derivatives(sw_frame, terms):
    potential = sum(k * u**a * h**b * u_x**c * h_x**d for k, a, b, c, d in terms)
    derivative = total_derivative(potential, 1, sw_frame)
    assert euler_operator(derivative, 0, sw_frame) == 0
    assert euler_operator(derivative, 1, sw_frame) == 0


def test_euler_operator_of_dirichlet_energy(sw_frame):
    assert euler_operator(u_x**2 / 2, 0, sw_frame) == -u_xx
    assert euler_operator(u_x**2 / 2, 1, sw_frame) == 0


def test_multi_indices_sorted_by_order():
    assert multi_indices(2, 1) == [MultiIndex((0, 0)), MultiIndex((1, 0)), MultiIndex((0, 1))]
    assert len(multi_indices(2, 2)) == 6


def test_on_solution_replaces_leading_family(shallow_water):
    assert on_solution(u_t, shallow_water) == -u * u_x - h_x
    assert on_solution(u_tx, shallow_water) == sp.expand(-(u_x**2) - u * u_xx - h_xx)
    assert on_solution(u_x * h, shallow_water) == u_x * h


def test_on_solution_needs_solve_form(sw_frame):
    system = PDESystem.from_text(sw_frame, ["u_t + u*u_x + h_x", "h_t + u*h_x + h*u_x"])
    with pytest.raises(NotEvolutionaryError):
        on_solution(u_t, system)


def test_solve_form_checks_itself(shallow_water):
    assert all(verdict.is_zero for verdict in shallow_water.check_solve_form())


def test_solve_form_rejects_leading_family_on_the_right(sw_frame):
    with pytest.raises(FrameError):
        PDESystem.from_text(sw_frame, ["u_t - u_tx"], {"u_t": "u_tx"})


def test_boost_prolongation(sw_frame):
    boost = VectorField.from_text(sw_frame, {"x": "t"}, {"u": "1"}, name="boost")
    coefficients = prolong(boost, 1)
    assert coefficients[u_t] == -u_x
    assert coefficients[h_t] == -h_x
    assert coefficients[u_x] == 0
    assert boost.characteristic() == (1 - t * u_x, -t * h_x)


def test_boost_leaves_shallow_water_invariant(shallow_water, sw_frame):
    boost = VectorField.from_text(sw_frame, {"x": "t"}, {"u": "1"}, name="boost")
    for equation in shallow_water.equations:
        assert apply_prolonged(boost, equation) == 0


def test_point_fields_reject_derivatives(sw_frame):
    with pytest.raises(FrameError):
        VectorField.from_text(sw_frame, {}, {"u": "u_x"})


def test_divergence_of_mass_flux(sw_frame):
    assert divergence((h, u * h), sw_frame) == h_t + u_x * h + u * h_x


def test_inverse_total_derivative_recovers_flux(sw_frame):
    flux = u**2 * h / 2 + h**2
    assert inverse_total_derivative_x(total_derivative(flux, 1, sw_frame), sw_frame) == flux


def test_inverse_total_derivative_rejects_non_divergence(sw_frame):
    assert inverse_total_derivative_x(u * h_x, sw_frame) is None


@hypothesis_settings(max_examples=40, deadline=None)
@given(polynomials(tuple(JET)))
def test_total_derivatives_commute(sw_frame, expr):
    tx = total_derivative(total_derivative(expr, 0, sw_frame), 1, sw_frame)
    xt = total_derivative(total_derivative(expr, 1, sw_frame), 0, sw_frame)
    assert normalize(tx - xt) == 0


def _along_profile(expr, frame):
    """Evaluate jet coordinates along u = sin x, h = 2 + cos x."""
    profile = {"u": sp.sin(x), "h": 2 + sp.cos(x)}
    table = {
        symbol: sp.diff(profile[frame.dependents[jet.alpha]], x, jet.J.orders[1])
        for symbol, jet in frame.jets_in(expr).items()
    }
    return sp.lambdify(x, expr.xreplace(table), modules="numpy")


@hypothesis_settings(max_examples=40, deadline=None)
@given(polynomials((u, h, u_x, h_x)))
def test_total_derivative_matches_finite_differences(sw_frame, expr):
    points = np.linspace(0.0, 2 * np.pi, 9)
    step = 1e-3
    value = _along_profile(expr, sw_frame)
    exact = np.broadcast_to(_along_profile(total_derivative(expr, 1, sw_frame), sw_frame)(points), points.shape)
    stencil = (
        -value(points + 2 * step) + 8 * value(points + step) - 8 * value(points - step) + value(points - 2 * step)
    ) / (12 * step)
    assert np.all(np.abs(stencil - exact) <= 1e-6 * (1 + np.abs(exact).max()))
