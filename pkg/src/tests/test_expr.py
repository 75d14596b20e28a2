import pytest
import sympy as sp
from hypothesis import given, settings as hypothesis_settings
from hypothesis import strategies as st

from config.general import settings
from src.exceptions import FrameError, ParseError, UnknownIdentifierError, UnsamplableError
from src.expr.core import diff_partial, normalize, substitute
from src.expr.frame import Jet, MultiIndex, parse_frame
from src.expr.parser import parse, to_dsl
from src.expr.schema import CheckReport, VerdictStatus
from src.expr.zero import is_zero
from src.tests.strategies import polynomials

u, h, u_x, h_x, u_xx, c = sp.symbols("u h u_x h_x u_xx c")


def test_header_round_trip(closure_frame):
    assert closure_frame.header() == "indep t x; dep u h; param c d; unknown F(h,u_x,h_x);"
    assert parse_frame(closure_frame.header()) == closure_frame


def test_jet_names_follow_declaration_order(sw_frame):
    assert sw_frame.jet("u", "xt").name == "u_tx"
    assert sw_frame.jet("h", "xx").name == "h_xx"
    assert sw_frame.coord(sp.Symbol("u_tx")) == Jet(0, MultiIndex((1, 1)))
    assert sw_frame.coord(sp.Symbol("w_x")) is None


@pytest.mark.parametrize(
    "header",
    [
        "indep t x; dep u u;",
        "indep t x; dep u h; param u;",
        "indep tt; dep u;",
        "indep t x; dep u h; unknown F(v);",
        "indep t x; dep u h; something else;",
    ],
)
def test_bad_frames(header):
    with pytest.raises(FrameError):
        parse_frame(header)


def test_parse_shallow_water(sw_frame):
    expr = parse("u_t + u*u_x + h_x", sw_frame)
    assert expr == sp.Symbol("u_t") + u * u_x + h_x


def test_decimals_are_exact(sw_frame):
    assert parse("0.1*u", sw_frame) == sp.Rational(1, 10) * u
    assert parse("2.5e-1", sw_frame) == sp.Rational(1, 4)


def test_unknowns_bare_and_applied(closure_frame):
    F = closure_frame.unknown("F")
    assert parse("F", closure_frame) == F
    assert parse("F(h,u_x,h_x)", closure_frame) == F
    assert parse("pd(F,h)", closure_frame) == sp.diff(F, h)
    assert parse("pd(F, u_x, u_x)", closure_frame) == sp.diff(F, u_x, 2)


def test_unknown_with_foreign_arguments(closure_frame):
    with pytest.raises(ParseError):
        parse("F(h,u_x)", closure_frame)


def test_unknown_identifier_offset(sw_frame):
    with pytest.raises(UnknownIdentifierError) as error:
        parse("u + w", sw_frame)
    assert error.value.offset == 4


def test_derivative_of_independent(sw_frame):
    with pytest.raises(ParseError) as error:
        parse("t_x", sw_frame)
    assert not isinstance(error.value, UnknownIdentifierError)


@pytest.mark.parametrize("text, offset", [("u +", 3), ("u * (h", 6), ("u h", 2)])
def test_syntax_errors(sw_frame, text, offset):
    with pytest.raises(ParseError) as error:
        parse(text, sw_frame)
    assert error.value.offset == offset


def test_printer_reads_back(closure_frame):
    expr = parse("u^2*h/2 + ln(h) - pd(F,h)*u_x + c/h + besselJ(0, u)", closure_frame)
    assert parse(to_dsl(expr), closure_frame) == expr


def test_normalize_cancels_common_factors():
    assert normalize((u**2 - h**2) / (u - h)) == u + h
    assert normalize(u * (u + 1) - u**2) == u


@hypothesis_settings(max_examples=50, deadline=None)
@given(polynomials())
def test_normalize_is_idempotent(expr):
    once = normalize(expr)
    assert normalize(once) == once


def test_diff_partial_holds_other_coordinates(closure_frame):
    F = closure_frame.unknown("F")
    assert diff_partial(u * u_x**2 + F, u_x) == 2 * u * u_x + sp.diff(F, u_x)
    assert diff_partial(F, u) == 0


def test_substitute_binds_unknowns_and_partials(closure_frame):
    F = closure_frame.unknown("F")
    result = substitute(sp.diff(F, u_x) + F, {F: h * u_x**2})
    assert result == 2 * h * u_x + h * u_x**2


def test_zero_test_proves_cancellation():
    verdict = is_zero(u * h - h * u)
    assert verdict.status == VerdictStatus.PROVEN_ZERO


@pytest.mark.parametrize(
    "expr",
    [sp.sin(u) ** 2 + sp.cos(u) ** 2 - 1, sp.log(u * h) - sp.log(u) - sp.log(h)],
)
def test_zero_test_samples_transcendental_identities(expr):
    verdict = is_zero(expr)
    assert verdict.status == VerdictStatus.PROBABLY_ZERO
    assert verdict.is_zero


def test_zero_test_reports_witness():
    verdict = is_zero(u_x**2 - u_x, seed=7)
    assert verdict.status == VerdictStatus.NONZERO
    assert set(verdict.witness) == {"u_x"}
    x = verdict.witness["u_x"]
    assert verdict.value == pytest.approx(x**2 - x)
    assert is_zero(u_x**2 - u_x, seed=7).witness == verdict.witness


def test_tiny_residuals_carry_no_witness():
    verdict = is_zero(u_x / 10**8)
    assert verdict.status == VerdictStatus.PROBABLY_ZERO
    assert verdict.witness is None
    assert 0 < verdict.max_residual < settings.witness_floor


@hypothesis_settings(max_examples=50, deadline=None)
@given(polynomials(), st.integers(min_value=0, max_value=12))
def test_witnesses_clear_the_floor(expr, exponent):
    verdict = is_zero(expr / sp.Integer(10) ** exponent)
    if verdict.status == VerdictStatus.NONZERO:
        assert abs(verdict.value) > settings.witness_floor


def test_zero_test_on_unknowns(closure_frame):
    F = closure_frame.unknown("F")
    assert is_zero(sp.diff(F * u_x, u_x) - F - u_x * sp.diff(F, u_x)).is_zero
    assert not is_zero(sp.diff(F, h) - sp.diff(F, u_x)).is_zero


def test_zero_test_gives_up_on_imaginary_values():
    with pytest.raises(UnsamplableError):
        is_zero(sp.sqrt(-u - h) + u)


def test_strict_reporting_treats_polynomial_sampling_as_failure():
    verdict = is_zero(sp.sin(u) ** 2 + sp.cos(u) ** 2 - 1)
    report = CheckReport.from_verdict("check-cl", "demo", verdict, sp.sin(u) ** 2 + sp.cos(u) ** 2 - 1)
    assert not report.polynomial
    assert report.passed_strictly()
    polynomial = CheckReport.from_verdict("check-cl", "demo", verdict, u**2 + h)
    assert polynomial.passed
    assert not polynomial.passed_strictly()
