import pytest

from src.exceptions import FixtureNotFoundError
from src.catalog.repos import FixtureRepository
from src.catalog.schema import Expectation
from src.catalog.verify import catalog_verify, verify_fixture
from src.expr.parser import parse
from src.expr.zero import is_zero
from src.jet.calculus import total_derivative, x_index

FIXTURES = [
    "pkdv_closed",
    "pkdv_free",
    "sw_cons_dissipation",
    "sw_cons_emm",
    "sw_dissipative_class",
    "sw_free",
    "sw_table1_row1",
    "sw_table1_row2",
    "sw_table1_row3",
    "sw_table1_row4",
    "sw_table1_row5",
]


def test_manifest_lists_every_fixture(repository):
    manifest = repository.list_fixtures()
    assert [entry.id for entry in manifest] == FIXTURES
    assert all(entry.locus for entry in manifest)
    sw_free = next(entry for entry in manifest if entry.id == "sw_free")
    assert sw_free.rows == ["specific_momentum", "mass", "momentum", "energy", "galilean"]


def test_unknown_fixture(repository):
    with pytest.raises(FixtureNotFoundError):
        repository.load_model("no_such_model")


def test_unknown_row(sw_free):
    with pytest.raises(FixtureNotFoundError):
        sw_free.row("angular_momentum")


def test_models_are_cached(repository):
    assert repository.load_model("sw_free") is repository.load_model("sw_free")


@pytest.mark.parametrize("closure", ["free", "bessel", "ln_subclass", "alpha_trivial", "broken"])
def test_recorded_flux_forms_differentiate_to_g(repository, closure):
    closed = repository.load_model("sw_cons_emm").closure(closure)
    frame = closed.system.frame
    residual = total_derivative(parse(closed.entry.g_flux, frame), x_index(frame), frame) - parse(closed.entry.g, frame)
    assert is_zero(residual).is_zero


def test_closed_systems_drop_the_closed_unknowns(repository):
    emm = repository.load_model("sw_cons_emm")
    closed = emm.closure("bessel").system
    assert not closed.frame.has_unknown("f")
    assert not closed.frame.has_unknown("g")
    assert closed.name == "sw_cons_emm:bessel"


def test_published_typos_are_flagged(repository):
    for fixture_id, row in [("pkdv_free", "galilean_published"), ("sw_table1_row2", "weighted_momentum_published")]:
        entry = repository.load_model(fixture_id).row(row).entry
        assert entry.expect == Expectation.FAIL
        assert entry.flag


def test_published_typo_fails_with_a_witness():
    outcomes = verify_fixture("pkdv_free")
    outcome = next(o for o in outcomes if o.kind == "cl" and o.name == "galilean_published")
    assert not outcome.passed
    assert outcome.ok
    assert outcome.reports[0].witness
    corrected = next(o for o in outcomes if o.kind == "cl" and o.name == "galilean")
    assert corrected.passed


@pytest.mark.slow
@pytest.mark.parametrize("fixture_id", FIXTURES)
def test_fixture_verifies(fixture_id):
    outcomes = verify_fixture(fixture_id)
    assert outcomes
    failures = [(o.kind, o.name, o.detail) for o in outcomes if not o.ok]
    assert failures == []


def test_catalog_report_orders_outcomes_by_fixture():
    report = catalog_verify(["sw_table1_row4", "sw_free"])
    fixtures = [o.fixture for o in report.outcomes]
    assert fixtures == sorted(fixtures)
    assert report.ok
    assert report.checks == len(report.outcomes)


def test_broken_fixture_directory_reports_errors(tmp_path):
    (tmp_path / "broken.toml").write_text(
        'id = "broken"\nlocus = "test"\nframe = "indep t x; dep u h;"\n'
        'equations = ["u_t + u*u_x + h_x", "h_t + u*h_x + h*u_x"]\n'
        '[[multipliers]]\nname = "mass"\nlambdas = ["0", "1"]\ndensity = "h"\nflux = "u*h + h"\n'
    )
    repository = FixtureRepository(tmp_path)
    assert repository.ids() == ["broken"]
    report = catalog_verify(root=str(tmp_path))
    assert not report.ok
    failed = [o for o in report.outcomes if not o.ok]
    assert [(o.kind, o.name) for o in failed] == [("cl", "mass")]
