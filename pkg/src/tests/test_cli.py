import json

import pytest

from config.general import settings
from src.cli.commands import EXIT_FAILED, EXIT_INPUT, EXIT_OK, EXIT_RUNTIME, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_check_cl_passes(capsys):
    code, out, err = run_cli(capsys, "check-cl", "--model", "sw_free", "--row", "momentum")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["verdict"] == "proven_zero"
    assert report["system_id"] == "sw_free"
    assert "1/1 checks passed" in err


def test_check_cl_accepts_a_fixture_path(capsys):
    path = settings.fixtures_dir / "sw_free.toml"
    code, _, _ = run_cli(capsys, "check-cl", "--model", str(path), "--row", "mass")
    assert code == EXIT_OK


def test_check_cl_reports_a_wrong_flux(capsys):
    code, out, err = run_cli(capsys, "check-cl", "--model", "sw_free", "--row", "momentum", "--flux", "u^2*h + h^2")
    assert code == EXIT_FAILED
    report = json.loads(out)
    assert report["verdict"] == "nonzero"
    assert report["witness"]
    assert "witness" in err


def test_check_cl_on_a_published_typo(capsys):
    code, _, _ = run_cli(capsys, "check-cl", "--model", "pkdv_free", "--row", "galilean_published")
    assert code == EXIT_FAILED


def test_check_multiplier_with_custom_lambdas(capsys):
    code, out, _ = run_cli(capsys, "check-multiplier", "--model", "sw_free", "--lambda", "h", "--lambda", "u")
    assert code == EXIT_OK
    assert len(json.loads(out)) == 2
    code, _, _ = run_cli(capsys, "check-multiplier", "--model", "sw_free", "--lambda", "h", "--lambda", "2*u")
    assert code == EXIT_FAILED


@pytest.mark.parametrize(
    "argv",
    [
        ["check-cl", "--model", "no_such_model", "--row", "mass"],
        ["check-cl", "--model", "sw_free", "--row", "no_such_row"],
        ["check-cl", "--model", "sw_free", "--row", "mass", "--flux", "u*w"],
        ["check-cl", "--model", "sw_free", "--row", "mass", "--flux", "u*(h"],
        ["check-multiplier", "--model", "sw_free"],
        ["catalog-verify"],
        ["converge", "--levels", "64", "128"],
    ],
)
def test_input_errors(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == EXIT_INPUT
    assert err.startswith("error:") or "error:" in err


def test_derive_determining(capsys):
    code, out, _ = run_cli(capsys, "derive-determining", "--model", "sw_free")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["published_equivalent"] is True
    assert sorted(payload["system"]["unknowns"]) == ["L1", "L2"]


def test_derive_inverse(capsys):
    code, out, _ = run_cli(
        capsys, "derive-inverse", "--model", "sw_cons_dissipation", "--row", "specific_momentum", "--closure", "linear"
    )
    assert code == EXIT_OK
    assert "specific_momentum" in json.loads(out)
    code, _, _ = run_cli(
        capsys, "derive-inverse", "--model", "sw_cons_dissipation", "--row", "specific_momentum", "--closure", "counterexample"
    )
    assert code == EXIT_FAILED


def test_check_selfadjoint(capsys):
    assert run_cli(capsys, "check-selfadjoint", "--model", "pkdv_free")[0] == EXIT_OK
    assert run_cli(capsys, "check-selfadjoint", "--model", "pkdv_free", "--rhs", "u_x^2")[0] == EXIT_FAILED


def test_derive_selfadjoint_conditions(capsys):
    code, out, _ = run_cli(capsys, "derive-selfadjoint-conditions", "--model", "pkdv_free", "--rhs", "g")
    assert code == EXIT_OK
    assert json.loads(out)["unknowns"] == ["g"]


@pytest.mark.parametrize("generator, expected", [("time", EXIT_OK), ("galilean", EXIT_OK), ("scaling", EXIT_FAILED)])
def test_check_variational_symmetry(capsys, generator, expected):
    code, _, _ = run_cli(
        capsys, "check-variational-symmetry", "--model", "pkdv_free",
        "--algebra", "point", "--generator", generator, "--lagrangian", "free",
    )
    assert code == expected


def test_check_invariance(capsys):
    code, out, _ = run_cli(capsys, "check-invariance", "--model", "sw_free", "--algebra", "g", "--generator", "boost")
    assert code == EXIT_OK
    assert json.loads(out)[0]["field"] == "boost"


def test_check_invariant(capsys):
    assert run_cli(capsys, "check-invariant", "--model", "sw_cons_dissipation", "--invariant", "I1")[0] == EXIT_OK


def test_catalog_verify(capsys):
    code, out, err = run_cli(capsys, "catalog-verify", "sw_table1_row4")
    assert code == EXIT_OK
    assert json.loads(out)["outcomes"]
    assert "0 not as expected" in err


def test_simulate_with_config(capsys, tmp_path):
    config = tmp_path / "run.toml"
    config.write_text("[grid]\ncells = 32\nt_end = 0.02\n")
    csv_path = tmp_path / "drift.csv"
    code, out, err = run_cli(capsys, "simulate", str(config), "--csv", str(csv_path))
    assert code == EXIT_OK
    assert json.loads(out)["steps"] > 0
    assert csv_path.read_text().startswith("time,density_name,value,drift")
    assert "drifts" in err


def test_simulate_catalog_closure(capsys, tmp_path):
    config = tmp_path / "run.toml"
    config.write_text("[grid]\nt_end = 0.02\n")
    code, _, _ = run_cli(
        capsys, "simulate", str(config), "--fixture", "sw_cons_dissipation", "--closure", "linear", "--cells", "32"
    )
    assert code == EXIT_OK


def test_simulate_rejects_bad_config(capsys, tmp_path):
    config = tmp_path / "run.toml"
    config.write_text("[grid]\ncells = 8\n")
    assert run_cli(capsys, "simulate", str(config))[0] == EXIT_INPUT


def test_simulate_singularity_is_a_runtime_failure(capsys, tmp_path):
    config = tmp_path / "run.toml"
    config.write_text('[grid]\ncells = 32\nt_end = 0.01\n[grid.closure]\nf = "1/u_x"\n[init]\nu = "0"\nh = "1"\n')
    code, _, err = run_cli(capsys, "simulate", str(config))
    assert code == EXIT_RUNTIME
    assert "u_x" in err
