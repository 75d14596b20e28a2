import pytest
from fastapi import status

SMALL_GRID = {"cells": 32, "t_end": 0.02}


@pytest.mark.asyncio
async def test_list_fixtures(client):
    response = await client.get("/catalog/")
    assert response.status_code == status.HTTP_200_OK
    data = response.json()
    assert len(data) == 11
    assert "sw_free" in [entry["id"] for entry in data]


@pytest.mark.asyncio
async def test_get_fixture(client):
    response = await client.get("/catalog/sw_free")
    assert response.status_code == status.HTTP_200_OK
    data = response.json()
    assert data["id"] == "sw_free"
    assert len(data["equations"]) == 2


@pytest.mark.asyncio
async def test_get_unknown_fixture(client):
    response = await client.get("/catalog/no_such_model")
    assert response.status_code == status.HTTP_404_NOT_FOUND


@pytest.mark.asyncio
async def test_verify_fixture(client):
    response = await client.post("/catalog/verify", json=["sw_table1_row4"])
    assert response.status_code == status.HTTP_200_OK
    outcomes = response.json()["outcomes"]
    assert outcomes
    assert all(outcome["ok"] for outcome in outcomes)


@pytest.mark.asyncio
async def test_verify_unknown_fixture(client):
    response = await client.post("/catalog/verify", json=["no_such_model"])
    assert response.status_code == status.HTTP_404_NOT_FOUND
    assert "no_such_model" in response.json()["detail"]


@pytest.mark.asyncio
async def test_check_cl(client):
    response = await client.post("/conservation/check-cl", json={"model": "sw_free", "row": "energy"})
    assert response.status_code == status.HTTP_200_OK
    data = response.json()
    assert data["verdict"] == "proven_zero"
    assert data["label"] == "energy"


@pytest.mark.asyncio
@pytest.mark.parametrize("payload", [{"model": "sw_free", "row": "no_such_row"}, {"model": "no_such_model", "row": "mass"}])
async def test_check_cl_not_found(client, payload):
    response = await client.post("/conservation/check-cl", json=payload)
    assert response.status_code == status.HTTP_404_NOT_FOUND


@pytest.mark.asyncio
async def test_check_cl_needs_a_vector(client):
    response = await client.post("/conservation/check-cl", json={"model": "pkdv_closed", "row": "momentum"})
    assert response.status_code == status.HTTP_422_UNPROCESSABLE_ENTITY


@pytest.mark.asyncio
async def test_check_multiplier(client):
    response = await client.post("/conservation/check-multiplier", json={"model": "pkdv_closed", "row": "momentum"})
    assert response.status_code == status.HTTP_200_OK
    reports = response.json()
    assert len(reports) == 1
    assert reports[0]["verdict"] != "nonzero"


@pytest.mark.asyncio
async def test_determining(client):
    response = await client.post("/conservation/determining", json={"model": "sw_free"})
    assert response.status_code == status.HTTP_200_OK
    assert sorted(response.json()["unknowns"]) == ["L1", "L2"]
    missing = await client.post("/conservation/determining", json={"model": "sw_free", "ansatz": "no_such_ansatz"})
    assert missing.status_code == status.HTTP_404_NOT_FOUND


@pytest.mark.asyncio
async def test_simulate(client):
    response = await client.post("/numerics/simulate", json={"grid": SMALL_GRID})
    assert response.status_code == status.HTTP_200_OK
    data = response.json()
    assert len(data["u"]) == 32
    assert data["diagnostics"]["integrals"]["mass"][0] == pytest.approx(1.0)


@pytest.mark.asyncio
async def test_simulate_rejects_small_grids(client):
    response = await client.post("/numerics/simulate", json={"grid": {"cells": 8}})
    assert response.status_code == status.HTTP_422_UNPROCESSABLE_ENTITY


@pytest.mark.asyncio
async def test_simulate_singularity_conflicts(client):
    payload = {"grid": {**SMALL_GRID, "closure": {"f": "1/u_x"}}, "init": {"u": "0", "h": "1"}}
    response = await client.post("/numerics/simulate", json=payload)
    assert response.status_code == status.HTTP_409_CONFLICT


@pytest.mark.asyncio
async def test_simulate_foreign_symbols(client):
    response = await client.post("/numerics/simulate", json={"grid": {**SMALL_GRID, "closure": {"f": "u_xxx"}}})
    assert response.status_code == status.HTTP_422_UNPROCESSABLE_ENTITY


@pytest.mark.asyncio
async def test_converge_needs_three_levels(client):
    response = await client.post("/numerics/converge", json={"levels": [32, 64]})
    assert response.status_code == status.HTTP_422_UNPROCESSABLE_ENTITY


@pytest.mark.asyncio
async def test_no_cross_origin_access_by_default(client):
    response = await client.get("/catalog/", headers={"Origin": "http://localhost:3000"})
    assert response.status_code == status.HTTP_200_OK
    assert "access-control-allow-origin" not in response.headers
