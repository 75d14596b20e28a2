"""
Conservation-law routes over catalog models.

Routes:
    - `/check-cl`: Verify a row's conserved vector against its multipliers.
    - `/check-multiplier`: Euler-operator test of a row's multipliers.
    - `/determining`: Emit the determining system of a model's multiplier ansatz.
"""

from fastapi import APIRouter, Depends, HTTPException, status

from src.exceptions import FixtureNotFoundError, ToolkitError
from src.expr.schema import CheckReport
from src.catalog.repos import FixtureRepository, get_repository
from src.conservation.determining import generate_determining_system
from src.conservation.laws import verify_conserved_vector, verify_multipliers
from src.conservation.models import MultiplierSet
from src.conservation.schema import DeterminingRequest, DeterminingSystemExport, RowRequest

router = APIRouter()


def _model(repository: FixtureRepository, model_id: str):
    try:
        return repository.load_model(model_id)
    except FixtureNotFoundError as error:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=str(error))


@router.post("/check-cl", response_model=CheckReport)
async def check_cl(body: RowRequest, repository: FixtureRepository = Depends(get_repository)):
    """
    Raises:
        HTTPException: 404 for an unknown model or row, 422 if the row carries no conserved vector.
    """
    fixture = _model(repository, body.model)
    try:
        row = fixture.row(body.row)
        if row.vector is None:
            raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=f"Row '{body.row}' has no conserved vector")
        return verify_conserved_vector(fixture.row_system(body.row), row.multipliers, row.vector, label=body.row)
    except FixtureNotFoundError as error:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=str(error))


@router.post("/check-multiplier", response_model=list[CheckReport])
async def check_multiplier(body: RowRequest, repository: FixtureRepository = Depends(get_repository)):
    fixture = _model(repository, body.model)
    try:
        row = fixture.row(body.row)
        return verify_multipliers(fixture.row_system(body.row), row.multipliers, label=body.row)
    except FixtureNotFoundError as error:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=str(error))


@router.post("/determining", response_model=DeterminingSystemExport)
async def determining(body: DeterminingRequest, repository: FixtureRepository = Depends(get_repository)):
    """
    Determining system for the named ansatz, or the model's first one.

    Raises:
        HTTPException: 404 if the model has no such ansatz.
    """
    fixture = _model(repository, body.model)
    entries = [e for e in fixture.spec.determining if body.ansatz in (None, e.name)]
    if not entries:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=f"Model '{body.model}' has no ansatz '{body.ansatz}'")
    entry = entries[0]
    try:
        ansatz = MultiplierSet.from_text(fixture.frame, entry.ansatz, entry.declared_args, entry.name)
    except ToolkitError as error:
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(error))
    return generate_determining_system(fixture.system, ansatz).export()
