"""
Catalog routes.

Routes:
    - `/`: Manifest of every fixture with its locus.
    - `/{fixture_id}`: The validated fixture file.
    - `/verify`: Run catalog verification for some or all fixtures.
"""

from fastapi import APIRouter, Body, Depends, HTTPException, status

from src.exceptions import FixtureNotFoundError, ToolkitError
from src.catalog.repos import FixtureRepository, get_repository
from src.catalog.schema import CatalogReport, FixtureSpec, ManifestEntry
from src.catalog.verify import catalog_verify

router = APIRouter()


@router.get("/", response_model=list[ManifestEntry])
async def list_fixtures(repository: FixtureRepository = Depends(get_repository)):
    return repository.list_fixtures()


@router.post("/verify", response_model=CatalogReport)
async def verify(ids: list[str] | None = Body(None), repository: FixtureRepository = Depends(get_repository)):
    """
    Verify fixtures in-process.

    Raises:
        HTTPException: 404 if one of the ids is unknown.
    """
    unknown = sorted(set(ids or []) - set(repository.ids()))
    if unknown:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=f"Unknown fixtures: {unknown}")
    return catalog_verify(ids, jobs=1, root=str(repository.root))


@router.get("/{fixture_id}", response_model=FixtureSpec)
async def get_fixture(fixture_id: str, repository: FixtureRepository = Depends(get_repository)):
    """
    Raises:
        HTTPException: 404 for an unknown id, 422 if the fixture does not parse.
    """
    try:
        repository.load_model(fixture_id)
        return repository.load_spec(fixture_id)
    except FixtureNotFoundError as error:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=str(error))
    except ToolkitError as error:
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(error))
