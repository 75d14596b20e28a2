import pytest
import pytest_asyncio
from httpx import AsyncClient, ASGITransport

from config.general import settings
from main import app
from src.expr.frame import parse_frame
from src.catalog.repos import FixtureRepository
from src.numerics.schema import GridConfig, RunConfig


@pytest.fixture(scope="session")
def repository():
    return FixtureRepository(settings.fixtures_dir)


@pytest.fixture(scope="session")
def sw_frame():
    return parse_frame("indep t x; dep u h;")


@pytest.fixture(scope="session")
def closure_frame():
    return parse_frame("indep t x; dep u h; param c d; unknown F(h,u_x,h_x);")


@pytest.fixture(scope="session")
def sw_free(repository):
    return repository.load_model("sw_free")


@pytest_asyncio.fixture(scope="function")
async def client():
    async with AsyncClient(transport=ASGITransport(app=app), base_url="http://test") as ac:
        yield ac


@pytest.fixture
def small_run():
    """A coarse, short run that finishes quickly."""
    return RunConfig(grid=GridConfig(cells=32, t_end=0.05))
