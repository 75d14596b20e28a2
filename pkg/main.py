"""
Main application setup for FastAPI.

The service exposes the same batch operations as the ``ccl`` command line, for
consumers that prefer HTTP.

Routers:
    - catalog_router: Fixture manifest, fixture files and catalog verification.
    - conservation_router: Conserved-vector and multiplier checks, determining systems.
    - numerics_router: Shallow-water simulations and refinement studies.

CORS:
    Allowed origins come from ``settings.cors_origins`` (``CCL_CORS_ORIGINS``), empty by default.

Lifespan:
    Configures logging once per process.
"""

import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from config.general import settings
from config.log import setup_logging
from src.catalog.routers import router as catalog_router
from src.conservation.routers import router as conservation_router
from src.numerics.routers import router as numerics_router


@asynccontextmanager
async def lifespan(app: FastAPI):
    """
    Lifecycle manager for the FastAPI application.

    Configures logging before the first request is served.

    Args:
        app (FastAPI): The FastAPI application instance.

    Yields:
        None: Provides a context for the lifespan of the app.
    """
    setup_logging(settings.log_level)
    logging.getLogger(__name__).info("fixtures served from %s", settings.fixtures_dir)
    yield


app = FastAPI(lifespan=lifespan)


app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.cors_origins,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


app.include_router(catalog_router, prefix="/catalog", tags=["catalog"])
app.include_router(conservation_router, prefix="/conservation", tags=["conservation"])
app.include_router(numerics_router, prefix="/numerics", tags=["numerics"])
