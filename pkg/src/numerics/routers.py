"""
Numerics routes.

Routes:
    - `/simulate`: Run a configuration and return its diagnostics and final state.
    - `/converge`: Refinement study over the configuration's levels.
"""

from fastapi import APIRouter, HTTPException, status

from src.exceptions import SimulationError, ToolkitError
from src.numerics.convergence import convergence_study
from src.numerics.schema import ConvergenceReport, RunConfig, SimulationResult
from src.numerics.solver import simulate

router = APIRouter()


@router.post("/simulate", response_model=SimulationResult)
async def run_simulation(body: RunConfig):
    """
    Raises:
        HTTPException: 409 when the run blows up, 422 for configurations the solver rejects.
    """
    try:
        return simulate(body)
    except SimulationError as error:
        raise HTTPException(status_code=status.HTTP_409_CONFLICT, detail=str(error))
    except ToolkitError as error:
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(error))


@router.post("/converge", response_model=ConvergenceReport)
async def run_convergence(body: RunConfig):
    try:
        return convergence_study(body)
    except SimulationError as error:
        raise HTTPException(status_code=status.HTTP_409_CONFLICT, detail=str(error))
    except ToolkitError as error:
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(error))
