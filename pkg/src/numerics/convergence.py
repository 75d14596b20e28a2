import logging

import numpy as np

from config.general import settings
from src.exceptions import ConfigurationError
from src.numerics.schema import ConvergenceReport, RunConfig
from src.numerics.solver import simulate

logger = logging.getLogger(__name__)

EXACT = "exact"


def fitted_order(spacings: list[float], drifts: list[float]) -> float | str:
    """Least-squares slope of log(drift) against log(Δx); ``"exact"`` when every drift is at round-off."""
    if all(d < settings.exact_drift for d in drifts):
        return EXACT
    floor = np.finfo(float).tiny
    slope, _ = np.polyfit(np.log(spacings), np.log(np.maximum(drifts, floor)), 1)
    return float(slope)


def convergence_study(run: RunConfig, levels: list[int] | None = None) -> ConvergenceReport:
    """
    Run the same configuration on successively doubled grids.

    Raises:
        ConfigurationError: With fewer than three levels or levels that do not double.
    """
    levels = list(levels or run.levels)
    if len(levels) < 3:
        raise ConfigurationError(f"a convergence study needs at least three levels, got {levels}")
    if any(b != 2 * a for a, b in zip(levels, levels[1:])):
        raise ConfigurationError(f"levels must double: {levels}")
    drifts = {name: [] for name in run.densities}
    spacings = []
    for cells in levels:
        level = run.model_copy(update={"grid": run.grid.refined(cells)})
        result = simulate(level)
        spacings.append(level.grid.dx)
        for name, drift in result.diagnostics.drifts.items():
            drifts[name].append(drift)
    orders = {name: fitted_order(spacings, values) for name, values in drifts.items()}
    logger.info("convergence over %s: %s", levels, orders)
    return ConvergenceReport(levels=levels, drifts=drifts, orders=orders)
